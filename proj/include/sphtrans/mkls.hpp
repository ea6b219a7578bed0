#ifndef SPHTRANS_MKLS_HPP
#define SPHTRANS_MKLS_HPP

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/QR>

#include "sphtrans/geometry.hpp"
#include "sphtrans/stencil.hpp"

namespace sphtrans {

/// Distance measure inside the Gaussian correlation.
enum class CorrelationDistance { Chordal, Geodesic };

/// exp(-c d^2); throws DomainError for c <= 0.
double gaussian_correlation(double d, double c);

/// Moving kriging interpolant over one cap.
///
///   a^T(x) = Y^T(x) A + r^T(x) R^{-1} (I - P A),   A = (P^T R^{-1} P)^{-1} P^T R^{-1}
///
/// R is the node-to-node correlation matrix of the stencil and r(x) the
/// correlations between x and the stencil nodes. Only Y(x) and r(x) depend on x,
/// so gradients differentiate those two factors.
///
/// With R = L L^T and L^{-1} P D = Q T Π^T (column-pivoted QR), this evaluates as
///   a = L^{-T} [ρ + Q T^{-T} Π^T D (y - (L^{-1}P)^T ρ)],   ρ = L^{-1} r,
/// which never forms P^T R^{-1} P.
class MklsStencil {
public:
    MklsStencil(const SpherePoint& x, const Neighborhood& nbhd, const PointSet& ps, int m, double c,
                CorrelationDistance distance = CorrelationDistance::Chordal,
                double condition_cap = kDefaultConditionCap);

    Eigen::VectorXd shape_functions() const;
    Eigen::MatrixX3d gradient_shape_functions() const;

    double correlation_condition() const { return r_condition_; }
    double trend_condition() const { return trend_condition_; }

private:
    Eigen::MatrixXd combine(const Eigen::MatrixXd& basis_part, const Eigen::MatrixXd& corr_part) const;

    SpherePoint x_;
    int m_;
    double c_;
    CorrelationDistance distance_;
    std::vector<Vec3> nodes_;
    Eigen::LLT<Eigen::MatrixXd> r_llt_;
    Eigen::MatrixXd whitened_p_;  // L^{-1} P
    Eigen::VectorXd scaling_;     // D
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_;
    Eigen::MatrixXd thin_q_;
    double r_condition_ = 1.0;
    double trend_condition_ = 1.0;
};

Eigen::VectorXd mkls_shape_functions(const SpherePoint& x, const Neighborhood& nbhd,
                                     const PointSet& ps, int m, double c,
                                     CorrelationDistance distance = CorrelationDistance::Chordal);

StencilRow mkls_advection_row(const SpherePoint& x, const Neighborhood& nbhd, const PointSet& ps,
                              int m, double c,
                              CorrelationDistance distance = CorrelationDistance::Chordal,
                              double condition_cap = kDefaultConditionCap);

}  // namespace sphtrans

#endif  // SPHTRANS_MKLS_HPP
