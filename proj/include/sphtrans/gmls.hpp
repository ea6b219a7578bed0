#ifndef SPHTRANS_GMLS_HPP
#define SPHTRANS_GMLS_HPP

#include <Eigen/Core>
#include <Eigen/QR>

#include "sphtrans/geometry.hpp"
#include "sphtrans/stencil.hpp"

namespace sphtrans {

/// Wendland C2 function (1 - r)^4 (4 r + 1) on [0, 1], zero beyond.
inline double wendland_weight(double r) {
    if (r >= 1.0) return 0.0;
    const double s = 1.0 - r;
    const double s2 = s * s;
    return s2 * s2 * (4.0 * r + 1.0);
}

/// Weighted least-squares fit in the harmonic basis over one cap.
///
/// Holds W and a column-pivoted QR of the column-scaled W^{1/2} P, so value and
/// gradient shape functions at the same point share one factorization. With
/// W^{1/2} P D = Q R Π^T, the shape functions W P (P^T W P)^{-1} y become
/// W^{1/2} Q R^{-T} Π^T D y; P^T W P itself is never formed, since it squares the
/// condition number of the harmonic basis on small caps.
class GmlsStencil {
public:
    /// Throws StencilError when |I| < (m+1)^2 and ConditioningError when the
    /// rank-revealing estimate |R_11| / |R_kk| exceeds `condition_cap`.
    GmlsStencil(const SpherePoint& x, const Neighborhood& nbhd, const PointSet& ps, int m,
                double condition_cap = kDefaultConditionCap);

    /// a*(x) = W P (P^T W P)^{-1} Y(x)
    Eigen::VectorXd shape_functions() const;
    /// Columns are the three Cartesian components of the surface gradient rows.
    Eigen::MatrixX3d gradient_shape_functions() const;

    double condition_estimate() const { return condition_; }
    const Eigen::VectorXd& weights() const { return weights_; }

private:
    // W P (P^T W P)^{-1} rhs for rhs of shape (m+1)^2 x k.
    Eigen::MatrixXd apply(const Eigen::MatrixXd& rhs) const;

    SpherePoint x_;
    int m_;
    Eigen::VectorXd weights_;
    Eigen::VectorXd sqrt_weights_;
    Eigen::VectorXd scaling_;  // D
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_;
    Eigen::MatrixXd thin_q_;
    double condition_ = 1.0;
};

Eigen::VectorXd gmls_shape_functions(const SpherePoint& x, const Neighborhood& nbhd,
                                     const PointSet& ps, int m);

/// |I| x 3 matrix; column c holds the (∇0)_c shape functions.
Eigen::MatrixX3d gmls_gradient_shape_functions(const SpherePoint& x, const Neighborhood& nbhd,
                                               const PointSet& ps, int m);

StencilRow gmls_advection_row(const SpherePoint& x, const Neighborhood& nbhd, const PointSet& ps,
                              int m, double condition_cap = kDefaultConditionCap);

}  // namespace sphtrans

#endif  // SPHTRANS_GMLS_HPP
