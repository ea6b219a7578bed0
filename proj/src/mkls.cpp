#include "sphtrans/mkls.hpp"

#include <cmath>
#include <limits>

#include "sphtrans/errors.hpp"
#include "sphtrans/harmonics.hpp"

namespace sphtrans {

double gaussian_correlation(double d, double c) {
    if (!(c > 0.0)) throw DomainError("correlation parameter c must be positive");
    return std::exp(-c * d * d);
}

namespace {

double correlation_distance(const Vec3& p, const Vec3& q, CorrelationDistance kind) {
    return kind == CorrelationDistance::Chordal ? chordal_distance(p, q) : geodesic_distance(p, q);
}

// d / sin(d), with the series near 0.
double arc_over_sine(double d) {
    if (d < 1e-4) return 1.0 + d * d / 6.0;
    return d / std::sin(d);
}

}  // namespace

MklsStencil::MklsStencil(const SpherePoint& x, const Neighborhood& nbhd, const PointSet& ps, int m,
                         double c, CorrelationDistance distance, double condition_cap)
    : x_(x), m_(m), c_(c), distance_(distance) {
    if (!(c > 0.0)) throw DomainError("correlation parameter c must be positive");
    const auto n = static_cast<Eigen::Index>(nbhd.indices.size());
    const auto dim = static_cast<Eigen::Index>(basis_dim(m));
    if (n < dim) throw StencilError(nbhd.center_index, nbhd.indices.size(), basis_dim(m));

    nodes_.reserve(n);
    Eigen::MatrixXd basis(n, dim);
    for (Eigen::Index j = 0; j < n; ++j) {
        nodes_.push_back(ps[nbhd.indices[j]].xyz);
        basis.row(j) = eval_basis<double>(nodes_.back(), m).transpose();
    }

    Eigen::MatrixXd corr(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        corr(i, i) = 1.0;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double d = correlation_distance(nodes_[i], nodes_[j], distance);
            corr(i, j) = corr(j, i) = gaussian_correlation(d, c);
        }
    }
    r_llt_.compute(corr);
    if (r_llt_.info() != Eigen::Success) {
        corr.diagonal().array() += 1e-12 * corr.trace() / static_cast<double>(n);
        r_llt_.compute(corr);
        if (r_llt_.info() != Eigen::Success) {
            throw ConditioningError(
                "MKLS correlation matrix is not positive definite; increase c or reduce delta",
                std::numeric_limits<double>::infinity());
        }
    }
    r_condition_ = 1.0 / r_llt_.rcond();
    if (!(r_condition_ <= condition_cap)) {
        throw ConditioningError(
            "MKLS correlation matrix is ill-conditioned; increase c or reduce delta", r_condition_);
    }

    whitened_p_ = r_llt_.matrixL().solve(basis);
    scaling_.resize(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const double norm = whitened_p_.col(i).norm();
        if (!(norm > 0.0)) {
            throw ConditioningError("MKLS basis column vanishes on the stencil",
                                    std::numeric_limits<double>::infinity());
        }
        scaling_(i) = 1.0 / norm;
    }
    qr_.compute(whitened_p_ * scaling_.asDiagonal());
    const auto& t = qr_.matrixQR();
    const double last = std::abs(t(dim - 1, dim - 1));
    trend_condition_ = last > 0.0 ? std::abs(t(0, 0)) / last : std::numeric_limits<double>::infinity();
    if (!(trend_condition_ <= condition_cap)) {
        throw ConditioningError("MKLS trend least-squares matrix is ill-conditioned",
                                trend_condition_);
    }
    thin_q_ = qr_.householderQ() * Eigen::MatrixXd::Identity(n, dim);
}

Eigen::MatrixXd MklsStencil::combine(const Eigen::MatrixXd& basis_part,
                                     const Eigen::MatrixXd& corr_part) const {
    const auto dim = thin_q_.cols();
    const Eigen::MatrixXd rho = r_llt_.matrixL().solve(corr_part);
    Eigen::MatrixXd z = qr_.colsPermutation().transpose() *
                        (scaling_.asDiagonal() * (basis_part - whitened_p_.transpose() * rho));
    qr_.matrixQR().topLeftCorner(dim, dim).triangularView<Eigen::Upper>().transpose().solveInPlace(z);
    return r_llt_.matrixU().solve(Eigen::MatrixXd(rho + thin_q_ * z));
}

Eigen::VectorXd MklsStencil::shape_functions() const {
    const auto n = static_cast<Eigen::Index>(nodes_.size());
    Eigen::VectorXd r(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        r(j) = gaussian_correlation(correlation_distance(x_.xyz, nodes_[j], distance_), c_);
    }
    return combine(eval_basis<double>(x_.xyz, m_), r);
}

Eigen::MatrixX3d MklsStencil::gradient_shape_functions() const {
    const auto n = static_cast<Eigen::Index>(nodes_.size());
    const Eigen::Matrix3d tangent = Eigen::Matrix3d::Identity() - x_.xyz * x_.xyz.transpose();
    Eigen::MatrixXd grad_r(n, 3);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double d = correlation_distance(x_.xyz, nodes_[j], distance_);
        double factor = 2.0 * c_ * gaussian_correlation(d, c_);
        if (distance_ == CorrelationDistance::Geodesic) factor *= arc_over_sine(d);
        grad_r.row(j) = factor * (tangent * nodes_[j]).transpose();
    }
    return combine(eval_surface_gradient_basis<double>(x_.xyz, m_), grad_r);
}

Eigen::VectorXd mkls_shape_functions(const SpherePoint& x, const Neighborhood& nbhd,
                                     const PointSet& ps, int m, double c,
                                     CorrelationDistance distance) {
    return MklsStencil(x, nbhd, ps, m, c, distance).shape_functions();
}

StencilRow mkls_advection_row(const SpherePoint& x, const Neighborhood& nbhd, const PointSet& ps,
                              int m, double c, CorrelationDistance distance, double condition_cap) {
    const MklsStencil stencil(x, nbhd, ps, m, c, distance, condition_cap);
    StencilRow row;
    row.indices = nbhd.indices;
    row.a = stencil.shape_functions();
    chain_rule_rows(x, stencil.gradient_shape_functions(), row.g_lambda, row.g_theta);
    return row;
}

}  // namespace sphtrans
