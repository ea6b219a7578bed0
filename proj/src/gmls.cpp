#include "sphtrans/gmls.hpp"

#include <cmath>
#include <limits>

#include "sphtrans/errors.hpp"
#include "sphtrans/harmonics.hpp"

namespace sphtrans {

GmlsStencil::GmlsStencil(const SpherePoint& x, const Neighborhood& nbhd, const PointSet& ps, int m,
                         double condition_cap)
    : x_(x), m_(m) {
    const auto n = static_cast<Eigen::Index>(nbhd.indices.size());
    const auto dim = static_cast<Eigen::Index>(basis_dim(m));
    if (n < dim) throw StencilError(nbhd.center_index, nbhd.indices.size(), basis_dim(m));

    weights_.resize(n);
    Eigen::MatrixXd weighted(n, dim);  // W^{1/2} P
    for (Eigen::Index j = 0; j < n; ++j) {
        const Vec3& xj = ps[nbhd.indices[j]].xyz;
        weights_(j) = wendland_weight(geodesic_distance(x.xyz, xj) / nbhd.delta);
        weighted.row(j) = std::sqrt(weights_(j)) * eval_basis<double>(xj, m).transpose();
    }
    sqrt_weights_ = weights_.cwiseSqrt();

    scaling_.resize(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const double norm = weighted.col(i).norm();
        if (!(norm > 0.0)) {
            throw ConditioningError("GMLS basis column vanishes on the stencil",
                                    std::numeric_limits<double>::infinity());
        }
        scaling_(i) = 1.0 / norm;
    }
    weighted = weighted * scaling_.asDiagonal();

    qr_.compute(weighted);
    const auto& r = qr_.matrixQR();
    const double last = std::abs(r(dim - 1, dim - 1));
    condition_ = last > 0.0 ? std::abs(r(0, 0)) / last : std::numeric_limits<double>::infinity();
    if (!(condition_ <= condition_cap)) {
        throw ConditioningError("GMLS least-squares matrix is ill-conditioned", condition_);
    }
    thin_q_ = qr_.householderQ() * Eigen::MatrixXd::Identity(n, dim);
}

Eigen::MatrixXd GmlsStencil::apply(const Eigen::MatrixXd& rhs) const {
    const auto dim = thin_q_.cols();
    Eigen::MatrixXd z = qr_.colsPermutation().transpose() * (scaling_.asDiagonal() * rhs);
    qr_.matrixQR().topLeftCorner(dim, dim).triangularView<Eigen::Upper>().transpose().solveInPlace(z);
    return sqrt_weights_.asDiagonal() * (thin_q_ * z);
}

Eigen::VectorXd GmlsStencil::shape_functions() const {
    return apply(eval_basis<double>(x_.xyz, m_));
}

Eigen::MatrixX3d GmlsStencil::gradient_shape_functions() const {
    return apply(eval_surface_gradient_basis<double>(x_.xyz, m_));
}

Eigen::VectorXd gmls_shape_functions(const SpherePoint& x, const Neighborhood& nbhd,
                                     const PointSet& ps, int m) {
    return GmlsStencil(x, nbhd, ps, m).shape_functions();
}

Eigen::MatrixX3d gmls_gradient_shape_functions(const SpherePoint& x, const Neighborhood& nbhd,
                                               const PointSet& ps, int m) {
    return GmlsStencil(x, nbhd, ps, m).gradient_shape_functions();
}

StencilRow gmls_advection_row(const SpherePoint& x, const Neighborhood& nbhd, const PointSet& ps,
                              int m, double condition_cap) {
    const GmlsStencil stencil(x, nbhd, ps, m, condition_cap);
    StencilRow row;
    row.indices = nbhd.indices;
    row.a = stencil.shape_functions();
    chain_rule_rows(x, stencil.gradient_shape_functions(), row.g_lambda, row.g_theta);
    return row;
}

}  // namespace sphtrans
