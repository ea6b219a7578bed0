#ifndef SPHTRANS_STENCIL_HPP
#define SPHTRANS_STENCIL_HPP

#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "sphtrans/geometry.hpp"

namespace sphtrans {

/// Shape-function values and advection-derivative rows at one evaluation point.
///
/// g_lambda holds (1/cos θ) ∂a_j/∂λ with the cos θ factor cancelled analytically,
/// g_theta holds ∂a_j/∂θ. All three vectors are aligned with `indices`.
struct StencilRow {
    std::vector<Index> indices;
    Eigen::VectorXd a;
    Eigen::VectorXd g_lambda;
    Eigen::VectorXd g_theta;
};

/// Combine Cartesian surface-gradient rows (|I| x 3) into the longitude/latitude
/// advection rows at x.
inline void chain_rule_rows(const SpherePoint& x, const Eigen::MatrixX3d& surface_grad,
                            Eigen::VectorXd& g_lambda, Eigen::VectorXd& g_theta) {
    const double sl = std::sin(x.lambda), cl = std::cos(x.lambda);
    const double st = std::sin(x.theta), ct = std::cos(x.theta);
    g_lambda = -sl * surface_grad.col(0) + cl * surface_grad.col(1);
    g_theta = -cl * st * surface_grad.col(0) - sl * st * surface_grad.col(1) +
              ct * surface_grad.col(2);
}

inline constexpr double kDefaultConditionCap = 1e12;

}  // namespace sphtrans

#endif  // SPHTRANS_STENCIL_HPP
