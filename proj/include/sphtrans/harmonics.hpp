#ifndef SPHTRANS_HARMONICS_HPP
#define SPHTRANS_HARMONICS_HPP

// Real orthonormal spherical harmonics of degree <= m and their surface
// gradients.
//
// Ordering: index(l, k) = l*l + l + k for l = 0..m, k = -l..l.
// k > 0 uses cos(k*lambda), k < 0 uses sin(|k|*lambda), no Condon-Shortley phase.
//
// Each harmonic is evaluated through the polynomial extension
//     Y_l^k(x, y, z) = c * qbar_l^|k|(z) * {Re, Im}((x + i y)^|k|),
// where qbar_l^k is the k-th derivative of the Legendre polynomial P_l scaled by
// the orthonormalization constant. This form is smooth at the poles, so the
// surface gradient (I - p p^T) grad Y is obtained without 1/cos(theta) factors.

#include <cmath>
#include <cstddef>
#include <numbers>

#include <Eigen/Core>

namespace sphtrans {

inline constexpr std::size_t basis_dim(int m) {
    return static_cast<std::size_t>(m + 1) * static_cast<std::size_t>(m + 1);
}

inline constexpr std::size_t harmonic_index(int l, int k) {
    return static_cast<std::size_t>(l * l + l + k);
}

namespace detail {

/// qbar(l, k) for 0 <= k <= l <= m, packed as l*(l+1)/2 + k.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> normalized_legendre_derivatives(Scalar z, int m) {
    using std::sqrt;
    const auto packed = [](int l, int k) { return static_cast<Eigen::Index>(l * (l + 1) / 2 + k); };
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> q((m + 1) * (m + 2) / 2 + (m + 2));
    q.setZero();
    const Scalar four_pi = Scalar(4) * std::numbers::pi_v<Scalar>;
    Scalar diag = Scalar(1) / sqrt(four_pi);
    for (int k = 0; k <= m; ++k) {
        if (k > 0) diag *= sqrt(Scalar(2 * k + 1) / Scalar(2 * k));
        q(packed(k, k)) = diag;
        if (k + 1 <= m) q(packed(k + 1, k)) = sqrt(Scalar(2 * k + 3)) * z * diag;
        for (int l = k + 2; l <= m; ++l) {
            const Scalar a = sqrt(Scalar(4 * l * l - 1) / Scalar(l * l - k * k));
            const Scalar b =
                sqrt(Scalar((l - 1) * (l - 1) - k * k) / Scalar(4 * (l - 1) * (l - 1) - 1));
            q(packed(l, k)) = a * (z * q(packed(l - 1, k)) - b * q(packed(l - 2, k)));
        }
    }
    return q;
}

}  // namespace detail

/// Values of all (m+1)^2 harmonics at the unit vector p.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> eval_basis(const Eigen::Matrix<Scalar, 3, 1>& p, int m) {
    using std::sqrt;
    const Scalar x = p(0), y = p(1), z = p(2);
    const auto q = detail::normalized_legendre_derivatives<Scalar>(z, m);
    const Scalar root2 = sqrt(Scalar(2));

    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(basis_dim(m));
    Scalar c = 1, s = 0;  // Re, Im of (x + i y)^k
    for (int k = 0; k <= m; ++k) {
        if (k > 0) {
            const Scalar cn = c * x - s * y;
            s = c * y + s * x;
            c = cn;
        }
        for (int l = k; l <= m; ++l) {
            const Scalar ql = q(l * (l + 1) / 2 + k);
            if (k == 0) {
                out(harmonic_index(l, 0)) = ql;
            } else {
                out(harmonic_index(l, k)) = root2 * ql * c;
                out(harmonic_index(l, -k)) = root2 * ql * s;
            }
        }
    }
    return out;
}

/// Surface gradients: row i of the result holds the three Cartesian components of
/// the tangential gradient of harmonic i at p. Shape (m+1)^2 x 3.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 3> eval_surface_gradient_basis(
    const Eigen::Matrix<Scalar, 3, 1>& p, int m) {
    using std::sqrt;
    const Scalar x = p(0), y = p(1), z = p(2);
    const auto q = detail::normalized_legendre_derivatives<Scalar>(z, m);
    const auto qp = [&](int l, int k) { return q(l * (l + 1) / 2 + k); };
    // d/dz qbar_l^k = sqrt((l + k + 1)(l - k)) qbar_l^(k+1)
    const auto dq = [&](int l, int k) {
        return k >= l ? Scalar(0) : sqrt(Scalar((l + k + 1) * (l - k))) * qp(l, k + 1);
    };
    const Scalar root2 = sqrt(Scalar(2));

    Eigen::Matrix<Scalar, Eigen::Dynamic, 3> grad(basis_dim(m), 3);
    Scalar c = 1, s = 0;            // (x + i y)^k
    Scalar c_prev = 0, s_prev = 0;  // (x + i y)^(k-1)
    for (int k = 0; k <= m; ++k) {
        if (k > 0) {
            c_prev = c;
            s_prev = s;
            const Scalar cn = c * x - s * y;
            s = c * y + s * x;
            c = cn;
        }
        for (int l = k; l <= m; ++l) {
            const Scalar ql = qp(l, k);
            const Scalar dql = dq(l, k);
            if (k == 0) {
                grad.row(harmonic_index(l, 0)) << Scalar(0), Scalar(0), dql;
            } else {
                const Scalar kk = Scalar(k);
                // d/dx (x+iy)^k = k (x+iy)^(k-1),  d/dy (x+iy)^k = i k (x+iy)^(k-1)
                grad.row(harmonic_index(l, k)) << root2 * ql * kk * c_prev,
                    -root2 * ql * kk * s_prev, root2 * dql * c;
                grad.row(harmonic_index(l, -k)) << root2 * ql * kk * s_prev,
                    root2 * ql * kk * c_prev, root2 * dql * s;
            }
        }
    }
    // Project the ambient gradients onto the tangent plane at p.
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> normal_part = grad * p;
    grad -= normal_part * p.transpose();
    return grad;
}

}  // namespace sphtrans

#endif  // SPHTRANS_HARMONICS_HPP
