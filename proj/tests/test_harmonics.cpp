#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "sphtrans/harmonics.hpp"
#include "support.hpp"

using namespace sphtrans;
using std::numbers::pi;

namespace {

// Real orthonormal harmonics up to degree 3 written out as polynomials in
// (x, y, z); index l*l + l + k, k > 0 cosine-type, k < 0 sine-type.
Eigen::VectorXd table_up_to_3(const Vec3& p) {
    const double x = p.x(), y = p.y(), z = p.z();
    Eigen::VectorXd v(16);
    v(0) = 0.5 * std::sqrt(1 / pi);
    v(1) = std::sqrt(3 / (4 * pi)) * y;
    v(2) = std::sqrt(3 / (4 * pi)) * z;
    v(3) = std::sqrt(3 / (4 * pi)) * x;
    v(4) = 0.5 * std::sqrt(15 / pi) * x * y;
    v(5) = 0.5 * std::sqrt(15 / pi) * y * z;
    v(6) = 0.25 * std::sqrt(5 / pi) * (3 * z * z - 1);
    v(7) = 0.5 * std::sqrt(15 / pi) * x * z;
    v(8) = 0.25 * std::sqrt(15 / pi) * (x * x - y * y);
    v(9) = 0.25 * std::sqrt(35 / (2 * pi)) * y * (3 * x * x - y * y);
    v(10) = 0.5 * std::sqrt(105 / pi) * x * y * z;
    v(11) = 0.25 * std::sqrt(21 / (2 * pi)) * y * (5 * z * z - 1);
    v(12) = 0.25 * std::sqrt(7 / pi) * (5 * z * z * z - 3 * z);
    v(13) = 0.25 * std::sqrt(21 / (2 * pi)) * x * (5 * z * z - 1);
    v(14) = 0.25 * std::sqrt(105 / pi) * z * (x * x - y * y);
    v(15) = 0.25 * std::sqrt(35 / (2 * pi)) * x * (x * x - 3 * y * y);
    return v;
}

}  // namespace

TEST_CASE("basis dimension") {
    CHECK(basis_dim(0) == 1);
    CHECK(basis_dim(1) == 4);
    CHECK(basis_dim(3) == 16);
    CHECK(harmonic_index(2, -2) == 4);
}

TEST_CASE("eval_basis special values") {
    std::mt19937_64 rng(1);
    const auto y0 = eval_basis<double>(testing::random_unit(rng), 0);
    REQUIRE(y0.size() == 1);
    CHECK(y0(0) == doctest::Approx(0.28209479177387814));

    const auto pole = eval_basis<double>(Vec3(0, 0, 1), 1);
    CHECK(pole(harmonic_index(1, 0)) == doctest::Approx(std::sqrt(3 / (4 * pi))));
    CHECK(std::abs(pole(harmonic_index(1, -1))) < 1e-15);
    CHECK(std::abs(pole(harmonic_index(1, 1))) < 1e-15);
}

TEST_CASE("eval_basis matches the polynomial table") {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 200; ++i) {
        const Vec3 p = testing::random_unit(rng);
        CHECK((eval_basis<double>(p, 3) - table_up_to_3(p)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("eval_basis is orthonormal under quadrature") {
    // Equal-weight quadrature on a dense phyllotaxis set.
    const PointSet ps = generate_phyllotaxis(20000);
    const int m = 4;
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(basis_dim(m), basis_dim(m));
    for (Index i = 0; i < ps.size(); ++i) {
        const auto y = eval_basis<double>(ps[i].xyz, m);
        gram += y * y.transpose();
    }
    gram *= 4 * pi / static_cast<double>(ps.size());
    CHECK((gram - Eigen::MatrixXd::Identity(basis_dim(m), basis_dim(m))).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("surface gradient") {
    std::mt19937_64 rng(3);
    const auto g0 = eval_surface_gradient_basis<double>(testing::random_unit(rng), 0);
    CHECK(g0.cwiseAbs().maxCoeff() == 0.0);

    const auto gz = eval_surface_gradient_basis<double>(Vec3(1, 0, 0), 1);
    const Eigen::RowVector3d row = gz.row(harmonic_index(1, 0));
    CHECK(std::abs(row(0)) < 1e-15);
    CHECK(std::abs(row(1)) < 1e-15);
    CHECK(row(2) == doctest::Approx(std::sqrt(3 / (4 * pi))));

    for (int trial = 0; trial < 100; ++trial) {
        const Vec3 p = testing::random_unit(rng);
        const int m = 5;
        const auto grad = eval_surface_gradient_basis<double>(p, m);
        CHECK((grad * p).cwiseAbs().maxCoeff() < 1e-12);
        const auto [t1, t2] = testing::tangent_frame(p);
        const double h = 1e-5;
        for (const Vec3& t : {t1, t2}) {
            // Central difference along the great circle through p with direction t.
            const Vec3 fwd = std::cos(h) * p + std::sin(h) * t;
            const Vec3 bwd = std::cos(h) * p - std::sin(h) * t;
            const Eigen::VectorXd fd = (eval_basis<double>(fwd, m) - eval_basis<double>(bwd, m)) / (2 * h);
            CHECK((fd - grad * t).cwiseAbs().maxCoeff() < 1e-6);
        }
    }
}

TEST_CASE("eval_basis in long double agrees with double") {
    std::mt19937_64 rng(4);
    const Vec3 p = testing::random_unit(rng);
    const Eigen::Matrix<long double, 3, 1> pl = p.cast<long double>();
    const auto yl = eval_basis<long double>(pl, 6);
    const auto yd = eval_basis<double>(p, 6);
    CHECK((yl.cast<double>() - yd).cwiseAbs().maxCoeff() < 1e-13);
}
