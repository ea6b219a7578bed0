#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "doctest.h"

#include "sphtrans/errors.hpp"
#include "sphtrans/harmonics.hpp"
#include "sphtrans/mkls.hpp"
#include "support.hpp"

using namespace sphtrans;
using std::numbers::pi;

namespace {

const PointSet& nodes1600() {
    static const PointSet ps = generate_phyllotaxis(1600);
    return ps;
}

}  // namespace

TEST_CASE("gaussian correlation") {
    CHECK(gaussian_correlation(0.0, 3.0) == 1.0);
    CHECK(gaussian_correlation(1.0, 1.0) == doctest::Approx(std::exp(-1.0)));
    CHECK_THROWS_AS(gaussian_correlation(1.0, 0.0), DomainError);
    CHECK_THROWS_AS(gaussian_correlation(1.0, -2.0), DomainError);
}

TEST_CASE("MKLS Kronecker delta at stencil nodes") {
    const PointSet& ps = nodes1600();
    const double h = ps.fill_distance();
    const CapSearch search(ps, 12 * h);
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<Index> pick(0, ps.size() - 1);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const Neighborhood nb = search.query(pick(rng));
        for (std::size_t i = 0; i < nb.indices.size(); ++i) {
            const Eigen::VectorXd a = mkls_shape_functions(ps[nb.indices[i]], nb, ps, 3, 20 / h);
            Eigen::VectorXd e = Eigen::VectorXd::Zero(a.size());
            e(static_cast<Eigen::Index>(i)) = 1.0;
            worst = std::max(worst, (a - e).cwiseAbs().maxCoeff());
        }
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("MKLS matches a dense evaluation of the kriging formula") {
    // Oracle: explicit inverses of R and P^T R^-1 P in long double.
    const PointSet& ps = nodes1600();
    const double h = ps.fill_distance();
    const double c = 20 / h;
    const int m = 2;
    const CapSearch search(ps, 12 * h);
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 10; ++trial) {
        const SpherePoint x = SpherePoint::from_xyz(testing::random_unit(rng));
        const Neighborhood nb = search.query(x.xyz);
        const auto n = static_cast<Eigen::Index>(nb.indices.size());
        using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
        MatL r(n, n), p(n, basis_dim(m));
        Eigen::Matrix<long double, Eigen::Dynamic, 1> rx(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const Vec3& xi = ps[nb.indices[i]].xyz;
            p.row(i) = eval_basis<double>(xi, m).cast<long double>().transpose();
            rx(i) = std::exp(-static_cast<long double>(c) * std::pow(static_cast<long double>(chordal_distance(x.xyz, xi)), 2));
            for (Eigen::Index j = 0; j < n; ++j) {
                const long double d = chordal_distance(xi, ps[nb.indices[j]].xyz);
                r(i, j) = std::exp(-static_cast<long double>(c) * d * d);
            }
        }
        const MatL rinv = r.fullPivLu().inverse();
        const MatL a_mat = (p.transpose() * rinv * p).fullPivLu().inverse() * p.transpose() * rinv;
        const MatL yx = eval_basis<double>(x.xyz, m).cast<long double>().transpose();
        const MatL oracle = yx * a_mat + rx.transpose() * rinv * (MatL::Identity(n, n) - p * a_mat);

        const Eigen::VectorXd got = mkls_shape_functions(x, nb, ps, m, c);
        CHECK((got - oracle.transpose().cast<double>()).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("MKLS reproduces degree-1 data and annihilates constants") {
    const PointSet& ps = nodes1600();
    const double h = ps.fill_distance();
    const CapSearch search(ps, 12 * h);
    std::mt19937_64 rng(33);
    const double c1 = std::sqrt(3 / (4 * pi));
    for (auto dist : {CorrelationDistance::Chordal, CorrelationDistance::Geodesic}) {
        for (int trial = 0; trial < 30; ++trial) {
            const SpherePoint x = SpherePoint::from_xyz(testing::random_unit_away_from_poles(rng));
            const Neighborhood nb = search.query(x.xyz);
            const MklsStencil st(x, nb, ps, 3, 20 / h, dist);
            const Eigen::VectorXd a = st.shape_functions();
            Eigen::VectorXd ux(a.size()), uz(a.size());
            for (std::size_t j = 0; j < nb.indices.size(); ++j) {
                ux(static_cast<Eigen::Index>(j)) = c1 * ps[nb.indices[j]].xyz.x();
                uz(static_cast<Eigen::Index>(j)) = c1 * ps[nb.indices[j]].xyz.z();
            }
            CHECK(std::abs(a.dot(ux) - c1 * x.xyz.x()) < 1e-7);
            CHECK(std::abs(a.dot(uz) - c1 * x.xyz.z()) < 1e-7);

            const StencilRow row = mkls_advection_row(x, nb, ps, 3, 20 / h, dist);
            CHECK(std::abs(row.g_lambda.sum()) < 1e-8);
            CHECK(std::abs(row.g_theta.sum()) < 1e-8);
            CHECK(std::abs(row.g_lambda.dot(ux) + c1 * std::sin(x.lambda)) < 1e-5);
            CHECK(std::abs(row.g_theta.dot(ux) + c1 * std::cos(x.lambda) * std::sin(x.theta)) < 1e-5);
            CHECK(std::abs(row.g_lambda.dot(uz)) < 1e-5);
            CHECK(std::abs(row.g_theta.dot(uz) - c1 * std::cos(x.theta)) < 1e-5);
        }
    }
}

TEST_CASE("MKLS gradient agrees with finite differences of the shape functions") {
    const PointSet& ps = nodes1600();
    const double h = ps.fill_distance();
    const CapSearch search(ps, 12 * h);
    std::mt19937_64 rng(34);
    for (auto dist : {CorrelationDistance::Chordal, CorrelationDistance::Geodesic}) {
        const Vec3 p = testing::random_unit(rng);
        const Neighborhood nb = search.query(p);
        const Eigen::MatrixX3d g = MklsStencil(SpherePoint::from_xyz(p), nb, ps, 3, 20 / h, dist)
                                       .gradient_shape_functions();
        const auto [t1, t2] = testing::tangent_frame(p);
        const double step = 1e-6;
        for (const Vec3& t : {t1, t2}) {
            const Vec3 fwd = std::cos(step) * p + std::sin(step) * t;
            const Vec3 bwd = std::cos(step) * p - std::sin(step) * t;
            const Eigen::VectorXd fd =
                (MklsStencil(SpherePoint::from_xyz(fwd), nb, ps, 3, 20 / h, dist).shape_functions() -
                 MklsStencil(SpherePoint::from_xyz(bwd), nb, ps, 3, 20 / h, dist).shape_functions()) /
                (2 * step);
            CHECK((fd - g * t).cwiseAbs().maxCoeff() < 1e-5 * std::max(1.0, fd.cwiseAbs().maxCoeff()));
        }
    }
}

TEST_CASE("MKLS failures") {
    const PointSet& ps = nodes1600();
    const double h = ps.fill_distance();
    const Neighborhood nb = cap_neighbors(ps, 3, 12 * h);
    CHECK_THROWS_AS(MklsStencil(ps[3], nb, ps, 3, 0.0), DomainError);
    CHECK_THROWS_AS(MklsStencil(ps[3], cap_neighbors(ps, 3, 1e-4), ps, 3, 20 / h), StencilError);
    // A nearly flat correlation makes R numerically singular.
    try {
        MklsStencil(ps[3], nb, ps, 3, 1e-3);
        FAIL("expected ConditioningError");
    } catch (const ConditioningError& e) {
        CHECK(std::string(e.what()).find("increase c") != std::string::npos);
    }
}
