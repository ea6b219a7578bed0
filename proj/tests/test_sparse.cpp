#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "doctest.h"

#include "sphtrans/errors.hpp"
#include "sphtrans/sparse.hpp"
#include "support.hpp"

using namespace sphtrans;

namespace {

SparseMatrix tridiagonal(int n, double lo, double diag, double up) {
    std::vector<Triplet> t;
    for (int i = 0; i < n; ++i) {
        t.emplace_back(i, i, diag + 0.1 * i);
        if (i > 0) t.emplace_back(i, i - 1, lo);
        if (i + 1 < n) t.emplace_back(i, i + 1, up);
    }
    return csr_from_triplets(n, n, t);
}

SparseMatrix random_dominant(int n, double density, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1, 1), coin(0, 1);
    std::vector<Triplet> t;
    Eigen::VectorXd row_sum = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j && coin(rng) < density) {
                const double v = u(rng);
                t.emplace_back(i, j, v);
                row_sum(i) += std::abs(v);
            }
        }
    }
    for (int i = 0; i < n; ++i) t.emplace_back(i, i, row_sum(i) + 1.0);
    return csr_from_triplets(n, n, t);
}

}  // namespace

TEST_CASE("csr assembly") {
    const SparseMatrix empty = csr_from_triplets(3, 3, {});
    CHECK(empty.nonZeros() == 0);
    CHECK(Eigen::MatrixXd(empty).isZero());

    const SparseMatrix dup = csr_from_triplets(2, 2, {{0, 0, 1.0}, {0, 0, 2.0}});
    CHECK(dup.nonZeros() == 1);
    CHECK(dup.coeff(0, 0) == 3.0);

    const SparseMatrix eye = csr_from_triplets(2, 2, {{0, 0, 1.0}, {1, 1, 1.0}});
    CHECK(spmv(eye, Eigen::Vector2d(3, 4)) == Eigen::VectorXd(Eigen::Vector2d(3, 4)));

    CHECK_THROWS_AS(csr_from_triplets(2, 2, {{2, 0, 1.0}}), DomainError);
    CHECK_THROWS_AS(spmv(eye, Eigen::VectorXd::Ones(3)), DomainError);
}

TEST_CASE("spmv matches dense multiplication") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-1, 1), coin(0, 1);
    std::vector<Triplet> t;
    for (int i = 0; i < 50; ++i) {
        for (int j = 0; j < 50; ++j) {
            if (coin(rng) < 0.1) t.emplace_back(i, j, u(rng));
        }
    }
    const SparseMatrix a = csr_from_triplets(50, 50, t);
    const Eigen::VectorXd x = Eigen::VectorXd::Random(50);
    CHECK((spmv(a, x) - Eigen::MatrixXd(a) * x).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(spmv(csr_from_triplets(50, 50, {}), x).isZero());
}

TEST_CASE("ILU(0) factors") {
    SUBCASE("diagonal") {
        const SparseMatrix d = csr_from_triplets(3, 3, {{0, 0, 2.0}, {1, 1, 4.0}, {2, 2, 8.0}});
        const Ilu0 f(d);
        CHECK((Eigen::MatrixXd(f.factors()) - Eigen::MatrixXd(d)).isZero());
        CHECK(f.apply(Eigen::Vector3d(2, 4, 8)).isApprox(Eigen::VectorXd::Ones(3)));
        const Ilu0 eye(csr_from_triplets(3, 3, {{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}}));
        CHECK(eye.apply(Eigen::Vector3d(1, 2, 3)) == Eigen::VectorXd(Eigen::Vector3d(1, 2, 3)));
    }
    SUBCASE("lower triangular solves exactly") {
        std::vector<Triplet> t;
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j <= i; ++j) t.emplace_back(i, j, i == j ? 2.0 + i : 0.3 * (i - j));
        }
        const SparseMatrix l = csr_from_triplets(6, 6, t);
        const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(6, 1, 6);
        const Eigen::VectorXd x = Ilu0(l).apply(b);
        CHECK((Eigen::MatrixXd(l) * x - b).cwiseAbs().maxCoeff() < 1e-14);
    }
    SUBCASE("tridiagonal equals dense LU") {
        const SparseMatrix a = tridiagonal(10, -1.0, 4.0, -1.5);
        const Ilu0 f(a);
        // Doolittle LU without pivoting; a tridiagonal matrix has no fill.
        Eigen::MatrixXd lu = Eigen::MatrixXd(a);
        for (int k = 0; k < 10; ++k) {
            for (int i = k + 1; i < 10; ++i) {
                lu(i, k) /= lu(k, k);
                for (int j = k + 1; j < 10; ++j) lu(i, j) -= lu(i, k) * lu(k, j);
            }
        }
        const Eigen::MatrixXd got = Eigen::MatrixXd(f.factors());
        for (int i = 0; i < 10; ++i) {
            for (int j = std::max(0, i - 1); j <= std::min(9, i + 1); ++j) {
                CHECK(std::abs(got(i, j) - lu(i, j)) < 1e-12);
            }
        }
        const Eigen::VectorXd r = Eigen::VectorXd::Random(10);
        CHECK((f.apply(r) - Eigen::MatrixXd(a).lu().solve(r)).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("failures") {
        CHECK_THROWS_AS(Ilu0(csr_from_triplets(2, 2, {{0, 0, 1.0}, {1, 0, 1.0}})), FactorizationError);
        try {
            Ilu0(csr_from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 1.0}}));
            FAIL("expected FactorizationError");
        } catch (const FactorizationError& e) {
            CHECK(e.row() == 1);
        }
    }
}

TEST_CASE("BiCGSTAB") {
    std::mt19937_64 rng(42);
    SUBCASE("identity") {
        std::vector<Triplet> t;
        for (int i = 0; i < 5; ++i) t.emplace_back(i, i, 1.0);
        const SparseMatrix eye = csr_from_triplets(5, 5, t);
        const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(5, 1, 5);
        const SolveResult r = bicgstab(eye, b, Eigen::VectorXd::Zero(5), nullptr);
        CHECK(r.report.converged);
        CHECK(r.report.iterations <= 1);
        CHECK((r.x - b).cwiseAbs().maxCoeff() < 1e-14);
    }
    SUBCASE("zero right-hand side") {
        const SparseMatrix a = tridiagonal(8, 1, 4, 1);
        const SolveResult r = bicgstab(a, Eigen::VectorXd::Zero(8), Eigen::VectorXd::Ones(8), nullptr);
        CHECK(r.report.converged);
        CHECK(r.report.iterations == 0);
        CHECK(r.x.isZero());
    }
    SUBCASE("diagonally dominant with ILU(0)") {
        const SparseMatrix a = random_dominant(100, 0.05, rng);
        const Eigen::VectorXd b = Eigen::VectorXd::Random(100);
        const Ilu0 ilu(a);
        const SolveResult r = bicgstab(a, b, Eigen::VectorXd::Zero(100), &ilu, {1e-10, 1000});
        REQUIRE(r.report.converged);
        CHECK((b - a * r.x).norm() / b.norm() <= 1e-10);
        CHECK(r.report.final_relative_residual <= 1e-10);
        CHECK((r.x - Eigen::MatrixXd(a).partialPivLu().solve(b)).cwiseAbs().maxCoeff() < 1e-8);

        const SolveResult plain = bicgstab(a, b, Eigen::VectorXd::Zero(100), nullptr, {1e-10, 1000});
        CHECK(plain.report.converged);
        CHECK(plain.report.iterations >= r.report.iterations);
    }
    SUBCASE("iteration limit reports non-convergence") {
        const SparseMatrix a = random_dominant(200, 0.05, rng);
        const Eigen::VectorXd b = Eigen::VectorXd::Random(200);
        const SolveResult r = bicgstab(a, b, Eigen::VectorXd::Zero(200), nullptr, {1e-14, 1});
        CHECK_FALSE(r.report.converged);
        CHECK(r.report.iterations == 1);
    }
}

TEST_CASE("MatrixMarket round trip") {
    std::mt19937_64 rng(43);
    const SparseMatrix a = random_dominant(30, 0.2, rng);
    const std::string path = testing::temp_path("a.mtx");
    write_matrix_market(a, path);
    const SparseMatrix b = read_matrix_market(path);
    CHECK(b.rows() == 30);
    CHECK(b.nonZeros() == a.nonZeros());
    CHECK((Eigen::MatrixXd(a) - Eigen::MatrixXd(b)).cwiseAbs().maxCoeff() == 0.0);
}
