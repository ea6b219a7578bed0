#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "doctest.h"

#include "sphtrans/errors.hpp"
#include "sphtrans/geometry.hpp"
#include "support.hpp"

using namespace sphtrans;
using std::numbers::pi;

TEST_CASE("spherical_to_cartesian axis cases") {
    CHECK((spherical_to_cartesian(0, 0) - Vec3(1, 0, 0)).norm() < 1e-15);
    CHECK((spherical_to_cartesian(0, pi / 2) - Vec3(0, 0, 1)).norm() < 1e-15);
    CHECK((spherical_to_cartesian(pi / 2, 0) - Vec3(0, 1, 0)).norm() < 1e-15);
    CHECK_THROWS_AS(spherical_to_cartesian(0, 2.0), DomainError);
    CHECK_THROWS_AS(spherical_to_cartesian(4.0, 0), DomainError);
}

TEST_CASE("cartesian_to_spherical conventions") {
    auto ll = cartesian_to_spherical(Vec3(0, 0, 1));
    CHECK(ll.lambda == 0.0);
    CHECK(ll.theta == doctest::Approx(pi / 2));
    ll = cartesian_to_spherical(Vec3(1, 0, 0));
    CHECK(ll.lambda == 0.0);
    CHECK(ll.theta == 0.0);
    ll = cartesian_to_spherical(Vec3(-1, 0, 0));
    CHECK(ll.lambda == doctest::Approx(pi));
    CHECK_THROWS_AS(cartesian_to_spherical(Vec3(2, 0, 0)), DomainError);
}

TEST_CASE("round trip through both coordinate forms") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 1000; ++i) {
        const Vec3 p = testing::random_unit(rng);
        const SpherePoint sp = SpherePoint::from_xyz(p);
        CHECK((spherical_to_cartesian(sp.lambda, sp.theta) - p).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("distances") {
    const Vec3 a(1, 0, 0), b(0, 0, 1);
    CHECK(geodesic_distance(a, a) == 0.0);
    CHECK(geodesic_distance(a, -a) == doctest::Approx(pi));
    CHECK(geodesic_distance(a, b) == doctest::Approx(pi / 2));
    CHECK(chordal_distance(a, a) == 0.0);
    CHECK(chordal_distance(a, -a) == doctest::Approx(2.0));
    CHECK(chordal_distance(a, b) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("phyllotaxis point sets") {
    CHECK_THROWS_AS(generate_phyllotaxis(3), DomainError);
    const PointSet four = generate_phyllotaxis(4);
    REQUIRE(four.size() == 4);
    for (Index i = 0; i < 4; ++i) {
        CHECK(four[i].xyz.norm() == doctest::Approx(1.0).epsilon(1e-14));
        for (Index j = 0; j < i; ++j) CHECK(geodesic_distance(four[i], four[j]) > 0.1);
    }
    CHECK(generate_phyllotaxis(400).fill_distance() == doctest::Approx(0.05));

    // Brute-force nearest-neighbor scan.
    const PointSet ps = generate_phyllotaxis(2500);
    double min_d = 10.0;
    for (Index i = 0; i < ps.size(); ++i) {
        for (Index j = 0; j < i; ++j) min_d = std::min(min_d, geodesic_distance(ps[i], ps[j]));
    }
    CHECK(min_d > 0.5 / std::sqrt(2500.0));
    const auto nn = nearest_neighbor_distances(ps);
    CHECK(*std::min_element(nn.begin(), nn.end()) == doctest::Approx(min_d).epsilon(1e-14));
}

TEST_CASE("point file loading") {
    const std::string path = testing::temp_path("three.xyz");
    {
        std::ofstream out(path);
        out << "# axes\n1 0 0\n0 1 0\n\n0 0 1\n";
    }
    const PointSet ps = load_point_set(path, PointFormat::PlainXyz);
    CHECK(ps.size() == 3);
    CHECK(ps.label() == "three");

    const std::string empty = testing::temp_path("empty.xyz");
    { std::ofstream out(empty); }
    CHECK_THROWS_AS(load_point_set(empty, PointFormat::PlainXyz), FormatError);

    const std::string bad = testing::temp_path("bad.xyz");
    {
        std::ofstream out(bad);
        out << "1 0 0\n0 1 zero\n";
    }
    try {
        load_point_set(bad, PointFormat::PlainXyz);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(e.line() == 2);
    }

    const std::string off = testing::temp_path("off.xyz");
    {
        std::ofstream out(off);
        out << "1 0 0\n0 1.1 0\n";
    }
    CHECK_THROWS_AS(load_point_set(off, PointFormat::PlainXyz), DataError);

    const std::string saved = testing::temp_path("saved.lonlat");
    const PointSet gen = generate_phyllotaxis(50);
    save_point_set(gen, saved, PointFormat::PlainLonLat);
    const PointSet back = load_point_set(saved, PointFormat::PlainLonLat);
    REQUIRE(back.size() == 50);
    for (Index i = 0; i < 50; ++i) CHECK((back[i].xyz - gen[i].xyz).norm() < 1e-14);
}

TEST_CASE("cap_neighbors equals brute-force scan") {
    SUBCASE("whole sphere and tiny cap") {
        const PointSet ps = generate_phyllotaxis(300);
        CHECK(cap_neighbors(ps, 7, pi + 1e-9).indices.size() == 300);
        const Neighborhood tiny = cap_neighbors(ps, 7, 1e-6);
        REQUIRE(tiny.indices.size() == 1);
        CHECK(tiny.indices[0] == 7);
    }
    SUBCASE("N = 400, delta = 12 h") {
        const PointSet ps = generate_phyllotaxis(400);
        const double delta = 12.0 / 20.0;
        const CapSearch search(ps, delta);
        for (Index i = 0; i < ps.size(); ++i) {
            CHECK(search.query(i).indices == cap_neighbors_brute_force(ps, ps[i].xyz, delta).indices);
        }
    }
    SUBCASE("random sizes and radii") {
        std::mt19937_64 rng(5);
        std::uniform_int_distribution<int> sizes(10, 2000);
        std::uniform_real_distribution<double> radii(0.01, 1.5);
        for (int trial = 0; trial < 20; ++trial) {
            const PointSet ps = generate_phyllotaxis(static_cast<std::size_t>(sizes(rng)));
            const double delta = radii(rng);
            const CapSearch search(ps, delta);
            for (int q = 0; q < 25; ++q) {
                const Vec3 x = testing::random_unit(rng);
                CHECK(search.query(x).indices == cap_neighbors_brute_force(ps, x, delta).indices);
            }
        }
    }
}
