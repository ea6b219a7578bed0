#ifndef SPHTRANS_TESTS_SUPPORT_HPP
#define SPHTRANS_TESTS_SUPPORT_HPP

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include <Eigen/Core>

#include "sphtrans/geometry.hpp"

namespace testing {

inline sphtrans::Vec3 random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    sphtrans::Vec3 v(g(rng), g(rng), g(rng));
    return v.normalized();
}

/// Random unit vector with |latitude| <= max_lat.
inline sphtrans::Vec3 random_unit_away_from_poles(std::mt19937_64& rng, double max_lat = 1.3) {
    for (;;) {
        const sphtrans::Vec3 v = random_unit(rng);
        if (std::abs(std::asin(v.z())) <= max_lat) return v;
    }
}

/// Orthonormal tangent pair at p.
inline std::pair<sphtrans::Vec3, sphtrans::Vec3> tangent_frame(const sphtrans::Vec3& p) {
    const sphtrans::Vec3 helper = std::abs(p.x()) < 0.9 ? sphtrans::Vec3::UnitX() : sphtrans::Vec3::UnitY();
    const sphtrans::Vec3 t1 = (helper - helper.dot(p) * p).normalized();
    return {t1, p.cross(t1)};
}

inline std::string temp_path(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "sphtrans_tests";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

}  // namespace testing

#endif
