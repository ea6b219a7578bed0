#ifndef SPHTRANS_GEOMETRY_HPP
#define SPHTRANS_GEOMETRY_HPP

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace sphtrans {

using Vec3 = Eigen::Vector3d;
using Index = std::size_t;

/// Unit vector (λ, θ) = (longitude, latitude) <-> x = cos λ cos θ, y = sin λ cos θ, z = sin θ.
Vec3 spherical_to_cartesian(double lambda, double theta);

struct LonLat {
    double lambda;
    double theta;
};

/// Inverse of spherical_to_cartesian. λ = 0 at the poles; λ = π (not −π) on the
/// negative-x branch cut.
LonLat cartesian_to_spherical(const Vec3& p);

/// A point on S² carried in both Cartesian and longitude/latitude form.
struct SpherePoint {
    Vec3 xyz;
    double lambda = 0.0;
    double theta = 0.0;

    SpherePoint() : xyz(1.0, 0.0, 0.0) {}

    static SpherePoint from_lonlat(double lambda, double theta);
    /// `p` must be unit length within 1e-9.
    static SpherePoint from_xyz(const Vec3& p);
};

double geodesic_distance(const Vec3& p, const Vec3& q);
inline double geodesic_distance(const SpherePoint& p, const SpherePoint& q) {
    return geodesic_distance(p.xyz, q.xyz);
}

double chordal_distance(const Vec3& p, const Vec3& q);
inline double chordal_distance(const SpherePoint& p, const SpherePoint& q) {
    return chordal_distance(p.xyz, q.xyz);
}

/// Immutable ordered point set.
class PointSet {
public:
    PointSet() = default;
    PointSet(std::vector<SpherePoint> points, std::string label);

    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }
    const SpherePoint& operator[](Index i) const { return points_[i]; }
    const std::vector<SpherePoint>& points() const { return points_; }
    const std::string& label() const { return label_; }

    /// h = N^(-1/2).
    double fill_distance() const;

private:
    std::vector<SpherePoint> points_;
    std::string label_;
};

/// Phyllotaxis (Fibonacci) spiral with n >= 4 points.
PointSet generate_phyllotaxis(std::size_t n);

enum class PointFormat { PlainXyz, PlainLonLat };

PointSet load_point_set(const std::string& path, PointFormat format);
void save_point_set(const PointSet& ps, const std::string& path, PointFormat format);

inline constexpr Index kNoCenter = std::numeric_limits<Index>::max();

/// Node indices inside an open geodesic cap. `center_index` is kNoCenter when the
/// cap is centered at an arbitrary (non-node) point.
struct Neighborhood {
    Index center_index = kNoCenter;
    std::vector<Index> indices;
    double delta = 0.0;
};

/// Bucketed lookup of nodes within geodesic distance < delta of a query point.
/// Candidate cells are selected by chordal radius; membership is decided by the
/// same geodesic_distance comparison a linear scan would use.
class CapSearch {
public:
    CapSearch(const PointSet& ps, double delta);

    double delta() const { return delta_; }
    Neighborhood query(Index center_index) const;
    Neighborhood query(const Vec3& x) const;

private:
    void collect(const Vec3& x, std::vector<Index>& out) const;

    const PointSet* ps_;
    double delta_;
    bool everything_;
    double chord_;
    int dims_ = 1;
    double cell_ = 2.0;
    std::vector<std::size_t> cell_start_;
    std::vector<Index> sorted_;
};

/// Single cap query. Builds a CapSearch; prefer CapSearch for repeated queries.
Neighborhood cap_neighbors(const PointSet& ps, Index center_index, double delta);

/// O(N) reference scan.
Neighborhood cap_neighbors_brute_force(const PointSet& ps, const Vec3& x, double delta);

/// Geodesic distance from each node to its nearest other node, O(N log N)-ish
/// via CapSearch with a growing radius.
std::vector<double> nearest_neighbor_distances(const PointSet& ps);

}  // namespace sphtrans

#endif  // SPHTRANS_GEOMETRY_HPP
