#include "sphtrans/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "sphtrans/errors.hpp"

namespace sphtrans {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAngleSlack = 1e-12;

void check_angles(double lambda, double theta) {
    if (!std::isfinite(lambda) || !std::isfinite(theta) || std::abs(lambda) > kPi + kAngleSlack ||
        std::abs(theta) > kPi / 2 + kAngleSlack) {
        std::ostringstream os;
        os << "angles out of range: lambda=" << lambda << ", theta=" << theta;
        throw DomainError(os.str());
    }
}

}  // namespace

Vec3 spherical_to_cartesian(double lambda, double theta) {
    check_angles(lambda, theta);
    const double ct = std::cos(theta);
    return {std::cos(lambda) * ct, std::sin(lambda) * ct, std::sin(theta)};
}

LonLat cartesian_to_spherical(const Vec3& p) {
    const double norm = p.norm();
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-9) {
        throw DomainError("cartesian_to_spherical: input is not a unit vector (norm " +
                          std::to_string(norm) + ")");
    }
    const double rho = std::hypot(p.x(), p.y());
    const double theta = std::atan2(p.z(), rho);
    double lambda = rho == 0.0 ? 0.0 : std::atan2(p.y(), p.x());
    if (lambda == -kPi) lambda = kPi;
    return {lambda, theta};
}

SpherePoint SpherePoint::from_lonlat(double lambda, double theta) {
    SpherePoint sp;
    sp.xyz = spherical_to_cartesian(lambda, theta);
    // Poles carry λ = 0 regardless of the longitude they were given with.
    sp.lambda = std::hypot(sp.xyz.x(), sp.xyz.y()) == 0.0 ? 0.0 : lambda;
    sp.theta = theta;
    return sp;
}

SpherePoint SpherePoint::from_xyz(const Vec3& p) {
    const LonLat ll = cartesian_to_spherical(p);
    SpherePoint sp;
    sp.xyz = p.normalized();
    sp.lambda = ll.lambda;
    sp.theta = ll.theta;
    return sp;
}

double geodesic_distance(const Vec3& p, const Vec3& q) {
    return std::atan2(p.cross(q).norm(), p.dot(q));
}

double chordal_distance(const Vec3& p, const Vec3& q) { return (p - q).norm(); }

PointSet::PointSet(std::vector<SpherePoint> points, std::string label)
    : points_(std::move(points)), label_(std::move(label)) {}

double PointSet::fill_distance() const {
    if (points_.empty()) throw DomainError("fill distance of an empty point set");
    return 1.0 / std::sqrt(static_cast<double>(points_.size()));
}

PointSet generate_phyllotaxis(std::size_t n) {
    if (n < 4) throw DomainError("phyllotaxis spiral needs n >= 4, got " + std::to_string(n));
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    const double nd = static_cast<double>(n);
    std::vector<SpherePoint> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double z = -1.0 + 2.0 * static_cast<double>(i) / (nd - 1.0);
        if (i == 0) z += 0.5 / nd;
        if (i == n - 1) z -= 0.5 / nd;
        const double lambda = std::remainder(static_cast<double>(i) * golden, 2.0 * kPi);
        pts.push_back(SpherePoint::from_lonlat(lambda, std::asin(z)));
    }
    return PointSet(std::move(pts), "PTS");
}

PointSet load_point_set(const std::string& path, PointFormat format) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open point file " + path);

    const std::size_t columns = format == PointFormat::PlainXyz ? 3 : 2;
    std::vector<SpherePoint> pts;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;

        std::istringstream row(line);
        double v[3] = {0.0, 0.0, 0.0};
        for (std::size_t c = 0; c < columns; ++c) {
            if (!(row >> v[c])) {
                throw FormatError(path + ": expected " + std::to_string(columns) + " numeric columns",
                                  lineno);
            }
        }
        std::string extra;
        if (row >> extra) {
            throw FormatError(path + ": trailing token '" + extra + "'", lineno);
        }

        if (format == PointFormat::PlainXyz) {
            const Vec3 p(v[0], v[1], v[2]);
            const double norm = p.norm();
            if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-6) {
                throw DataError(path + ": line " + std::to_string(lineno) +
                                " is not a unit vector (norm " + std::to_string(norm) + ")");
            }
            pts.push_back(SpherePoint::from_xyz(p / norm));
        } else {
            try {
                pts.push_back(SpherePoint::from_lonlat(v[0], v[1]));
            } catch (const DomainError& e) {
                throw DataError(path + ": line " + std::to_string(lineno) + ": " + e.what());
            }
        }
    }
    if (pts.empty()) throw FormatError(path + ": no points");

    PointSet ps(std::move(pts), std::filesystem::path(path).stem().string());
    if (ps.size() > 1) {
        const auto nn = nearest_neighbor_distances(ps);
        const auto it = std::min_element(nn.begin(), nn.end());
        if (*it <= 0.0) {
            throw DataError(path + ": duplicate point at index " +
                            std::to_string(std::distance(nn.begin(), it)));
        }
    }
    return ps;
}

void save_point_set(const PointSet& ps, const std::string& path, PointFormat format) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write point file " + path);
    out << "# " << ps.label() << " " << ps.size() << " points\n";
    out << std::setprecision(17);
    for (const auto& p : ps.points()) {
        if (format == PointFormat::PlainXyz) {
            out << p.xyz.x() << ' ' << p.xyz.y() << ' ' << p.xyz.z() << '\n';
        } else {
            out << p.lambda << ' ' << p.theta << '\n';
        }
    }
    if (!out) throw Error("write failed for point file " + path);
}

CapSearch::CapSearch(const PointSet& ps, double delta) : ps_(&ps), delta_(delta) {
    if (!(delta > 0.0)) throw DomainError("cap radius must be positive");
    chord_ = delta >= kPi ? 2.0 : 2.0 * std::sin(0.5 * delta);
    everything_ = chord_ >= 1.0 || ps.size() < 64;
    if (everything_) return;

    const double n = static_cast<double>(ps.size());
    const int max_dims = std::max(1, static_cast<int>(2.0 * std::cbrt(n)));
    dims_ = std::clamp(static_cast<int>(2.0 / chord_), 1, max_dims);
    cell_ = 2.0 / dims_;

    auto cell_of = [&](const Vec3& p) {
        int c[3];
        for (int k = 0; k < 3; ++k) {
            c[k] = std::clamp(static_cast<int>(std::floor((p[k] + 1.0) / cell_)), 0, dims_ - 1);
        }
        return (static_cast<std::size_t>(c[2]) * dims_ + c[1]) * dims_ + c[0];
    };

    const std::size_t ncells = static_cast<std::size_t>(dims_) * dims_ * dims_;
    cell_start_.assign(ncells + 1, 0);
    std::vector<std::size_t> cell_id(ps.size());
    for (Index i = 0; i < ps.size(); ++i) {
        cell_id[i] = cell_of(ps[i].xyz);
        ++cell_start_[cell_id[i] + 1];
    }
    for (std::size_t c = 0; c < ncells; ++c) cell_start_[c + 1] += cell_start_[c];
    sorted_.resize(ps.size());
    std::vector<std::size_t> fill(cell_start_.begin(), cell_start_.end() - 1);
    for (Index i = 0; i < ps.size(); ++i) sorted_[fill[cell_id[i]]++] = i;
}

void CapSearch::collect(const Vec3& x, std::vector<Index>& out) const {
    const PointSet& ps = *ps_;
    if (everything_) {
        for (Index j = 0; j < ps.size(); ++j) {
            if (geodesic_distance(x, ps[j].xyz) < delta_) out.push_back(j);
        }
        return;
    }
    const double reach = chord_ + 1e-9;
    int lo[3], hi[3];
    for (int k = 0; k < 3; ++k) {
        lo[k] = std::clamp(static_cast<int>(std::floor((x[k] - reach + 1.0) / cell_)), 0, dims_ - 1);
        hi[k] = std::clamp(static_cast<int>(std::floor((x[k] + reach + 1.0) / cell_)), 0, dims_ - 1);
    }
    for (int cz = lo[2]; cz <= hi[2]; ++cz) {
        for (int cy = lo[1]; cy <= hi[1]; ++cy) {
            for (int cx = lo[0]; cx <= hi[0]; ++cx) {
                const std::size_t c = (static_cast<std::size_t>(cz) * dims_ + cy) * dims_ + cx;
                for (std::size_t s = cell_start_[c]; s < cell_start_[c + 1]; ++s) {
                    const Index j = sorted_[s];
                    if (geodesic_distance(x, ps[j].xyz) < delta_) out.push_back(j);
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
}

Neighborhood CapSearch::query(Index center_index) const {
    if (center_index >= ps_->size()) throw DomainError("cap center index out of range");
    Neighborhood nb = query((*ps_)[center_index].xyz);
    nb.center_index = center_index;
    return nb;
}

Neighborhood CapSearch::query(const Vec3& x) const {
    Neighborhood nb;
    nb.delta = delta_;
    collect(x, nb.indices);
    return nb;
}

Neighborhood cap_neighbors(const PointSet& ps, Index center_index, double delta) {
    return CapSearch(ps, delta).query(center_index);
}

Neighborhood cap_neighbors_brute_force(const PointSet& ps, const Vec3& x, double delta) {
    Neighborhood nb;
    nb.delta = delta;
    for (Index j = 0; j < ps.size(); ++j) {
        if (geodesic_distance(x, ps[j].xyz) < delta) nb.indices.push_back(j);
    }
    return nb;
}

std::vector<double> nearest_neighbor_distances(const PointSet& ps) {
    const std::size_t n = ps.size();
    std::vector<double> nn(n, std::numeric_limits<double>::infinity());
    if (n < 2) return nn;
    std::vector<Index> pending(n);
    for (Index i = 0; i < n; ++i) pending[i] = i;

    double radius = 3.0 / std::sqrt(static_cast<double>(n));
    while (!pending.empty()) {
        radius = std::min(radius, kPi + 1e-9);
        const CapSearch search(ps, radius);
        std::vector<Index> still;
        for (Index i : pending) {
            for (Index j : search.query(i).indices) {
                if (j != i) nn[i] = std::min(nn[i], geodesic_distance(ps[i].xyz, ps[j].xyz));
            }
            if (!std::isfinite(nn[i]) && radius < kPi) still.push_back(i);
        }
        pending.swap(still);
        radius *= 2.0;
    }
    return nn;
}

}  // namespace sphtrans
