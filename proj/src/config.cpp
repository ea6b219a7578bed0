#include "sphtrans/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "sphtrans/errors.hpp"

namespace sphtrans {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& value) {
    // Also a single fraction a/b, with a possibly `pi` or `2pi`: dt = 2pi/1000.
    const auto slash = value.find('/');
    try {
        std::size_t used = 0;
        if (slash != std::string::npos) {
            const std::string num = trim(value.substr(0, slash));
            const std::string den = trim(value.substr(slash + 1));
            double a = 0.0;
            if (num == "pi" || num == "2pi") {
                a = num == "pi" ? std::numbers::pi : 2.0 * std::numbers::pi;
            } else {
                a = std::stod(num, &used);
                if (used != num.size()) throw std::invalid_argument(value);
            }
            const double b = std::stod(den, &used);
            if (used != den.size() || b == 0.0) throw std::invalid_argument(value);
            return a / b;
        }
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key, "not a number: '" + value + "'");
    }
}

long to_integer(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long v = std::stol(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key, "not an integer: '" + value + "'");
    }
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw ConfigError(key, "not a boolean: '" + value + "' (valid: true, false)");
}

PointFormat to_point_format(const std::string& key, const std::string& value) {
    if (value == "xyz") return PointFormat::PlainXyz;
    if (value == "lonlat") return PointFormat::PlainLonLat;
    throw ConfigError(key, "unknown point format '" + value + "' (valid: xyz, lonlat)");
}

std::string point_format_name(PointFormat f) { return f == PointFormat::PlainXyz ? "xyz" : "lonlat"; }

std::string g17(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

}  // namespace

Settings parse_settings(std::istream& in) {
    Settings out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw FormatError("expected 'key = value'", lineno);
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw FormatError("empty key", lineno);
        if (out.count(key)) throw ConfigError(key, "given twice (line " + std::to_string(lineno) + ")");
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

Settings read_settings_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open for reading");
    try {
        return parse_settings(in);
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what());
    }
}

Settings merge_settings(Settings base, const Settings& overrides) {
    for (const auto& [k, v] : overrides) base[k] = v;
    return base;
}

const std::vector<std::string>& manifest_keys() {
    static const std::vector<std::string> keys = {
        "test", "final_time", "bell_radius", "n", "points_file", "points_format", "method", "m",
        "delta_multiplier", "c_multiplier", "correlation_distance", "dt", "rel_tol", "max_iter",
        "precondition", "stencil_safety", "condition_cap", "threads", "force_rebuild",
        "error_points_file", "error_points_format", "snapshot_times", "snapshot_format",
        "output_dir", "dump_matrices", "n_list"};
    return keys;
}

TestCase RunManifest::test_case() const {
    TestCase base = make_case(test);
    FlowParameters p = base.parameters();
    p.bell_radius = bell_radius;
    return TestCase(test, final_time.value_or(base.final_time()), p);
}

PointSet RunManifest::point_set(std::optional<std::size_t> n_override) const {
    if (n_override) return generate_phyllotaxis(*n_override);
    if (!points_file.empty()) return load_point_set(points_file, points_format);
    return generate_phyllotaxis(n);
}

std::vector<int> RunManifest::snapshot_steps() const {
    const double t_final = test_case().final_time();
    std::vector<int> steps;
    for (double t : snapshot_times) {
        if (t < -1e-12 || t > t_final * (1.0 + 1e-12)) {
            throw ConfigError("snapshot_times", "time " + g17(t) + " outside [0, T]");
        }
        const double k = std::round(t / solver.dt);
        if (std::abs(k * solver.dt - t) > 1e-9 * std::max(1.0, t_final)) {
            throw ConfigError("snapshot_times", "time " + g17(t) + " is not a multiple of dt");
        }
        steps.push_back(static_cast<int>(k));
    }
    return steps;
}

RunManifest manifest_from_settings(const Settings& settings) {
    const auto& keys = manifest_keys();
    for (const auto& [k, v] : settings) {
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
            throw ConfigError(k, "unknown key");
        }
    }
    auto get = [&](const std::string& k) -> std::optional<std::string> {
        const auto it = settings.find(k);
        if (it == settings.end()) return std::nullopt;
        if (it->second.empty()) throw ConfigError(k, "empty value");
        return it->second;
    };

    RunManifest mf;
    const auto test = get("test");
    if (!test) throw ConfigError("test", "required (valid: solid_body, vortex, deformational)");
    try {
        mf.test = flow_kind_from_string(*test);
    } catch (const DomainError&) {
        throw ConfigError("test", "unknown test '" + *test + "' (valid: solid_body, vortex, deformational)");
    }
    if (auto v = get("final_time")) {
        mf.final_time = to_double("final_time", *v);
        if (!(*mf.final_time > 0.0)) throw ConfigError("final_time", "must be positive");
    }
    if (auto v = get("bell_radius")) {
        mf.bell_radius = to_double("bell_radius", *v);
        if (!(mf.bell_radius > 0.0 && mf.bell_radius <= std::numbers::pi)) {
            throw ConfigError("bell_radius", "must lie in (0, pi]");
        }
    }

    if (auto v = get("points_file")) mf.points_file = *v;
    if (auto v = get("points_format")) mf.points_format = to_point_format("points_format", *v);
    if (auto v = get("n")) {
        const long n = to_integer("n", *v);
        if (n < 4) throw ConfigError("n", "need at least 4 points");
        mf.n = static_cast<std::size_t>(n);
    }
    if (const auto it = settings.find("n_list"); it != settings.end()) {
        for (const auto& item : split_list(it->second)) {
            const long n = to_integer("n_list", item);
            if (n < 4) throw ConfigError("n_list", "need at least 4 points per entry");
            mf.n_list.push_back(static_cast<std::size_t>(n));
        }
    }
    if (mf.n > 0 && !mf.points_file.empty()) {
        throw ConfigError("points_file", "give either n or points_file, not both");
    }
    if (mf.n == 0 && mf.points_file.empty() && !settings.count("n_list")) {
        throw ConfigError("n", "required unless points_file or n_list is given");
    }

    SolverConfig& s = mf.solver;
    if (auto v = get("method")) s.method = method_from_string(*v);
    if (auto v = get("m")) s.m = static_cast<int>(to_integer("m", *v));
    if (auto v = get("delta_multiplier")) s.delta_multiplier = to_double("delta_multiplier", *v);
    if (auto v = get("c_multiplier")) s.c_multiplier = to_double("c_multiplier", *v);
    if (auto v = get("correlation_distance")) s.correlation_distance = correlation_distance_from_string(*v);
    if (auto v = get("rel_tol")) s.rel_tol = to_double("rel_tol", *v);
    if (auto v = get("max_iter")) s.max_iter = static_cast<int>(to_integer("max_iter", *v));
    if (auto v = get("precondition")) s.precondition = to_bool("precondition", *v);
    if (auto v = get("stencil_safety")) s.stencil_safety = to_double("stencil_safety", *v);
    if (auto v = get("condition_cap")) s.condition_cap = to_double("condition_cap", *v);
    if (auto v = get("threads")) s.threads = static_cast<int>(to_integer("threads", *v));
    if (auto v = get("force_rebuild")) s.force_rebuild = to_bool("force_rebuild", *v);

    const double t_final = mf.test_case().final_time();
    if (auto v = get("dt")) {
        s.dt = to_double("dt", *v);
    } else {
        s.dt = t_final / 1000.0;
    }
    s.validate();
    step_count(t_final, s.dt);

    if (auto v = get("error_points_file")) mf.error_points_file = *v;
    if (auto v = get("error_points_format")) {
        mf.error_points_format = to_point_format("error_points_format", *v);
    }
    if (auto v = get("snapshot_times")) {
        for (const auto& item : split_list(*v)) mf.snapshot_times.push_back(to_double("snapshot_times", item));
    }
    if (auto v = get("snapshot_format")) {
        mf.snapshot_formats.clear();
        for (const auto& item : split_list(*v)) mf.snapshot_formats.push_back(snapshot_format_from_string(item));
    }
    if (auto v = get("output_dir")) mf.output_dir = *v;
    if (auto v = get("dump_matrices")) mf.dump_matrices = to_bool("dump_matrices", *v);

    mf.snapshot_steps();
    return mf;
}

std::string manifest_to_text(const RunManifest& mf) {
    std::ostringstream out;
    const SolverConfig& s = mf.solver;
    out << "test = " << to_string(mf.test) << '\n';
    if (mf.final_time) out << "final_time = " << g17(*mf.final_time) << '\n';
    out << "bell_radius = " << g17(mf.bell_radius) << '\n';
    if (mf.n > 0) out << "n = " << mf.n << '\n';
    if (!mf.points_file.empty()) {
        out << "points_file = " << mf.points_file << '\n'
            << "points_format = " << point_format_name(mf.points_format) << '\n';
    }
    out << "method = " << to_string(s.method) << '\n'
        << "m = " << s.m << '\n'
        << "delta_multiplier = " << g17(s.delta_multiplier) << '\n'
        << "c_multiplier = " << g17(s.c_multiplier) << '\n'
        << "correlation_distance = " << to_string(s.correlation_distance) << '\n'
        << "dt = " << g17(s.dt) << '\n'
        << "rel_tol = " << g17(s.rel_tol) << '\n'
        << "max_iter = " << s.max_iter << '\n'
        << "precondition = " << (s.precondition ? "true" : "false") << '\n'
        << "stencil_safety = " << g17(s.stencil_safety) << '\n'
        << "condition_cap = " << g17(s.condition_cap) << '\n'
        << "threads = " << s.threads << '\n'
        << "force_rebuild = " << (s.force_rebuild ? "true" : "false") << '\n';
    if (!mf.error_points_file.empty()) {
        out << "error_points_file = " << mf.error_points_file << '\n'
            << "error_points_format = " << point_format_name(mf.error_points_format) << '\n';
    }
    if (!mf.snapshot_times.empty()) {
        out << "snapshot_times = ";
        for (std::size_t i = 0; i < mf.snapshot_times.size(); ++i) {
            out << (i ? "," : "") << g17(mf.snapshot_times[i]);
        }
        out << '\n';
    }
    out << "snapshot_format = ";
    for (std::size_t i = 0; i < mf.snapshot_formats.size(); ++i) {
        out << (i ? "," : "") << (mf.snapshot_formats[i] == SnapshotFormat::Csv ? "csv" : "vtk");
    }
    out << '\n' << "output_dir = " << mf.output_dir << '\n'
        << "dump_matrices = " << (mf.dump_matrices ? "true" : "false") << '\n';
    if (!mf.n_list.empty()) {
        out << "n_list = ";
        for (std::size_t i = 0; i < mf.n_list.size(); ++i) out << (i ? "," : "") << mf.n_list[i];
        out << '\n';
    }
    return out.str();
}

}  // namespace sphtrans
