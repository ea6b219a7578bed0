#include "sphtrans/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace sphtrans {

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError(path, "cannot open for writing");
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.close();
    if (!out) throw IoError(path, "write failed");
}

double parse_double(const std::string& field, std::size_t line) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(field, &used);
    } catch (const std::exception&) {
        throw FormatError("not a number: '" + field + "'", line);
    }
    if (used != field.size()) throw FormatError("not a number: '" + field + "'", line);
    return v;
}

}  // namespace

SnapshotFormat snapshot_format_from_string(const std::string& name) {
    if (name == "csv") return SnapshotFormat::Csv;
    if (name == "vtk" || name == "vtk-legacy") return SnapshotFormat::VtkLegacy;
    throw ConfigError("snapshot_format", "unknown format '" + name + "' (valid: csv, vtk)");
}

void write_snapshot_csv(const PointSet& ps, const Eigen::VectorXd& u, const std::string& path) {
    if (u.size() != static_cast<Eigen::Index>(ps.size())) {
        throw DomainError("snapshot field size does not match node count");
    }
    auto out = open_for_write(path);
    out << "lambda,theta,u\n";
    for (Index i = 0; i < ps.size(); ++i) {
        out << g17(ps[i].lambda) << ',' << g17(ps[i].theta) << ','
            << g17(u(static_cast<Eigen::Index>(i))) << '\n';
    }
    finish(out, path);
}

void write_snapshot_vtk(const PointSet& ps, const Eigen::VectorXd& u, const std::string& path,
                        const std::string& title) {
    if (u.size() != static_cast<Eigen::Index>(ps.size())) {
        throw DomainError("snapshot field size does not match node count");
    }
    const std::size_t n = ps.size();
    auto out = open_for_write(path);
    out << "# vtk DataFile Version 3.0\n"
        << title.substr(0, 255) << "\n"
        << "ASCII\n"
        << "DATASET POLYDATA\n"
        << "POINTS " << n << " double\n";
    for (Index i = 0; i < n; ++i) {
        const Vec3& p = ps[i].xyz;
        out << g17(p.x()) << ' ' << g17(p.y()) << ' ' << g17(p.z()) << '\n';
    }
    out << "VERTICES " << n << ' ' << 2 * n << '\n';
    for (Index i = 0; i < n; ++i) out << "1 " << i << '\n';
    out << "POINT_DATA " << n << '\n'
        << "SCALARS u double 1\n"
        << "LOOKUP_TABLE default\n";
    for (Index i = 0; i < n; ++i) out << g17(u(static_cast<Eigen::Index>(i))) << '\n';
    finish(out, path);
}

void emit_snapshot(const PointSet& ps, const Eigen::VectorXd& u, SnapshotFormat format,
                   const std::string& path) {
    if (format == SnapshotFormat::Csv) {
        write_snapshot_csv(ps, u, path);
    } else {
        write_snapshot_vtk(ps, u, path);
    }
}

SnapshotTable read_snapshot_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open for reading");
    SnapshotTable table;
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw FormatError("empty snapshot file");
    ++lineno;
    if (line != "lambda,theta,u") throw FormatError("expected header 'lambda,theta,u'", lineno);
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string f[3];
        for (auto& s : f) {
            if (!std::getline(ss, s, ',')) throw FormatError("expected three columns", lineno);
        }
        std::string extra;
        if (std::getline(ss, extra)) throw FormatError("expected three columns", lineno);
        table.lambda.push_back(parse_double(f[0], lineno));
        table.theta.push_back(parse_double(f[1], lineno));
        table.u.push_back(parse_double(f[2], lineno));
    }
    return table;
}

std::string report_text(const RunReport& r) {
    std::ostringstream out;
    auto opt = [](const std::optional<double>& v) { return v ? g17(*v) : std::string("n/a"); };
    out << "test: " << r.test << '\n'
        << "method: " << r.method << '\n'
        << "point_set: " << r.point_set << '\n'
        << "n: " << r.n << '\n'
        << "m: " << r.m << '\n'
        << "delta: " << g17(r.delta) << '\n'
        << "c: " << g17(r.c) << '\n'
        << "dt: " << g17(r.dt) << '\n'
        << "final_time: " << g17(r.final_time) << '\n'
        << "steps: " << r.steps << '\n'
        << "min_stencil: " << r.min_stencil << '\n'
        << "max_stencil: " << r.max_stencil << '\n'
        << "assembly_seconds: " << r.assembly_seconds << '\n'
        << "factorization_seconds: " << r.factorization_seconds << '\n'
        << "iteration_seconds: " << r.iteration_seconds << '\n'
        << "total_iterations: " << r.total_iterations << '\n'
        << "max_iterations: " << r.max_iterations << '\n'
        << "converged: " << (r.converged ? "true" : "false") << '\n'
        << "l2_error: " << opt(r.l2_error) << '\n'
        << "relative_l2_error: " << opt(r.relative_l2_error) << '\n'
        << "max_abs_initial: " << g17(r.max_abs_initial) << '\n'
        << "max_abs_final: " << g17(r.max_abs_final) << '\n';
    return out.str();
}

std::string report_json(const RunReport& r, bool include_steps) {
    nlohmann::json j = {
        {"test", r.test},
        {"method", r.method},
        {"point_set", r.point_set},
        {"n", r.n},
        {"m", r.m},
        {"delta", r.delta},
        {"c", r.c},
        {"dt", r.dt},
        {"final_time", r.final_time},
        {"steps", r.steps},
        {"min_stencil", r.min_stencil},
        {"max_stencil", r.max_stencil},
        {"assembly_seconds", r.assembly_seconds},
        {"factorization_seconds", r.factorization_seconds},
        {"iteration_seconds", r.iteration_seconds},
        {"total_iterations", r.total_iterations},
        {"max_iterations", r.max_iterations},
        {"converged", r.converged},
        {"l2_error", r.l2_error ? nlohmann::json(*r.l2_error) : nlohmann::json(nullptr)},
        {"relative_l2_error",
         r.relative_l2_error ? nlohmann::json(*r.relative_l2_error) : nlohmann::json(nullptr)},
        {"max_abs_initial", r.max_abs_initial},
        {"max_abs_final", r.max_abs_final},
    };
    if (include_steps) {
        auto steps = nlohmann::json::array();
        for (const auto& s : r.step_stats) {
            steps.push_back({{"step", s.step},
                             {"iterations", s.iterations},
                             {"relative_residual", s.relative_residual},
                             {"rebuilt", s.rebuilt},
                             {"build_seconds", s.build_seconds},
                             {"iterate_seconds", s.iterate_seconds}});
        }
        j["step_stats"] = std::move(steps);
    }
    return j.dump();
}

void write_text_file(const std::string& path, const std::string& contents) {
    auto out = open_for_write(path);
    out << contents;
    finish(out, path);
}

}  // namespace sphtrans
