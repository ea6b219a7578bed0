#include "sphtrans/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "sphtrans/io.hpp"

namespace sphtrans {

namespace {

using Clock = std::chrono::steady_clock;

std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

std::string snapshot_name(int step, SnapshotFormat format) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "snapshot_%06d.%s", step,
                  format == SnapshotFormat::Csv ? "csv" : "vtk");
    return buf;
}

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void ensure_directory(const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) throw IoError(path, "cannot create directory: " + ec.message());
}

RunOutcome execute_run(const RunManifest& manifest, const std::string& output_dir,
                       std::optional<std::size_t> n_override, std::ostream* log) {
    const auto start = Clock::now();
    RunOutcome out;
    const TestCase tc = manifest.test_case();
    const PointSet ps = manifest.point_set(n_override);
    const SolverConfig& cfg = manifest.solver;
    const bool write = !output_dir.empty();
    if (write) ensure_directory(output_dir);

    out.report.test = tc.name();
    out.report.method = to_string(cfg.method);
    out.report.point_set = ps.label();
    out.report.n = ps.size();
    out.report.m = cfg.m;
    out.report.dt = cfg.dt;
    out.report.final_time = tc.final_time();

    try {
        const DiscreteOperators ops = assemble_operators(ps, cfg);
        if (log) {
            *log << "assembled " << to_string(cfg.method) << " operators for N = " << ps.size()
                 << " (stencil " << ops.min_stencil << "-" << ops.max_stencil << ") in "
                 << ops.assembly_seconds << " s\n";
        }
        if (write && manifest.dump_matrices) {
            write_matrix_market(ops.a, join(output_dir, "A.mtx"));
            write_matrix_market(ops.b1, join(output_dir, "B1.mtx"));
            write_matrix_market(ops.b2, join(output_dir, "B2.mtx"));
        }
        SnapshotSink sink;
        if (write && !manifest.snapshot_times.empty()) {
            sink = [&](const SimulationState& st) {
                for (auto format : manifest.snapshot_formats) {
                    emit_snapshot(ps, st.u_curr, format,
                                  join(output_dir, snapshot_name(st.step_index, format)));
                }
            };
        }
        std::vector<int> steps = manifest.snapshot_steps();
        const bool want_initial = std::find(steps.begin(), steps.end(), 0) != steps.end();
        SnapshotSink filtered = sink;
        if (sink && !want_initial) {
            filtered = [&](const SimulationState& st) {
                if (st.step_index != 0) sink(st);
            };
        }
        RunResult result = run_simulation(ps, ops, cfg, tc, filtered, steps);
        out.report = std::move(result.report);
        out.u = std::move(result.u);

        if (!manifest.error_points_file.empty()) {
            const PointSet targets =
                load_point_set(manifest.error_points_file, manifest.error_points_format);
            const Eigen::VectorXd numeric = evaluate_at(ps, cfg, out.u, targets);
            const double t_final = out.report.steps * cfg.dt;
            bool has_exact = true;
            for (Index i = 0; i < targets.size() && has_exact; ++i) {
                has_exact = tc.exact(targets[i], t_final).has_value();
            }
            if (has_exact) {
                const Eigen::VectorXd exact = sample_exact(tc, targets, t_final);
                out.report.l2_error = l2_norm(numeric - exact);
                const double norm_exact = l2_norm(exact);
                out.report.relative_l2_error =
                    norm_exact > 0.0 ? std::optional<double>(*out.report.l2_error / norm_exact)
                                     : std::nullopt;
            }
        }
    } catch (const StepError& e) {
        out.report.converged = false;
        out.failure = e.what();
    } catch (const StencilError& e) {
        out.report.converged = false;
        out.failure = e.what();
    } catch (const ConditioningError& e) {
        out.report.converged = false;
        out.failure = e.what();
    } catch (const FactorizationError& e) {
        out.report.converged = false;
        out.failure = e.what();
    }
    out.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();

    if (log) {
        if (out.failure.empty()) {
            *log << "N = " << out.report.n << ": " << out.report.steps << " steps, "
                 << out.report.total_iterations << " BiCGSTAB iterations";
            if (out.report.l2_error) *log << ", l2 error " << g17(*out.report.l2_error);
            *log << '\n';
        } else {
            *log << "N = " << out.report.n << ": FAILED: " << out.failure << '\n';
        }
    }
    if (write) {
        std::string text = report_text(out.report);
        text += "wall_seconds: " + g17(out.wall_seconds) + "\n";
        if (!out.failure.empty()) text += "failure: " + out.failure + "\n";
        write_text_file(join(output_dir, "report.txt"), text);
        write_text_file(join(output_dir, "report.json"), report_json(out.report) + "\n");
    }
    return out;
}

std::vector<SweepRow> run_convergence_sweep(const RunManifest& manifest,
                                            const std::vector<std::size_t>& n_list,
                                            const std::string& output_dir, std::ostream* log) {
    std::vector<SweepRow> rows;
    for (std::size_t n : n_list) {
        RunManifest per_n = manifest;
        per_n.snapshot_times.clear();
        const std::string dir = output_dir.empty() ? "" : join(output_dir, "N" + std::to_string(n));
        SweepRow row;
        row.n = n;
        try {
            const RunOutcome r = execute_run(per_n, dir, n, log);
            row.l2_error = r.report.l2_error;
            row.relative_l2_error = r.report.relative_l2_error;
            row.iterations = r.report.total_iterations;
            row.wall_seconds = r.wall_seconds;
            row.converged = r.ok();
            row.failure = r.failure;
        } catch (const Error& e) {
            row.failure = e.what();
            if (log) *log << "N = " << n << ": FAILED: " << e.what() << '\n';
        }
        rows.push_back(row);
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "n,l2_error,relative_l2_error,iterations,wall_seconds,converged\n";
    auto opt = [](const std::optional<double>& v) { return v ? g17(*v) : std::string("nan"); };
    for (const auto& r : rows) {
        out << r.n << ',' << opt(r.l2_error) << ',' << opt(r.relative_l2_error) << ','
            << r.iterations << ',' << g17(r.wall_seconds) << ',' << (r.converged ? "true" : "false")
            << '\n';
    }
    return out.str();
}

}  // namespace sphtrans
