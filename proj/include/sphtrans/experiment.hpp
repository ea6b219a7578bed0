#ifndef SPHTRANS_EXPERIMENT_HPP
#define SPHTRANS_EXPERIMENT_HPP

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sphtrans/config.hpp"
#include "sphtrans/solver.hpp"

namespace sphtrans {

struct RunOutcome {
    RunReport report;
    Eigen::VectorXd u;
    double wall_seconds = 0.0;
    /// Empty on success; otherwise the error that stopped the run.
    std::string failure;
    bool ok() const { return failure.empty() && report.converged; }
};

/// Assembles, integrates and evaluates one manifest. Snapshots, the report
/// (report.txt and report.json) and optional MatrixMarket dumps go to
/// `output_dir` when it is non-empty. Solver and stencil failures are returned
/// in `failure`, not thrown; configuration and I/O errors propagate.
RunOutcome execute_run(const RunManifest& manifest, const std::string& output_dir,
                       std::optional<std::size_t> n_override = std::nullopt,
                       std::ostream* log = nullptr);

struct SweepRow {
    std::size_t n = 0;
    std::optional<double> l2_error;
    std::optional<double> relative_l2_error;
    int iterations = 0;
    double wall_seconds = 0.0;
    bool converged = false;
    std::string failure;
};

/// One run per N on generated phyllotaxis points. A failing N is logged and
/// kept as a row with converged = false; the remaining sizes still run.
std::vector<SweepRow> run_convergence_sweep(const RunManifest& manifest,
                                            const std::vector<std::size_t>& n_list,
                                            const std::string& output_dir = "",
                                            std::ostream* log = nullptr);

/// Header `n,l2_error,relative_l2_error,iterations,wall_seconds,converged`.
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Creates `path` and its parents; throws IoError on failure.
void ensure_directory(const std::string& path);

}  // namespace sphtrans

#endif  // SPHTRANS_EXPERIMENT_HPP
