#ifndef SPHTRANS_SOLVER_HPP
#define SPHTRANS_SOLVER_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sphtrans/errors.hpp"
#include "sphtrans/geometry.hpp"
#include "sphtrans/mkls.hpp"
#include "sphtrans/sparse.hpp"
#include "sphtrans/stencil.hpp"
#include "sphtrans/testcases.hpp"

namespace sphtrans {

enum class Method { Gmls, Mkls };

std::string to_string(Method method);
Method method_from_string(const std::string& name);
std::string to_string(CorrelationDistance d);
CorrelationDistance correlation_distance_from_string(const std::string& name);

struct SolverConfig {
    Method method = Method::Gmls;
    int m = 3;                        // harmonic degree
    double delta_multiplier = 12.0;   // δ = delta_multiplier * h
    double c_multiplier = 20.0;       // c = c_multiplier / h (MKLS)
    double dt = 0.0;
    double rel_tol = 1e-10;
    int max_iter = 1000;
    CorrelationDistance correlation_distance = CorrelationDistance::Chordal;
    /// Every cap must hold at least stencil_safety * (m+1)^2 nodes.
    double stencil_safety = 2.0;
    double condition_cap = kDefaultConditionCap;
    bool precondition = true;
    /// Rebuild system matrix and ILU(0) every step even for steady velocity.
    bool force_rebuild = false;
    /// Assembly worker threads; 0 selects the hardware concurrency.
    int threads = 1;

    /// Throws ConfigError naming the first invalid field.
    void validate() const;
    double delta(const PointSet& ps) const { return delta_multiplier * ps.fill_distance(); }
    double correlation_parameter(const PointSet& ps) const {
        return c_multiplier / ps.fill_distance();
    }
    std::size_t min_stencil() const;
};

/// Global shape-function matrix A and advection matrices B1, B2. All three share
/// the stencil sparsity pattern: row i covers the cap around node i.
struct DiscreteOperators {
    SparseMatrix a;
    SparseMatrix b1;
    SparseMatrix b2;
    std::size_t min_stencil = 0;
    std::size_t max_stencil = 0;
    double assembly_seconds = 0.0;
};

/// One advection row at an arbitrary point for the configured method.
StencilRow advection_row(const SpherePoint& x, const Neighborhood& nbhd, const PointSet& ps,
                         const SolverConfig& cfg);

/// Builds A, B1, B2 row by row. Any stencil or conditioning failure aborts
/// assembly with the error of the worst node (fewest neighbors, then largest
/// condition estimate).
DiscreteOperators assemble_operators(const PointSet& ps, const SolverConfig& cfg);

/// A + dt (diag(v1) B1 + diag(v2) B2)
SparseMatrix system_matrix_bdf1(const DiscreteOperators& ops, const Eigen::VectorXd& v1,
                                const Eigen::VectorXd& v2, double dt);
/// 3A + 2 dt (diag(v1) B1 + diag(v2) B2)
SparseMatrix system_matrix_bdf2(const DiscreteOperators& ops, const Eigen::VectorXd& v1,
                                const Eigen::VectorXd& v2, double dt);

struct SimulationState {
    Eigen::VectorXd u_prev;
    Eigen::VectorXd u_curr;
    int step_index = 0;
    double time = 0.0;
};

SimulationState initial_state(const TestCase& tc, const PointSet& ps);

class StepError : public Error {
public:
    StepError(int step, const SolveReport& report);
    const SolveReport& report() const { return report_; }
    int step() const { return step_; }

private:
    int step_;
    SolveReport report_;
};

struct StepStats {
    int step = 0;
    int iterations = 0;
    double relative_residual = 0.0;
    bool rebuilt = false;
    double build_seconds = 0.0;      // system matrix + ILU(0)
    double iterate_seconds = 0.0;    // BiCGSTAB
};

/// System matrix and its ILU(0) factors, reused across steps while the velocity
/// is steady.
struct SystemCache {
    std::optional<SparseMatrix> matrix;
    std::optional<Ilu0> ilu;
};

/// BDF1 step from n = 0: solve (A + dt V B) u^1 = A u^0.
SimulationState step_first(const SimulationState& state, const DiscreteOperators& ops,
                           const TestCase& tc, const PointSet& ps, const SolverConfig& cfg,
                           StepStats* stats = nullptr);

/// BDF2 step: solve (3A + 2 dt V B) u^{n+1} = 4 A u^n - A u^{n-1}.
SimulationState step_bdf2(const SimulationState& state, const DiscreteOperators& ops,
                          const TestCase& tc, const PointSet& ps, const SolverConfig& cfg,
                          SystemCache& cache, StepStats* stats = nullptr);

struct RunReport {
    std::string test;
    std::string method;
    std::string point_set;
    std::size_t n = 0;
    int m = 0;
    double delta = 0.0;
    double c = 0.0;
    double dt = 0.0;
    double final_time = 0.0;
    int steps = 0;
    std::size_t min_stencil = 0;
    std::size_t max_stencil = 0;
    double assembly_seconds = 0.0;
    double factorization_seconds = 0.0;
    double iteration_seconds = 0.0;
    int total_iterations = 0;
    int max_iterations = 0;
    bool converged = true;
    std::optional<double> l2_error;
    std::optional<double> relative_l2_error;
    double max_abs_initial = 0.0;
    double max_abs_final = 0.0;
    std::vector<StepStats> step_stats;
};

struct RunResult {
    Eigen::VectorXd u;
    RunReport report;
};

using SnapshotSink = std::function<void(const SimulationState&)>;

/// One BDF1 step followed by BDF2 steps up to tc.final_time(). The sink is
/// called with the initial state and after each step listed in
/// `snapshot_steps`. Throws ConfigError when T is not a multiple of dt.
RunResult run_simulation(const PointSet& ps, const SolverConfig& cfg, const TestCase& tc,
                         const SnapshotSink& sink = {},
                         const std::vector<int>& snapshot_steps = {});

/// Same, reusing operators assembled for this point set and configuration.
RunResult run_simulation(const PointSet& ps, const DiscreteOperators& ops,
                         const SolverConfig& cfg, const TestCase& tc,
                         const SnapshotSink& sink = {},
                         const std::vector<int>& snapshot_steps = {});

/// Number of steps k with k dt = T; ConfigError if none within 1e-9 T.
int step_count(double final_time, double dt);

/// Evaluates the nodal field u at arbitrary points through the configured
/// method's shape functions.
Eigen::VectorXd evaluate_at(const PointSet& nodes, const SolverConfig& cfg,
                            const Eigen::VectorXd& u, const PointSet& targets);

}  // namespace sphtrans

#endif  // SPHTRANS_SOLVER_HPP
