#include "sphtrans/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "sphtrans/gmls.hpp"
#include "sphtrans/harmonics.hpp"

namespace sphtrans {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Runs body(i) for i in [0, n) on `threads` workers with static chunking.
template <typename Body>
void parallel_for(std::size_t n, int threads, Body&& body) {
    std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                      : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, std::max<std::size_t>(n, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w * chunk; i < std::min(n, (w + 1) * chunk); ++i) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

SparseMatrix combine_system(const DiscreteOperators& ops, double a_scale, const Eigen::VectorXd& v1,
                            const Eigen::VectorXd& v2, double b_scale) {
    const auto n = ops.a.rows();
    if (v1.size() != n || v2.size() != n) throw DomainError("velocity vectors do not match operators");
    SparseMatrix s = a_scale * ops.a + b_scale * (v1.asDiagonal() * ops.b1 + v2.asDiagonal() * ops.b2);
    s.makeCompressed();
    return s;
}

}  // namespace

std::string to_string(Method method) { return method == Method::Gmls ? "GMLS" : "MKLS"; }

Method method_from_string(const std::string& name) {
    std::string up = name;
    std::transform(up.begin(), up.end(), up.begin(), [](unsigned char ch) { return std::toupper(ch); });
    if (up == "GMLS") return Method::Gmls;
    if (up == "MKLS") return Method::Mkls;
    throw ConfigError("method", "unknown method '" + name + "' (valid: GMLS, MKLS)");
}

std::string to_string(CorrelationDistance d) {
    return d == CorrelationDistance::Chordal ? "chordal" : "geodesic";
}

CorrelationDistance correlation_distance_from_string(const std::string& name) {
    if (name == "chordal") return CorrelationDistance::Chordal;
    if (name == "geodesic") return CorrelationDistance::Geodesic;
    throw ConfigError("correlation_distance",
                      "unknown value '" + name + "' (valid: chordal, geodesic)");
}

void SolverConfig::validate() const {
    if (m < 0) throw ConfigError("m", "harmonic degree must be >= 0");
    if (!(delta_multiplier > 0.0)) throw ConfigError("delta_multiplier", "must be positive");
    if (method == Method::Mkls && !(c_multiplier > 0.0)) {
        throw ConfigError("c_multiplier", "must be positive");
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt", "must be positive");
    if (!(rel_tol > 0.0)) throw ConfigError("rel_tol", "must be positive");
    if (max_iter <= 0) throw ConfigError("max_iter", "must be positive");
    if (!(stencil_safety >= 1.0)) throw ConfigError("stencil_safety", "must be >= 1");
    if (!(condition_cap > 1.0)) throw ConfigError("condition_cap", "must exceed 1");
    if (threads < 0) throw ConfigError("threads", "must be >= 0");
}

std::size_t SolverConfig::min_stencil() const {
    return static_cast<std::size_t>(std::ceil(stencil_safety * static_cast<double>(basis_dim(m))));
}

StencilRow advection_row(const SpherePoint& x, const Neighborhood& nbhd, const PointSet& ps,
                         const SolverConfig& cfg) {
    if (cfg.method == Method::Gmls) return gmls_advection_row(x, nbhd, ps, cfg.m, cfg.condition_cap);
    return mkls_advection_row(x, nbhd, ps, cfg.m, cfg.correlation_parameter(ps),
                              cfg.correlation_distance, cfg.condition_cap);
}

DiscreteOperators assemble_operators(const PointSet& ps, const SolverConfig& cfg) {
    const auto start = Clock::now();
    const std::size_t n = ps.size();
    if (n == 0) throw DomainError("cannot assemble operators on an empty point set");
    const CapSearch search(ps, cfg.delta(ps));
    const std::size_t required = cfg.min_stencil();

    std::vector<StencilRow> rows(n);
    std::vector<std::exception_ptr> failures(n);
    parallel_for(n, cfg.threads, [&](std::size_t i) {
        try {
            const Neighborhood nb = search.query(i);
            if (nb.indices.size() < required) throw StencilError(i, nb.indices.size(), required);
            rows[i] = advection_row(ps[i], nb, ps, cfg);
        } catch (const StencilError&) {
            failures[i] = std::current_exception();
        } catch (const ConditioningError&) {
            failures[i] = std::current_exception();
        }
    });

    // Worst offender: stencil deficiency beats conditioning; fewest neighbors,
    // then largest condition estimate.
    std::exception_ptr worst;
    std::size_t worst_count = std::numeric_limits<std::size_t>::max();
    double worst_cond = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!failures[i]) continue;
        try {
            std::rethrow_exception(failures[i]);
        } catch (const StencilError& e) {
            if (e.count() < worst_count) {
                worst_count = e.count();
                worst = failures[i];
            }
        } catch (const ConditioningError& e) {
            if (worst_count == std::numeric_limits<std::size_t>::max() && e.condition() > worst_cond) {
                worst_cond = e.condition();
                worst = failures[i];
            }
        }
    }
    if (worst) {
        try {
            std::rethrow_exception(worst);
        } catch (const ConditioningError& e) {
            // Conditioning errors from stencils do not carry the node; find it again.
            for (std::size_t i = 0; i < n; ++i) {
                if (failures[i] == worst) {
                    throw ConditioningError("node " + std::to_string(i) + ": " + e.what(),
                                            e.condition());
                }
            }
            throw;
        }
    }

    DiscreteOperators ops;
    std::vector<Triplet> ta, tb1, tb2;
    std::size_t nnz = 0;
    ops.min_stencil = std::numeric_limits<std::size_t>::max();
    for (const auto& r : rows) {
        nnz += r.indices.size();
        ops.min_stencil = std::min(ops.min_stencil, r.indices.size());
        ops.max_stencil = std::max(ops.max_stencil, r.indices.size());
    }
    ta.reserve(nnz);
    tb1.reserve(nnz);
    tb2.reserve(nnz);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = rows[i];
        for (std::size_t k = 0; k < r.indices.size(); ++k) {
            const int row = static_cast<int>(i), col = static_cast<int>(r.indices[k]);
            const auto kk = static_cast<Eigen::Index>(k);
            ta.emplace_back(row, col, r.a(kk));
            tb1.emplace_back(row, col, r.g_lambda(kk));
            tb2.emplace_back(row, col, r.g_theta(kk));
        }
    }
    const int ni = static_cast<int>(n);
    ops.a = csr_from_triplets(ni, ni, ta);
    ops.b1 = csr_from_triplets(ni, ni, tb1);
    ops.b2 = csr_from_triplets(ni, ni, tb2);
    ops.assembly_seconds = seconds_since(start);
    return ops;
}

SparseMatrix system_matrix_bdf1(const DiscreteOperators& ops, const Eigen::VectorXd& v1,
                                const Eigen::VectorXd& v2, double dt) {
    return combine_system(ops, 1.0, v1, v2, dt);
}

SparseMatrix system_matrix_bdf2(const DiscreteOperators& ops, const Eigen::VectorXd& v1,
                                const Eigen::VectorXd& v2, double dt) {
    return combine_system(ops, 3.0, v1, v2, 2.0 * dt);
}

SimulationState initial_state(const TestCase& tc, const PointSet& ps) {
    SimulationState s;
    s.u_curr = sample_initial(tc, ps);
    s.u_prev = s.u_curr;
    return s;
}

StepError::StepError(int step, const SolveReport& report)
    : Error("linear solve failed at step " + std::to_string(step) + " after " +
            std::to_string(report.iterations) + " iterations (relative residual " +
            std::to_string(report.final_relative_residual) + ")"),
      step_(step), report_(report) {}

namespace {

SimulationState solve_step(const SimulationState& state, const SparseMatrix& system,
                           const Ilu0* ilu, const Eigen::VectorXd& rhs, const SolverConfig& cfg,
                           StepStats* stats) {
    const auto start = Clock::now();
    const SolveResult res =
        bicgstab(system, rhs, state.u_curr, ilu, {cfg.rel_tol, cfg.max_iter});
    const int next = state.step_index + 1;
    if (stats) {
        stats->step = next;
        stats->iterations = res.report.iterations;
        stats->relative_residual = res.report.final_relative_residual;
        stats->iterate_seconds = seconds_since(start);
    }
    if (!res.report.converged) throw StepError(next, res.report);
    SimulationState out;
    out.u_prev = state.u_curr;
    out.u_curr = res.x;
    out.step_index = next;
    out.time = next * cfg.dt;
    return out;
}

}  // namespace

SimulationState step_first(const SimulationState& state, const DiscreteOperators& ops,
                           const TestCase& tc, const PointSet& ps, const SolverConfig& cfg,
                           StepStats* stats) {
    if (state.step_index != 0) throw DomainError("step_first expects the state at n = 0");
    const auto start = Clock::now();
    const NodalVelocity v = sample_velocity(tc, ps, cfg.dt);
    const SparseMatrix system = system_matrix_bdf1(ops, v.v1, v.v2, cfg.dt);
    std::optional<Ilu0> ilu;
    if (cfg.precondition) ilu.emplace(system);
    if (stats) {
        stats->rebuilt = true;
        stats->build_seconds = seconds_since(start);
    }
    const Eigen::VectorXd rhs = ops.a * state.u_curr;
    return solve_step(state, system, ilu ? &*ilu : nullptr, rhs, cfg, stats);
}

SimulationState step_bdf2(const SimulationState& state, const DiscreteOperators& ops,
                          const TestCase& tc, const PointSet& ps, const SolverConfig& cfg,
                          SystemCache& cache, StepStats* stats) {
    if (state.step_index < 1) throw DomainError("step_bdf2 needs two previous levels (n >= 1)");
    const auto start = Clock::now();
    const bool rebuild = !cache.matrix || tc.time_dependent_velocity() || cfg.force_rebuild;
    if (rebuild) {
        const double t_next = (state.step_index + 1) * cfg.dt;
        const NodalVelocity v = sample_velocity(tc, ps, t_next);
        cache.matrix = system_matrix_bdf2(ops, v.v1, v.v2, cfg.dt);
        cache.ilu.reset();
        if (cfg.precondition) cache.ilu.emplace(*cache.matrix);
    }
    if (stats) {
        stats->rebuilt = rebuild;
        stats->build_seconds = seconds_since(start);
    }
    const Eigen::VectorXd rhs = ops.a * (4.0 * state.u_curr - state.u_prev);
    return solve_step(state, *cache.matrix, cache.ilu ? &*cache.ilu : nullptr, rhs, cfg, stats);
}

int step_count(double final_time, double dt) {
    if (!(dt > 0.0)) throw ConfigError("dt", "must be positive");
    const double k = std::round(final_time / dt);
    if (std::abs(k * dt - final_time) > 1e-9 * std::max(1.0, final_time)) {
        throw ConfigError("dt", "final time " + std::to_string(final_time) +
                                    " is not an integer multiple of dt " + std::to_string(dt));
    }
    return static_cast<int>(k);
}

RunResult run_simulation(const PointSet& ps, const SolverConfig& cfg, const TestCase& tc,
                         const SnapshotSink& sink, const std::vector<int>& snapshot_steps) {
    cfg.validate();
    step_count(tc.final_time(), cfg.dt);
    const DiscreteOperators ops = assemble_operators(ps, cfg);
    return run_simulation(ps, ops, cfg, tc, sink, snapshot_steps);
}

RunResult run_simulation(const PointSet& ps, const DiscreteOperators& ops,
                         const SolverConfig& cfg, const TestCase& tc, const SnapshotSink& sink,
                         const std::vector<int>& snapshot_steps) {
    cfg.validate();
    const int steps = step_count(tc.final_time(), cfg.dt);

    RunResult result;
    RunReport& rep = result.report;
    rep.test = tc.name();
    rep.method = to_string(cfg.method);
    rep.point_set = ps.label();
    rep.n = ps.size();
    rep.m = cfg.m;
    rep.delta = cfg.delta(ps);
    rep.c = cfg.method == Method::Mkls ? cfg.correlation_parameter(ps) : 0.0;
    rep.dt = cfg.dt;
    rep.final_time = tc.final_time();
    rep.steps = steps;
    rep.min_stencil = ops.min_stencil;
    rep.max_stencil = ops.max_stencil;
    rep.assembly_seconds = ops.assembly_seconds;

    auto wants_snapshot = [&](int step) {
        return std::find(snapshot_steps.begin(), snapshot_steps.end(), step) != snapshot_steps.end();
    };

    SimulationState state = initial_state(tc, ps);
    rep.max_abs_initial = state.u_curr.cwiseAbs().maxCoeff();
    if (sink) sink(state);

    SystemCache cache;
    for (int k = 0; k < steps; ++k) {
        StepStats st;
        state = k == 0 ? step_first(state, ops, tc, ps, cfg, &st)
                       : step_bdf2(state, ops, tc, ps, cfg, cache, &st);
        rep.factorization_seconds += st.build_seconds;
        rep.iteration_seconds += st.iterate_seconds;
        rep.total_iterations += st.iterations;
        rep.max_iterations = std::max(rep.max_iterations, st.iterations);
        rep.step_stats.push_back(st);
        if (sink && wants_snapshot(state.step_index)) sink(state);
    }

    rep.max_abs_final = state.u_curr.cwiseAbs().maxCoeff();
    const double t_final = steps * cfg.dt;
    bool has_exact = true;
    for (Index i = 0; i < ps.size() && has_exact; ++i) has_exact = tc.exact(ps[i], t_final).has_value();
    if (has_exact) {
        const Eigen::VectorXd exact = sample_exact(tc, ps, t_final);
        rep.l2_error = l2_norm(state.u_curr - exact);
        const double norm_exact = l2_norm(exact);
        if (norm_exact > 0.0) rep.relative_l2_error = *rep.l2_error / norm_exact;
    }
    result.u = state.u_curr;
    return result;
}

Eigen::VectorXd evaluate_at(const PointSet& nodes, const SolverConfig& cfg,
                            const Eigen::VectorXd& u, const PointSet& targets) {
    if (u.size() != static_cast<Eigen::Index>(nodes.size())) {
        throw DomainError("evaluate_at: field size does not match node count");
    }
    const CapSearch search(nodes, cfg.delta(nodes));
    Eigen::VectorXd out(targets.size());
    for (Index i = 0; i < targets.size(); ++i) {
        const Neighborhood nb = search.query(targets[i].xyz);
        Eigen::VectorXd a;
        if (cfg.method == Method::Gmls) {
            a = GmlsStencil(targets[i], nb, nodes, cfg.m, cfg.condition_cap).shape_functions();
        } else {
            a = MklsStencil(targets[i], nb, nodes, cfg.m, cfg.correlation_parameter(nodes),
                            cfg.correlation_distance, cfg.condition_cap)
                    .shape_functions();
        }
        double sum = 0.0;
        for (std::size_t k = 0; k < nb.indices.size(); ++k) {
            sum += a(static_cast<Eigen::Index>(k)) * u(static_cast<Eigen::Index>(nb.indices[k]));
        }
        out(i) = sum;
    }
    return out;
}

}  // namespace sphtrans
