#pragma once

#include "msgne/operators.hpp"

namespace msgne {

struct SolveConfig {
    std::optional<Vec> gamma;     // per-agent steps; default 0.9 of the bound
    std::optional<double> zeta;   // coordinator step (variants with a coordinator)
    double epsilon = 1e-5;        // stopping tolerance on ||w^{k+1} - w^k||_inf
    int max_iters = 200000;
    int trace_every = 1;
    std::optional<Vec> omega_star;  // known equilibrium, enables the Lyapunov column
    bool check_step_sizes = true;
    double step_fraction = 0.9;
    double polytope_tol = 1e-10;
    bool record_iterates = false;  // keep a snapshot per trace row
};

enum class SolveStatus { Converged, MaxIters, Diverged };

struct TraceRow {
    int iter = 0;
    double residual_inf = 0.0;
    double coupling_violation = 0.0;
    double local_violation = 0.0;
    std::optional<double> lyapunov;
};

struct SolveReport {
    SolveStatus status = SolveStatus::MaxIters;
    int iterations = 0;
    Variant variant = Variant::SemiDecentralized;
    Layout layout;
    Vec final_iterate;
    Vec final_x, final_y;  // stacked primal blocks
    std::vector<TraceRow> trace;
    std::vector<Vec> snapshots;  // filled when record_iterates is set
    Vec gamma_groups;            // step per group (agents [+ coordinator])
    LipschitzReport lipschitz;
};

/* One reflected step
 *   w+ = (grad phi + Gamma A)^{-1} (grad phi(w) - Gamma (2 B(w) - B_prev)),
 * realized block-wise: entropy blocks through the simplex mirror step,
 * Euclidean blocks through projections. Returns the fresh forward value so
 * the caller keeps the one-evaluation-per-iteration property. */
void bforb_step(const SplitProblem& problem, const Vec& gamma_groups, const Vec& w,
                const Vec& B_prev, Vec& w_next, Vec& B_w);

/* Descent diagnostic for a known zero w_star:
 *   dist_{phi_hat}(w*, w^k) + (sigma_hat/4) ||w^k - w^{k-1}||^2
 *     + <B(w^k) - B(w^{k-1}), w* - w^k>
 * with phi_hat the Gamma^{-1}-scaled regularizer. Nonincreasing and
 * nonnegative along trajectories inside the step-size bound. */
double lyapunov_diagnostic(const SplitProblem& problem, const Vec& gamma_groups, const Vec& w_star,
                           const Vec& w_k, const Vec& w_prev, const Vec& B_prev, const Vec& B_k);
double lyapunov_diagnostic(const SplitProblem& problem, const Vec& gamma_groups, const Vec& w_star,
                           const Vec& w_k, const Vec& w_prev, const Vec& B_prev);

/* Default initial iterate: uniform mixed strategies, set reference points
 * for y, zero multipliers. */
Vec default_init(const MsGnep& ms, const Layout& layout);

/* Generic driver for an assembled splitting; `ms` supplies the feasibility
 * audits recorded in the trace. */
SolveReport run_generic(const SplitProblem& problem, const Layout& layout, const MsGnep& ms,
                        const Vec& init, const SolveConfig& cfg);

/* Semi-decentralized Bregman driver: entropy mirror steps on the simplices,
 * coordinator-held multiplier for the coupling rows. */
SolveReport run_bforb(const MsGnep& ms, const SolveConfig& cfg);

/* Condensed reflected splitting: joint Euclidean projection of (x_i, y_i)
 * onto Omega_i, same coordinator update; requires affine local rows. */
SolveReport run_forb_alternative(const MsGnep& ms, const SolveConfig& cfg);

/* Fully distributed driver: per-agent multiplier copies and consensus
 * auxiliaries, with the (lambda, nu) exchange routed through synchronous
 * neighbor rounds. */
SolveReport run_distributed(const MsGnep& ms, const CommGraph& graph, const SolveConfig& cfg);

/* Trace CSV: header iter,residual_inf,coupling_violation,local_violation
 * [,lyapunov], one row per recorded iteration, 17 significant digits. */
void write_trace_csv(const std::string& path, const SolveReport& report);

const char* to_string(SolveStatus s);

}  // namespace msgne
