#include "msgne/solvers.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace msgne {

namespace {

constexpr double kDivergenceCap = 1e12;

bool is_finite(const Vec& v) { return v.allFinite(); }

Vec resolve_gammas(const SplitProblem& problem, const SolveConfig& cfg, int n_agents) {
    const double ell = problem.lipschitz.ell_B;
    const double bound = ell > 0.0 ? step_size_bound(ell, 1.0) : std::numeric_limits<double>::infinity();
    const double fallback = std::isfinite(bound) ? cfg.step_fraction * bound : 1.0;

    Vec g(problem.n_step_groups);
    const bool has_coordinator = problem.n_step_groups == n_agents + 1;
    for (int i = 0; i < n_agents; ++i) {
        double gi = fallback;
        if (cfg.gamma.has_value()) {
            if (cfg.gamma->size() == 1)
                gi = (*cfg.gamma)[0];
            else if (cfg.gamma->size() == n_agents)
                gi = (*cfg.gamma)[i];
            else
                throw std::invalid_argument("SolveConfig: gamma must have one entry or one per agent");
        }
        g[i] = gi;
    }
    if (has_coordinator)
        g[n_agents] = cfg.zeta.value_or(cfg.gamma.has_value() && n_agents > 0 ? g[0] : fallback);

    for (int i = 0; i < g.size(); ++i) {
        if (!(g[i] > 0.0)) throw std::invalid_argument("SolveConfig: step sizes must be positive");
        if (cfg.check_step_sizes && std::isfinite(bound) && g[i] >= bound)
            throw std::invalid_argument("SolveConfig: step size " + std::to_string(g[i]) +
                                        " violates the bound " + std::to_string(bound));
    }
    return g;
}

void backward_blocks(const SplitProblem& problem, const Vec& gamma_groups, const Vec& w,
                     const Vec& reflected, Vec& w_next) {
    const int nb = static_cast<int>(problem.blocks.size());
#pragma omp parallel for schedule(dynamic)
    for (int bi = 0; bi < nb; ++bi) {
        const auto& blk = problem.blocks[bi];
        const double g = gamma_groups[blk.step_group];
        const auto w_b = w.segment(blk.offset, blk.size);
        const auto d_b = reflected.segment(blk.offset, blk.size);
        if (blk.reg == RegKind::GibbsShannon) {
            w_next.segment(blk.offset, blk.size) = mirror_step_simplex(w_b, d_b, g);
        } else if (blk.poly) {
            const auto pr = project_polytope(*blk.poly, w_b - g * d_b, problem.polytope_tol);
            if (!pr.converged)
                throw std::runtime_error("projection onto the local set failed, residual " +
                                         std::to_string(pr.residual));
            w_next.segment(blk.offset, blk.size) = pr.point;
        } else {
            w_next.segment(blk.offset, blk.size) = project_euclidean(blk.set, w_b - g * d_b);
        }
    }
}

struct ViolationAudit {
    double coupling = 0.0;
    double local = 0.0;
};

ViolationAudit audit(const MsGnep& ms, const Layout& layout, const Vec& w) {
    ViolationAudit v;
    if (ms.N == 0) return v;
    const Vec x = layout.stacked_x(w);
    const Vec y = layout.stacked_y(w);
    v.coupling = ms.coupling_violation(x, y);
    v.local = ms.local_violation(x, y);
    return v;
}

}  // namespace

void bforb_step(const SplitProblem& problem, const Vec& gamma_groups, const Vec& w,
                const Vec& B_prev, Vec& w_next, Vec& B_w) {
    if (w.size() != problem.dim || B_prev.size() != problem.dim)
        throw std::invalid_argument("bforb_step: dimension mismatch");
    problem.forward(w, B_w);
    const Vec reflected = 2.0 * B_w - B_prev;
    w_next.resize(problem.dim);
    backward_blocks(problem, gamma_groups, w, reflected, w_next);
}

double lyapunov_diagnostic(const SplitProblem& problem, const Vec& gamma_groups, const Vec& w_star,
                           const Vec& w_k, const Vec& w_prev, const Vec& B_prev, const Vec& B_k) {
    double gmax = 0.0;
    double dist = 0.0;
    for (const auto& blk : problem.blocks) {
        const double g = gamma_groups[blk.step_group];
        gmax = std::max(gmax, g);
        RegularizerSpec one{{{blk.reg, blk.size}}, 1.0};
        dist += bregman_distance(one, w_star.segment(blk.offset, blk.size),
                                 w_k.segment(blk.offset, blk.size)) /
                g;
    }
    const double sigma_hat = 1.0 / gmax;
    return dist + 0.25 * sigma_hat * (w_k - w_prev).squaredNorm() + (B_k - B_prev).dot(w_star - w_k);
}

double lyapunov_diagnostic(const SplitProblem& problem, const Vec& gamma_groups, const Vec& w_star,
                           const Vec& w_k, const Vec& w_prev, const Vec& B_prev) {
    Vec B_k;
    problem.forward(w_k, B_k);
    return lyapunov_diagnostic(problem, gamma_groups, w_star, w_k, w_prev, B_prev, B_k);
}

Vec default_init(const MsGnep& ms, const Layout& layout) {
    Vec w = Vec::Zero(layout.dim);
    for (int i = 0; i < ms.N; ++i) {
        int off = layout.x_off[i];
        for (int mb : ms.block_dims[i]) {
            w.segment(off, mb).setConstant(1.0 / mb);
            off += mb;
        }
        if (layout.y_dim[i] > 0)
            w.segment(layout.y_off[i], layout.y_dim[i]) = reference_point(ms.y_sets[i]);
    }
    return w;  // multipliers and consensus auxiliaries start at zero
}

SolveReport run_generic(const SplitProblem& problem, const Layout& layout, const MsGnep& ms,
                        const Vec& init, const SolveConfig& cfg) {
    apply_thread_cap();
    if (init.size() != problem.dim) throw std::invalid_argument("run_generic: bad initial iterate");
    const Vec gammas = resolve_gammas(problem, cfg, ms.N);

    SolveReport rep;
    rep.variant = problem.variant;
    rep.layout = layout;
    rep.gamma_groups = gammas;
    rep.lipschitz = problem.lipschitz;

    Vec w_prev = init;
    Vec w = init;
    Vec B_prev(problem.dim);
    problem.forward(w, B_prev);  // w^0 = w^{-1}, so B_prev caches B(w^{-1})

    Vec w_next(problem.dim), B_w(problem.dim);
    SolveStatus status = SolveStatus::MaxIters;
    int iters = 0;
    for (int k = 0; k < cfg.max_iters; ++k) {
        bforb_step(problem, gammas, w, B_prev, w_next, B_w);
        iters = k + 1;

        if (!is_finite(B_w) || !is_finite(w_next) ||
            w_next.lpNorm<Eigen::Infinity>() > kDivergenceCap) {
            status = SolveStatus::Diverged;
            break;
        }

        const double residual = (w_next - w).lpNorm<Eigen::Infinity>();
        const bool done = residual <= cfg.epsilon;
        if (k % cfg.trace_every == 0 || done || k + 1 == cfg.max_iters) {
            TraceRow row;
            row.iter = k;
            row.residual_inf = residual;
            const auto v = audit(ms, layout, w_next);
            row.coupling_violation = v.coupling;
            row.local_violation = v.local;
            if (cfg.omega_star.has_value())
                row.lyapunov =
                    lyapunov_diagnostic(problem, gammas, *cfg.omega_star, w, w_prev, B_prev, B_w);
            rep.trace.push_back(row);
            if (cfg.record_iterates) rep.snapshots.push_back(w_next);
        }

        w_prev.swap(w);
        w.swap(w_next);
        B_prev.swap(B_w);

        if (done) {
            status = SolveStatus::Converged;
            break;
        }
    }

    rep.status = status;
    rep.iterations = iters;
    rep.final_iterate = w;
    rep.final_x = layout.stacked_x(w);
    rep.final_y = layout.stacked_y(w);
    return rep;
}

SolveReport run_bforb(const MsGnep& ms, const SolveConfig& cfg) {
    const auto problem = make_problem_T(ms, true);
    const auto layout = layout_T(ms);
    return run_generic(problem, layout, ms, default_init(ms, layout), cfg);
}

/* Dedicated condensed driver: per-agent joint projection onto Omega_i plus
 * the coordinator multiplier step, written out as the update recursion
 * rather than through the block dispatcher. */
SolveReport run_forb_alternative(const MsGnep& ms, const SolveConfig& cfg) {
    apply_thread_cap();
    if (!ms.constraints_affine)
        throw std::invalid_argument("run_forb_alternative: affine local constraints required");
    const auto problem = make_problem_S(ms, false);
    const auto layout = layout_S(ms);
    const Vec gammas = resolve_gammas(problem, cfg, ms.N);

    // the per-agent polytopes assembled once
    std::vector<const PolytopeDesc*> omegas(ms.N, nullptr);
    for (const auto& blk : problem.blocks)
        if (blk.poly) omegas[blk.step_group] = blk.poly.get();

    SolveReport rep;
    rep.variant = Variant::Alternative;
    rep.layout = layout;
    rep.gamma_groups = gammas;
    rep.lipschitz = problem.lipschitz;

    Vec w_prev = default_init(ms, layout);
    Vec w = w_prev;
    Vec xi_prev(problem.dim);
    problem.forward(w, xi_prev);

    Vec w_next(problem.dim), xi(problem.dim);
    SolveStatus status = SolveStatus::MaxIters;
    int iters = 0;
    for (int k = 0; k < cfg.max_iters; ++k) {
        problem.forward(w, xi);
        const Vec reflected = 2.0 * xi - xi_prev;

#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < ms.N; ++i) {
            const int off = layout.x_off[i];
            const int size = ms.m[i] + ms.n[i];
            const Vec target = w.segment(off, size) - gammas[i] * reflected.segment(off, size);
            const auto pr = project_polytope(*omegas[i], target, cfg.polytope_tol);
            if (!pr.converged)
                throw std::runtime_error("run_forb_alternative: projection onto Omega failed, residual " +
                                         std::to_string(pr.residual));
            w_next.segment(off, size) = pr.point;
        }
        if (ms.n_rho > 0) {
            const auto lam = w.segment(layout.lambda_off, ms.n_rho);
            const Vec target = lam - gammas[ms.N] * reflected.segment(layout.lambda_off, ms.n_rho);
            w_next.segment(layout.lambda_off, ms.n_rho) = target.cwiseMax(0.0);
        }
        iters = k + 1;

        if (!is_finite(xi) || !is_finite(w_next) ||
            w_next.lpNorm<Eigen::Infinity>() > kDivergenceCap) {
            status = SolveStatus::Diverged;
            break;
        }

        const double residual = (w_next - w).lpNorm<Eigen::Infinity>();
        const bool done = residual <= cfg.epsilon;
        if (k % cfg.trace_every == 0 || done || k + 1 == cfg.max_iters) {
            TraceRow row;
            row.iter = k;
            row.residual_inf = residual;
            const auto v = audit(ms, layout, w_next);
            row.coupling_violation = v.coupling;
            row.local_violation = v.local;
            if (cfg.omega_star.has_value())
                row.lyapunov = lyapunov_diagnostic(problem, gammas, *cfg.omega_star, w, w_prev,
                                                   xi_prev, xi);
            rep.trace.push_back(row);
            if (cfg.record_iterates) rep.snapshots.push_back(w_next);
        }

        w_prev.swap(w);
        w.swap(w_next);
        xi_prev.swap(xi);

        if (done) {
            status = SolveStatus::Converged;
            break;
        }
    }

    rep.status = status;
    rep.iterations = iters;
    rep.final_iterate = w;
    rep.final_x = layout.stacked_x(w);
    rep.final_y = layout.stacked_y(w);
    return rep;
}

/* Per-agent state of the distributed driver. Everything an agent reads about
 * the dual consensus comes from the synchronous rounds; (x, y) follow the
 * full-decision-information exchange. */
SolveReport run_distributed(const MsGnep& ms, const CommGraph& graph, const SolveConfig& cfg) {
    apply_thread_cap();
    graph.validate();
    if (graph.n != ms.N) throw std::invalid_argument("run_distributed: graph size mismatch");
    const auto problem = make_problem_Ttilde(ms, graph, true);
    const auto layout = layout_Ttilde(ms);
    const Vec gammas = resolve_gammas(problem, cfg, ms.N);
    const int nr = ms.n_rho;

    SolveReport rep;
    rep.variant = Variant::Distributed;
    rep.layout = layout;
    rep.gamma_groups = gammas;
    rep.lipschitz = problem.lipschitz;

    Vec w = default_init(ms, layout);
    Vec w_prev = w;

    SyncExchange exchange(graph);
    // round 0 exchanges the initial dual copies
    auto payload = [&](const Vec& state, int i) {
        Vec pkg(2 * nr);
        pkg.head(nr) = state.segment(layout.lambda_i_off[i], nr);
        pkg.tail(nr) = state.segment(layout.nu_off[i], nr);
        return pkg;
    };
    for (int i = 0; i < ms.N; ++i) exchange.deposit(i, payload(w, i));
    auto delivered = exchange.exchange();

    // agent-local forward rows; graph terms use only delivered values
    auto agent_forward = [&](const Vec& state, int i, Vec& out,
                             const std::vector<std::vector<std::pair<int, Vec>>>& mail) {
        const Vec x_all = state.head(ms.m_total);
        const Vec y_all = state.segment(ms.m_total, ms.n_total);
        const auto x_i = state.segment(layout.x_off[i], layout.x_dim[i]);
        const Vec mu_i = state.segment(layout.mu_off[i], layout.mu_dim[i]);
        const auto lam_i = state.segment(layout.lambda_i_off[i], nr);
        const auto nu_i = state.segment(layout.nu_off[i], nr);

        Vec xrow = ms.f_agent(i, x_all);
        if (layout.mu_dim[i] > 0) xrow += ms.Gd[i].transpose() * mu_i;
        if (nr > 0) xrow += ms.Hd[i].transpose() * lam_i;
        out.segment(layout.x_off[i], layout.x_dim[i]) = xrow;

        if (layout.y_dim[i] > 0) {
            const Vec y_i = state.segment(layout.y_off[i], layout.y_dim[i]);
            Vec yrow = ms.fc_agent(i, y_all);
            if (layout.mu_dim[i] > 0) yrow += ms.gc[i].jac(y_i).transpose() * mu_i;
            if (nr > 0 && ms.hc[i].rows > 0) yrow += ms.hc[i].jac(y_i).transpose() * lam_i;
            out.segment(layout.y_off[i], layout.y_dim[i]) = yrow;
        }

        if (layout.mu_dim[i] > 0) {
            Vec murow = ms.theta[i] - ms.Gd[i] * x_i;
            if (layout.y_dim[i] > 0) murow -= ms.gc[i].eval(state.segment(layout.y_off[i], layout.y_dim[i]));
            out.segment(layout.mu_off[i], layout.mu_dim[i]) = murow;
        }

        if (nr > 0) {
            Vec lam_row = ms.rho / static_cast<double>(ms.N) - ms.Hd[i] * x_i;
            if (layout.y_dim[i] > 0 && ms.hc[i].rows > 0)
                lam_row -= ms.hc[i].eval(state.segment(layout.y_off[i], layout.y_dim[i]));
            Vec nu_row = Vec::Zero(nr);
            for (const auto& [j, pkg] : mail[i]) {
                const double wij = graph.W(i, j);
                lam_row -= wij * (nu_i - pkg.tail(nr));
                nu_row += wij * (lam_i - pkg.head(nr));
            }
            out.segment(layout.lambda_i_off[i], nr) = lam_row;
            out.segment(layout.nu_off[i], nr) = nu_row;
        }
    };

    Vec B_prev(layout.dim), B_w(layout.dim), w_next(layout.dim);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < ms.N; ++i) agent_forward(w, i, B_prev, delivered);

    SolveStatus status = SolveStatus::MaxIters;
    int iters = 0;
    for (int k = 0; k < cfg.max_iters; ++k) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < ms.N; ++i) agent_forward(w, i, B_w, delivered);
        const Vec reflected = 2.0 * B_w - B_prev;
        backward_blocks(problem, gammas, w, reflected, w_next);
        iters = k + 1;

        if (!is_finite(B_w) || !is_finite(w_next) ||
            w_next.lpNorm<Eigen::Infinity>() > kDivergenceCap) {
            status = SolveStatus::Diverged;
            break;
        }

        // neighbors receive the updated dual copies for the next round
        for (int i = 0; i < ms.N; ++i) exchange.deposit(i, payload(w_next, i));
        delivered = exchange.exchange();

        const double residual = (w_next - w).lpNorm<Eigen::Infinity>();
        const bool done = residual <= cfg.epsilon;
        if (k % cfg.trace_every == 0 || done || k + 1 == cfg.max_iters) {
            TraceRow row;
            row.iter = k;
            row.residual_inf = residual;
            const auto v = audit(ms, layout, w_next);
            row.coupling_violation = v.coupling;
            row.local_violation = v.local;
            if (cfg.omega_star.has_value())
                row.lyapunov =
                    lyapunov_diagnostic(problem, gammas, *cfg.omega_star, w, w_prev, B_prev, B_w);
            rep.trace.push_back(row);
            if (cfg.record_iterates) rep.snapshots.push_back(w_next);
        }

        w_prev.swap(w);
        w.swap(w_next);
        B_prev.swap(B_w);

        if (done) {
            status = SolveStatus::Converged;
            break;
        }
    }

    rep.status = status;
    rep.iterations = iters;
    rep.final_iterate = w;
    rep.final_x = layout.stacked_x(w);
    rep.final_y = layout.stacked_y(w);
    return rep;
}

void write_trace_csv(const std::string& path, const SolveReport& report) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_trace_csv: cannot open " + path);
    const bool with_lyap = !report.trace.empty() && report.trace.front().lyapunov.has_value();
    out << "iter,residual_inf,coupling_violation,local_violation";
    if (with_lyap) out << ",lyapunov";
    out << "\n";
    char buf[64];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    for (const auto& row : report.trace) {
        out << row.iter << "," << fmt(row.residual_inf) << "," << fmt(row.coupling_violation) << ","
            << fmt(row.local_violation);
        if (with_lyap) out << "," << fmt(row.lyapunov.value_or(0.0));
        out << "\n";
    }
}

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged:
            return "converged";
        case SolveStatus::MaxIters:
            return "max_iters";
        case SolveStatus::Diverged:
            return "diverged";
    }
    return "unknown";
}

}  // namespace msgne
