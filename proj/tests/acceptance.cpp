#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include "msgne/io.hpp"
#include "oracles.hpp"

using namespace msgne;

/* Acceptance runner: one line per criterion, nonzero exit when any fails. */

namespace {

int failures = 0;

void criterion(int id, const char* name, bool ok, const std::string& detail) {
    std::printf("%s  criterion %d: %-34s %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double v, const char* pattern = "%.2e") {
    char buf[48];
    std::snprintf(buf, sizeof(buf), pattern, v);
    return buf;
}

/* 1. entropy-regularized driver on matching pennies from the uniform start */
void criterion_pennies() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto ms = compile(make_matching_pennies());
    SolveConfig cfg;
    cfg.epsilon = 1e-6;
    cfg.max_iters = 50000;
    cfg.gamma = Vec::Constant(1, 0.9 * 0.25);  // 0.9 / (2 ||M||_2), ||M||_2 = 2
    const auto rep = run_bforb(ms, cfg);
    const double expl = exploitability(ms, rep.final_x);
    const double elapsed = seconds_since(t0);

    const auto grid = oracles::grid_equilibrium_2p(ms, 1e-3);
    const bool unique_anchor = (grid.x1 - Vec::Constant(2, 0.5)).lpNorm<Eigen::Infinity>() < 2e-3 &&
                               (grid.x2 - Vec::Constant(2, 0.5)).lpNorm<Eigen::Infinity>() < 2e-3;

    const bool ok = rep.status == SolveStatus::Converged && rep.iterations <= 50000 &&
                    expl <= 1e-4 && elapsed < 5.0 && unique_anchor;
    criterion(1, "matching-pennies convergence", ok,
              "exploitability " + num(expl) + ", " + std::to_string(rep.iterations) +
                  " iterations, " + num(elapsed, "%.2f") + " s");
}

/* 2. generic Euclidean engine vs the dedicated condensed driver, 200 steps */
void criterion_coincidence() {
    const auto ms = compile(make_cournot_instance(202, 5, 4).game);
    SolveConfig cfg;
    cfg.epsilon = 0.0;
    cfg.max_iters = 200;
    cfg.record_iterates = true;

    const auto alt = run_forb_alternative(ms, cfg);
    const auto problem = make_problem_S(ms, false);
    const auto layout = layout_S(ms);
    const auto gen = run_generic(problem, layout, ms, default_init(ms, layout), cfg);

    double worst = 0.0;
    const bool sized = alt.snapshots.size() == 200 && gen.snapshots.size() == 200;
    if (sized)
        for (int k = 0; k < 200; ++k)
            worst = std::max(worst,
                             (alt.snapshots[k] - gen.snapshots[k]).lpNorm<Eigen::Infinity>());
    criterion(2, "reflected-splitting coincidence", sized && worst <= 1e-10,
              "max deviation " + num(worst) + " over 200 iterations");
}

/* 3. descent quantity along a matching-pennies trajectory */
void criterion_lyapunov() {
    const auto ms = compile(make_matching_pennies());
    const auto problem = make_problem_T(ms, true);
    const auto layout = layout_T(ms);
    Vec star(4);
    star << 0.5, 0.5, 0.5, 0.5;
    Vec init(4);
    init << 0.85, 0.15, 0.3, 0.7;

    SolveConfig cfg;
    cfg.epsilon = 1e-9;
    cfg.max_iters = 100000;
    cfg.gamma = Vec::Constant(1, 0.9 * 0.25);
    cfg.omega_star = star;
    const auto rep = run_generic(problem, layout, ms, init, cfg);

    bool monotone = rep.trace.size() > 100;
    double worst_rise = 0.0, lowest = 0.0;
    for (std::size_t k = 0; k + 1 < rep.trace.size(); ++k) {
        const double v0 = rep.trace[k].lyapunov.value();
        const double v1 = rep.trace[k + 1].lyapunov.value();
        worst_rise = std::max(worst_rise, v1 - v0);
        lowest = std::min(lowest, std::min(v0, v1));
        if (v1 > v0 + 1e-9 || v0 < -1e-12) monotone = false;
    }
    criterion(3, "descent-quantity monotonicity", monotone,
              "worst rise " + num(worst_rise) + ", lowest value " + num(lowest));
}

/* 4. operator identities: consensus skew form, affine skew rows,
 *    monotonicity of the assembled forwards, consensus Lipschitz bound */
void criterion_operator_identities() {
    bool ok = true;
    std::string detail;

    {  // consensus skew form over 1000 random augmented iterates
        const auto ms = compile(make_cournot_instance(404, 4, 3).game);
        const auto graph = make_erdos(4, 0.7, 11);
        const auto lo = layout_Ttilde(ms);
        const Mat L = laplacian(graph.W);
        Rng rng(404);
        double worst = 0.0;
        for (int t = 0; t < 1000; ++t) {
            Vec w = Vec::Zero(lo.dim);
            for (int i = 0; i < ms.N; ++i) {
                w.segment(lo.lambda_i_off[i], ms.n_rho) = rng.uniform_vec(ms.n_rho, -1.0, 1.0);
                w.segment(lo.nu_off[i], ms.n_rho) = rng.uniform_vec(ms.n_rho, -1.0, 1.0);
            }
            worst = std::max(worst, std::abs(oracles::apply_T5(L, lo, w).dot(w)));
        }
        ok = ok && worst <= 1e-12;
        detail += "skew " + num(worst, "%.1e");
    }
    {  // affine skew rows of the local-multiplier operator
        const auto ms = compile(make_cournot_instance(405, 4, 3).game);
        const auto lo = layout_T(ms);
        Rng rng(405);
        double worst = 0.0;
        for (int t = 0; t < 1000; ++t) {
            const Vec w = sample_domain_point(ms, lo, rng);
            const Vec wp = sample_domain_point(ms, lo, rng);
            const double ip =
                (oracles::apply_T3(ms, lo, w) - oracles::apply_T3(ms, lo, wp)).dot(w - wp);
            worst = std::max(worst, std::abs(ip));
        }
        ok = ok && worst <= 1e-10;
        detail += ", affine rows " + num(worst, "%.1e");
    }
    {  // monotonicity of the compiled forward operators
        double min_ip = 1e300;
        for (int which = 0; which < 2; ++which) {
            const auto ms = which == 0 ? compile(make_dsm_instance(406, 5, 8).game)
                                       : compile(make_cournot_instance(406, 5, 4).game);
            const auto lo = layout_T(ms);
            Rng rng(406 + which);
            for (int t = 0; t < 500; ++t) {
                const Vec w = sample_domain_point(ms, lo, rng);
                const Vec wp = sample_domain_point(ms, lo, rng);
                Vec bw, bwp;
                eval_forward_T(ms, w, bw);
                eval_forward_T(ms, wp, bwp);
                min_ip = std::min(min_ip, (bw - bwp).dot(w - wp));
            }
        }
        ok = ok && min_ip >= -1e-10;
        detail += ", monotonicity min " + num(min_ip, "%.1e");
    }
    {  // 2 max row sum dominates the Laplacian norm
        double margin = 1e300;
        for (int t = 0; t < 100; ++t) {
            const auto g = make_erdos(3 + t % 12, 0.5, 7000 + t);
            margin =
                std::min(margin, consensus_lipschitz(g) - oracles::svd_norm(laplacian(g.W)));
        }
        ok = ok && margin >= -1e-9;
        detail += ", cns margin " + num(margin, "%.1e");
    }
    criterion(4, "operator-identity suite", ok, detail);
}

/* 5. demand-side management desk instance */
void criterion_dsm() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto inst = make_dsm_instance(505, 5, 8);
    const auto ms = compile(inst.game);
    SolveConfig cfg;
    cfg.epsilon = 1e-5;
    cfg.max_iters = 2000000;
    cfg.trace_every = 200;
    const auto rep = run_bforb(ms, cfg);
    const double elapsed = seconds_since(t0);
    const double coupling = ms.coupling_violation(rep.final_x, rep.final_y);

    // every on-probability inside the peak window strictly below the same
    // device's off-peak maximum
    bool shifts = true;
    const int T = inst.T;
    std::vector<bool> peak(T, false);
    for (int t : inst.peak_hours) peak[t] = true;
    for (int i = 0; i < inst.N; ++i) {
        const int base = ms.x_offset(i);
        double peak_max = 0.0, off_max = 0.0;
        for (int t = 0; t < T; ++t) {
            const double p_on = rep.final_x[base + 2 * t + 1];
            if (peak[t])
                peak_max = std::max(peak_max, p_on);
            else
                off_max = std::max(off_max, p_on);
        }
        if (!(peak_max < off_max)) shifts = false;
    }

    const bool ok = rep.status == SolveStatus::Converged && elapsed < 60.0 && coupling <= 1e-6 &&
                    shifts;
    criterion(5, "demand-side management desk run", ok,
              num(elapsed, "%.1f") + " s, coupling " + num(coupling, "%.1e") + ", peak-shift " +
                  (shifts ? "yes" : "no"));
}

/* 6. dual consensus of the distributed driver on the ring; the seed picks an
 * instance whose equilibrium active set pins every mixed-strategy block, so
 * the primal limit is unique and the comparison is meaningful */
void criterion_consensus() {
    const auto ms = compile(make_cournot_instance(632, 5, 4).game);
    const auto graph = make_ring(5);

    SolveConfig dcfg;
    dcfg.epsilon = 1e-6;
    dcfg.max_iters = 4000000;
    dcfg.trace_every = 1000;
    const auto dist = run_distributed(ms, graph, dcfg);

    SolveConfig cfg1;
    cfg1.epsilon = 1e-7;
    cfg1.max_iters = 4000000;
    cfg1.trace_every = 1000;
    const auto semi = run_bforb(ms, cfg1);

    double spread = 0.0;
    const auto& lo = dist.layout;
    for (int i = 0; i < ms.N; ++i)
        for (int j = i + 1; j < ms.N; ++j)
            spread = std::max(spread, (dist.final_iterate.segment(lo.lambda_i_off[i], ms.n_rho) -
                                       dist.final_iterate.segment(lo.lambda_i_off[j], ms.n_rho))
                                          .lpNorm<Eigen::Infinity>());

    Vec pd(dist.final_x.size() + dist.final_y.size());
    pd << dist.final_x, dist.final_y;
    Vec ps(pd.size());
    ps << semi.final_x, semi.final_y;
    const double primal_gap = (pd - ps).lpNorm<Eigen::Infinity>();
    const double y_gap = (dist.final_y - semi.final_y).lpNorm<Eigen::Infinity>();

    const bool ok = dist.status == SolveStatus::Converged &&
                    semi.status == SolveStatus::Converged && spread <= 1e-4 && primal_gap <= 1e-3;
    criterion(6, "distributed dual consensus", ok,
              "multiplier spread " + num(spread) + ", primal gap " + num(primal_gap) +
                  " (y part " + num(y_gap) + ")");
}

/* 7. piecewise-affine reformulation: epigraph value identity + monotone game */
void criterion_pwa() {
    bool ok = true;
    double worst_gap = 0.0, min_ip = 1e300;
    int checked = 0;
    for (int g = 0; g < 20 && ok; ++g) {
        const std::uint64_t seed = 700 + g;
        const auto inst = make_pwa_instance(seed, 2, 1 + g % 4);
        Rng rng(seed * 31 + 1);
        for (int t = 0; t < 5; ++t) {  // 10 points per game, 200 total
            for (std::size_t i = 0; i < inst.spec.agents.size(); ++i) {
                const auto& src = inst.spec.agents[i];
                const auto& rag = inst.game.agents[i];
                const int p = static_cast<int>(src.regions.size());
                const auto [Gd, Hd] = relax_constraints(rag, inst.game.n_rho());
                const int r = rng.uniform_int(0, p - 1);
                const auto& reg = src.regions[r];
                const Vec y = Vec::Constant(
                    1, reg.lower[0] + rng.uniform(0.05, 0.95) * (reg.upper[0] - reg.lower[0]));
                const double truth = reg.c[0] * y[0] + reg.b;
                const auto cost = oracles::pwa_pattern_min_cost(Gd, rag.gc.A, rag.theta, 1, p, y);
                if (!cost) {
                    ok = false;
                    break;
                }
                worst_gap = std::max(worst_gap, std::abs(*cost - truth));
                ++checked;
            }
        }
        // compiled mixed-strategy extension passes the monotonicity sampler
        const auto ms = compile(inst.game);
        const auto lo = layout_T(ms);
        const auto sample = [&](Rng& r2) { return sample_domain_point(ms, lo, r2); };
        const auto mono = monotonicity_sample(
            [&](const Vec& w) {
                Vec out;
                eval_forward_T(ms, w, out);
                return out;
            },
            sample, 50, seed);
        min_ip = std::min(min_ip, mono.min_inner_product);
    }
    ok = ok && checked >= 200 && worst_gap <= 1e-8 && min_ip >= -1e-10;
    criterion(7, "piecewise-affine reformulation", ok,
              std::to_string(checked) + " points, worst value gap " + num(worst_gap, "%.1e") +
                  ", min monotonicity " + num(min_ip, "%.1e"));
}

/* 8. discrete-flow pipeline end to end */
void criterion_flow() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto inst = make_flow_instance(808, 10, 6);
    const auto ms = compile(inst.game);
    SolveConfig cfg;
    cfg.epsilon = 1e-5;
    cfg.max_iters = 2000000;
    cfg.trace_every = 200;
    const auto rep = run_bforb(ms, cfg);
    const double elapsed = seconds_since(t0);

    const auto pure = round_to_pure(inst.game, rep.final_x);
    bool integral = pure.size() == static_cast<std::size_t>(inst.N);
    for (int i = 0; i < inst.N && integral; ++i)
        integral = pure[i].size() == 1 && pure[i][0] >= 0 && pure[i][0] <= inst.a_bar[i];

    double eq_gap = 0.0;
    for (int i = 0; i < inst.N; ++i) {
        double expected_flow = 0.0;
        for (int j = 0; j < ms.m[i]; ++j)
            expected_flow += static_cast<double>(j) * rep.final_x[ms.x_offset(i) + j];
        eq_gap = std::max(eq_gap, std::abs(expected_flow - rep.final_y[i]));
    }

    const bool ok = rep.status == SolveStatus::Converged && elapsed < 120.0 && integral &&
                    eq_gap <= 1e-4;
    criterion(8, "discrete-flow lift pipeline", ok,
              num(elapsed, "%.1f") + " s, |E[a]-v| " + num(eq_gap) +
                  (integral ? "" : ", rounding broken"));
}

/* 9. mirror-map micro-suite */
void criterion_mirror() {
    Rng rng(909);
    bool ok = true;
    double worst_sum = 0.0;
    for (int t = 0; t < 100000 && ok; ++t) {
        const int m = rng.uniform_int(2, 8);
        const Vec x = rng.simplex_point(m);
        const double gamma = rng.uniform(1e-3, 2.0);
        const Vec d = rng.uniform_vec(m, -700.0 / gamma, 700.0 / gamma);
        const Vec out = mirror_step_simplex(x, d, gamma);
        if (!out.allFinite() || out.minCoeff() <= 0.0) ok = false;
        worst_sum = std::max(worst_sum, std::abs(out.sum() - 1.0));
    }
    ok = ok && worst_sum <= 1e-12;

    // exact shift invariance on representable inputs
    bool shift_exact = true;
    for (int t = 0; t < 1000 && shift_exact; ++t) {
        const int m = rng.uniform_int(2, 6);
        const Vec x = rng.simplex_point(m);
        Vec d(m);
        for (int j = 0; j < m; ++j) d[j] = rng.uniform_int(-4096, 4096) * 0x1.0p-11;
        const double c = rng.uniform_int(-256, 256) * 0x1.0p-5;
        const Vec a = mirror_step_simplex(x, d, 1.25);
        const Vec b = mirror_step_simplex(x, Vec(d.array() + c), 1.25);
        for (int j = 0; j < m; ++j)
            if (a[j] != b[j]) shift_exact = false;
    }
    ok = ok && shift_exact;
    criterion(9, "mirror-map micro-suite", ok,
              "worst simplex defect " + num(worst_sum, "%.1e") + ", shift invariance " +
                  (shift_exact ? "exact" : "broken"));
}

}  // namespace

int main() {
    apply_thread_cap();
    criterion_pennies();
    criterion_coincidence();
    criterion_lyapunov();
    criterion_operator_identities();
    criterion_dsm();
    criterion_consensus();
    criterion_pwa();
    criterion_flow();
    criterion_mirror();
    if (failures == 0)
        std::printf("all acceptance criteria passed\n");
    else
        std::printf("%d acceptance criteria FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
