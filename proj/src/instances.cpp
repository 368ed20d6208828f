#include "msgne/instances.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace msgne {

namespace {

ActionBlock binary_block() {
    ActionBlock blk;
    blk.actions = {IVec::Constant(1, 0), IVec::Constant(1, 1)};
    return blk;
}

}  // namespace

/* ── matching pennies ──────────────────────────────────────────────── */

GmiGame make_matching_pennies() {
    GmiGame game;
    game.rho = Vec();
    for (int i = 0; i < 2; ++i) {
        AgentSpec ag;
        ag.blocks = {binary_block()};
        ag.y_set = SetDesc::free_space(0);
        ag.gc = ConstraintMap::zero_map(0, 0);
        ag.theta = Vec();
        ag.hc = ConstraintMap::zero_map(0, 0);
        // joint order (a_1, a_2) row-major; player 1 pays +1 on a match
        TensorCost cost;
        cost.values = i == 0 ? std::vector<double>{1.0, -1.0, -1.0, 1.0}
                             : std::vector<double>{-1.0, 1.0, 1.0, -1.0};
        ag.cost_d = cost;
        game.agents.push_back(std::move(ag));
    }
    return game;
}

/* ── demand-side management ────────────────────────────────────────── */

DsmInstance make_dsm_instance(std::uint64_t seed, int N, int T, int devices) {
    if (N < 1 || N > 30 || T < 2 || T > 24 || devices < 1 || devices > 4)
        throw std::invalid_argument("make_dsm_instance: size caps exceeded");
    Rng rng(seed);

    DsmInstance inst;
    inst.N = N;
    inst.T = T;
    inst.devices = devices;
    const int D = devices;
    const int nd = D * T;  // continuous dims per agent, device-major

    // bimodal daily shape; peak hours are where the bumps dominate
    auto bump = [](double s, double c) { return std::exp(-std::pow((s - c) / 0.08, 2)); };
    Vec shape(T);
    for (int t = 0; t < T; ++t) {
        const double s = (t + 0.5) / T;
        shape[t] = bump(s, 0.3) + bump(s, 0.75);
    }
    const double shape_max = shape.maxCoeff();
    for (int t = 0; t < T; ++t)
        if (shape[t] >= 0.5 * shape_max) inst.peak_hours.push_back(t);

    inst.inflexible = Mat(N, T);
    for (int i = 0; i < N; ++i) {
        const double base = rng.uniform(50.0, 200.0);
        for (int t = 0; t < T; ++t)
            inst.inflexible(i, t) = base * (1.0 + 1.5 * shape[t]) * rng.uniform(0.9, 1.1);
    }
    Vec p_total = Vec::Zero(T);
    for (int t = 0; t < T; ++t) p_total[t] = inst.inflexible.col(t).sum();

    const double p_grid_lo = 0.0;
    const double p_grid_hi = 24000.0;  // 24 kW
    const double r_t = 0.1;

    GmiGame game;
    const int n_rho = 2 * T;
    game.rho = Vec(n_rho);
    for (int t = 0; t < T; ++t) {
        game.rho[t] = p_grid_hi - p_total[t];
        game.rho[T + t] = p_total[t] - p_grid_lo;
    }

    for (int i = 0; i < N; ++i) {
        AgentSpec ag;
        std::vector<SetDesc> y_parts;
        const int n_th = 2 * nd;
        Mat Gc = Mat::Zero(n_th, nd);
        Mat Hc = Mat::Zero(n_rho, nd);

        for (int j = 0; j < D; ++j) {
            const double y_lo = rng.uniform(1.0, 18.0);
            const double y_hi = rng.uniform(30.0, 180.0);
            // daily demand prorated to the horizon, capped so the device can
            // cover it outside the peak window
            double energy = rng.uniform(160.0, 1000.0) * T / 24.0;
            energy = std::min(energy, 0.6 * y_hi * T);
            inst.y_min.push_back(y_lo);
            inst.y_max.push_back(y_hi);
            inst.energy_min.push_back(energy);

            y_parts.push_back(SetDesc::box_halfspace(Vec::Zero(T), Vec::Constant(T, y_hi),
                                                     Vec::Ones(T), energy));
            for (int t = 0; t < T; ++t) {
                ag.blocks.push_back(binary_block());
                const int coord = j * T + t;
                const int row = 2 * coord;
                // y_lo * E[a] - y <= 0  and  y - y_hi * E[a] <= 0
                ag.gd_fn.push_back([y_lo, y_hi](const IVec& a) {
                    Vec g = Vec::Zero(2);
                    g[0] = y_lo * a[0];
                    g[1] = -y_hi * a[0];
                    return g;
                });
                ag.hd_fn.push_back({});
                Gc(row, coord) = -1.0;
                Gc(row + 1, coord) = 1.0;
                Hc(t, coord) = 1.0;
                Hc(T + t, coord) = -1.0;
            }
        }
        // gd_fn entries map block b to its own two rows: shift them into place
        // by wrapping with the block's row offset
        std::vector<std::function<Vec(const IVec&)>> gd_shifted;
        for (std::size_t b = 0; b < ag.gd_fn.size(); ++b) {
            auto base = ag.gd_fn[b];
            const int row = 2 * static_cast<int>(b);
            gd_shifted.push_back([base, row, n_th](const IVec& a) {
                Vec g = Vec::Zero(n_th);
                g.segment(row, 2) = base(a);
                return g;
            });
        }
        ag.gd_fn = std::move(gd_shifted);
        ag.hd_fn.clear();

        ag.y_set = D == 1 ? y_parts[0] : SetDesc::product(y_parts);
        ag.gc = ConstraintMap::affine_map(Gc);
        ag.theta = Vec::Zero(n_th);
        ag.hc = ConstraintMap::affine_map(Hc);
        ag.cost_d = ZeroCost{};
        game.agents.push_back(std::move(ag));
    }

    // gradient of J_i^c = sum_t r (P_tot,t + S_t) s_{i,t} with
    // S_t the total flexible load and s_{i,t} the agent's own load at t
    std::vector<int> y_off(N + 1, 0);
    for (int i = 0; i < N; ++i) y_off[i + 1] = y_off[i] + nd;
    for (int i = 0; i < N; ++i) {
        game.agents[i].cost_c.affine_grad = true;
        game.agents[i].cost_c.grad = [=](const Vec& y_all) {
            Vec s_total = Vec::Zero(T);
            for (int k = 0; k < N; ++k)
                for (int j = 0; j < D; ++j) s_total += y_all.segment(y_off[k] + j * T, T);
            Vec s_own = Vec::Zero(T);
            for (int j = 0; j < D; ++j) s_own += y_all.segment(y_off[i] + j * T, T);
            Vec grad(nd);
            for (int j = 0; j < D; ++j)
                for (int t = 0; t < T; ++t)
                    grad[j * T + t] = r_t * (p_total[t] + s_total[t] + s_own[t]);
            return grad;
        };
    }

    inst.game = std::move(game);
    return inst;
}

/* ── networked Cournot ─────────────────────────────────────────────── */

CournotInstance make_cournot_instance(std::uint64_t seed, int N, int M) {
    if (N < 2 || N > 30 || M < 1 || M > 10)
        throw std::invalid_argument("make_cournot_instance: size caps exceeded");
    Rng rng(seed);

    CournotInstance inst;
    inst.N = N;
    inst.M = M;
    inst.q = Vec(N);

    Vec d(M), p_bar(M), cap(M), y_lo(M);
    for (int v = 0; v < M; ++v) {
        d[v] = rng.uniform(1.0, 2.0);
        p_bar[v] = rng.uniform(10.0, 20.0);
        cap[v] = rng.uniform(1.0, 2.0) * static_cast<double>(N) / M + 0.5;
        y_lo[v] = rng.uniform(0.05, 0.1);
    }

    GmiGame game;
    game.rho = cap;

    std::vector<Vec> c_lin(N);
    std::vector<double> y_hi(N);
    for (int i = 0; i < N; ++i) {
        inst.q[i] = rng.uniform(1.0, 8.0);
        c_lin[i] = rng.uniform_vec(M, 1.0, 4.0);
        y_hi[i] = rng.uniform(1.0, 2.0);
        const int nu_bar = rng.uniform_int(1, M);

        AgentSpec ag;
        ActionBlock blk;
        blk.actions = enumerate_actions(M, [nu_bar](const IVec& a) { return a.sum() <= nu_bar; });
        ag.blocks = {blk};
        const Mat Ai = blk.action_matrix();

        ag.y_set = SetDesc::box_halfspace(Vec::Zero(M), Vec::Constant(M, y_hi[i]),
                                          Vec::Constant(M, -1.0), -y_hi[i]);

        // minimum bids and production cap tied to participation
        Mat Gd(2 * M, blk.m());
        Gd.topRows(M) = y_lo.asDiagonal() * Ai;
        Gd.bottomRows(M) = -y_hi[i] * Ai;
        Mat Gc(2 * M, M);
        Gc.topRows(M) = -Mat::Identity(M, M);
        Gc.bottomRows(M) = Mat::Identity(M, M);
        ag.Gd_pre = {Gd};
        ag.gc = ConstraintMap::affine_map(Gc);
        ag.theta = Vec::Zero(2 * M);

        ag.hc = ConstraintMap::affine_map(Mat::Identity(M, M));
        ag.cost_d = ZeroCost{};
        game.agents.push_back(std::move(ag));
    }

    for (int i = 0; i < N; ++i) {
        const double qi = inst.q[i];
        const Vec ci = c_lin[i];
        game.agents[i].cost_c.affine_grad = true;
        game.agents[i].cost_c.grad = [=](const Vec& y_all) {
            Vec agg = Vec::Zero(M);
            for (int k = 0; k < N; ++k) agg += y_all.segment(k * M, M);
            const Vec yi = y_all.segment(i * M, M);
            return Vec(qi * yi + ci + d.cwiseProduct(yi) + d.cwiseProduct(agg) - p_bar);
        };
    }

    inst.game = std::move(game);
    return inst;
}

/* ── discrete-flow control ─────────────────────────────────────────── */

FlowInstance make_flow_instance(std::uint64_t seed, int N, int L) {
    if (N < 2 || N > 200 || L < 1 || L > 100)
        throw std::invalid_argument("make_flow_instance: size caps exceeded");
    Rng rng(seed);

    FlowInstance inst;
    inst.N = N;
    inst.L = L;

    std::vector<std::vector<int>> users_of(L);
    inst.links_of.resize(N);
    for (int i = 0; i < N; ++i) {
        inst.a_bar.push_back(rng.uniform_int(1, 2));
        for (int l = 0; l < L; ++l)
            if (rng.uniform() < 0.4) inst.links_of[i].push_back(l);
        if (inst.links_of[i].empty()) inst.links_of[i].push_back(rng.uniform_int(0, L - 1));
        for (int l : inst.links_of[i]) users_of[l].push_back(i);
    }

    Vec q_l(L), b_l(L), rho(L);
    for (int l = 0; l < L; ++l) {
        double u_max = 0.0;
        for (int i : users_of[l]) u_max += inst.a_bar[i];
        q_l[l] = rng.uniform(1.0, 2.0);
        rho[l] = std::max(1.0, std::round(0.6 * u_max));
        b_l[l] = u_max - rho[l] + 3.0 + rng.uniform(0.0, 1.0);  // denominator stays >= 3 on the box
    }
    inst.q_link = q_l;
    inst.b_link = b_l;
    inst.capacity = rho;

    // certified Lipschitz bound of the congestion pseudogradient: the
    // per-link curvature 2 q_l / d_l^3 is largest at the box corner, so
    // lambda_max of the worst-case interaction matrix bounds the Jacobian
    Mat curv = Mat::Zero(N, N);
    for (int l = 0; l < L; ++l) {
        double d_min = b_l[l] + rho[l];
        for (int i : users_of[l]) d_min -= inst.a_bar[i];
        const double coeff = 2.0 * q_l[l] / (d_min * d_min * d_min);
        for (int i : users_of[l])
            for (int j : users_of[l]) curv(i, j) += coeff;
    }

    GmiGame game;
    game.rho = rho;

    for (int i = 0; i < N; ++i) {
        const int abar = inst.a_bar[i];
        AgentSpec ag;
        ActionBlock blk;
        blk.actions = enumerate_actions_box(IVec::Zero(1), IVec::Constant(1, abar), {});
        ag.blocks = {blk};
        Vec A_row = blk.action_matrix().row(0);

        ag.y_set = SetDesc::box(Vec::Zero(1), Vec::Constant(1, static_cast<double>(abar)));

        // relaxed equality E[a_i] = y_i
        Mat Gd(2, blk.m());
        Gd.row(0) = A_row.transpose();
        Gd.row(1) = -A_row.transpose();
        Mat Gc(2, 1);
        Gc << -1.0, 1.0;
        ag.Gd_pre = {Gd};
        ag.gc = ConstraintMap::affine_map(Gc);
        ag.theta = Vec::Zero(2);

        // link capacities act on the expected integer flow
        Mat Hd = Mat::Zero(L, blk.m());
        for (int l : inst.links_of[i]) Hd.row(l) = A_row.transpose();
        ag.Hd_pre = {Hd};
        ag.hc = ConstraintMap::zero_map(L, 1);

        const double di = rng.uniform(0.5, 1.5);
        const double ei = rng.uniform(1.0, 2.0);
        OwnSmoothCost own;
        own.value = [di, ei](double a) { return di * std::log(ei * (1.0 + a)); };
        own.deriv = [di](double a) { return di / (1.0 + a); };
        ag.cost_d = own;
        game.agents.push_back(std::move(ag));
    }

    // normalize the coupling rows so the dual operator norm stays moderate;
    // the feasible set is unchanged
    for (int l = 0; l < L; ++l) {
        double sq = 0.0;
        for (int i = 0; i < N; ++i) sq += game.agents[i].Hd_pre[0].row(l).squaredNorm();
        const double norm = std::sqrt(sq);
        if (norm == 0.0) continue;
        for (int i = 0; i < N; ++i) game.agents[i].Hd_pre[0].row(l) /= norm;
        game.rho[l] /= norm;
    }

    // congestion cost on the continuous copies: each agent's gradient is
    // sum over its links of q_l / (b_l + rho_l - S_l)^2; the raw capacities
    // enter here, independent of the row normalization above
    auto links_of = inst.links_of;
    for (int i = 0; i < N; ++i) {
        game.agents[i].cost_c.affine_grad = false;
        game.agents[i].cost_c.grad = [=](const Vec& y_all) {
            Vec s = Vec::Zero(L);
            for (int k = 0; k < N; ++k)
                for (int l : links_of[k]) s[l] += y_all[k];
            double g = 0.0;
            for (int l : links_of[i]) {
                const double denom = b_l[l] + rho[l] - s[l];
                g += q_l[l] / (denom * denom);
            }
            return Vec::Constant(1, g);
        };
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(curv);
    game.fc_lipschitz_hint = es.eigenvalues().maxCoeff();

    inst.game = std::move(game);
    return inst;
}

/* ── piecewise-affine reformulation ────────────────────────────────── */

namespace {

void check_regions(const PwaAgent& ag) {
    const int ny = static_cast<int>(ag.y_lower.size());
    if (ag.regions.empty()) throw std::invalid_argument("reformulate_pwa: agent has no regions");
    double vol_box = 1.0, vol_sum = 0.0;
    for (int k = 0; k < ny; ++k) vol_box *= ag.y_upper[k] - ag.y_lower[k];
    for (std::size_t j = 0; j < ag.regions.size(); ++j) {
        const auto& r = ag.regions[j];
        if (r.lower.size() != ny || r.upper.size() != ny || r.c.size() != ny)
            throw std::invalid_argument("reformulate_pwa: region dimension mismatch");
        if ((r.lower.array() < ag.y_lower.array() - 1e-12).any() ||
            (r.upper.array() > ag.y_upper.array() + 1e-12).any())
            throw std::invalid_argument("reformulate_pwa: region leaves the bounding box");
        double vol = 1.0;
        for (int k = 0; k < ny; ++k) vol *= r.upper[k] - r.lower[k];
        vol_sum += vol;
        for (std::size_t l = j + 1; l < ag.regions.size(); ++l) {
            bool overlap = true;
            for (int k = 0; k < ny; ++k)
                overlap = overlap && std::max(r.lower[k], ag.regions[l].lower[k]) <
                                         std::min(r.upper[k], ag.regions[l].upper[k]);
            if (overlap) throw std::invalid_argument("reformulate_pwa: overlapping regions");
        }
    }
    // the regions may be separated by the strictness gaps only
    const double cover_tol = 1e-3 * std::max(vol_box, 1.0) + 1e-9;
    if (vol_sum < vol_box - cover_tol) throw std::invalid_argument("reformulate_pwa: regions do not cover Y");
}

}  // namespace

GmiGame reformulate_pwa(const PwaGameSpec& spec) {
    const int N = static_cast<int>(spec.agents.size());
    const double eps = spec.eps_tol;
    if (!(eps > 0.0)) throw std::invalid_argument("reformulate_pwa: tolerance must be positive");

    std::vector<int> ny(N), p(N), old_off(N + 1, 0), new_off(N + 1, 0);
    for (int i = 0; i < N; ++i) {
        check_regions(spec.agents[i]);
        ny[i] = static_cast<int>(spec.agents[i].y_lower.size());
        p[i] = static_cast<int>(spec.agents[i].regions.size());
        old_off[i + 1] = old_off[i] + ny[i];
        new_off[i + 1] = new_off[i] + ny[i] + p[i];
    }
    auto to_old_layout = [=](const Vec& y_new) {
        Vec y_old(old_off[N]);
        for (int k = 0; k < N; ++k) y_old.segment(old_off[k], ny[k]) = y_new.segment(new_off[k], ny[k]);
        return y_old;
    };

    GmiGame game;
    game.rho = spec.rho;
    const int n_rho = game.n_rho();

    for (int i = 0; i < N; ++i) {
        const auto& src = spec.agents[i];
        const int n_y = ny[i];
        const int pi = p[i];
        const int nv = n_y + pi;        // (y, z)
        const int rows = (4 * n_y + 7) * pi;
        const int m_cols = 6 * pi;      // three binary blocks per region, two columns each

        AgentSpec ag;
        for (int j = 0; j < 3 * pi; ++j) ag.blocks.push_back(binary_block());

        Mat Gd = Mat::Zero(rows, m_cols);
        Mat Gc = Mat::Zero(rows, nv);
        Vec theta = Vec::Zero(rows);
        // column of the "on" probability of delta_j / alpha_j / beta_j
        auto col_delta = [](int j) { return 2 * j + 1; };
        auto col_alpha = [pi](int j) { return 2 * (pi + j) + 1; };
        auto col_beta = [pi](int j) { return 2 * (2 * pi + j) + 1; };

        Vec z_lo(pi), z_hi(pi);
        int r = 0;
        for (int j = 0; j < pi; ++j) {
            const auto& reg = src.regions[j];
            // big-M constants: closed-form box extrema of c'y + b
            double m_j = reg.b, M_j = reg.b;
            for (int k = 0; k < n_y; ++k) {
                m_j += reg.c[k] > 0.0 ? reg.c[k] * src.y_lower[k] : reg.c[k] * src.y_upper[k];
                M_j += reg.c[k] > 0.0 ? reg.c[k] * src.y_upper[k] : reg.c[k] * src.y_lower[k];
            }
            z_lo[j] = std::min(0.0, m_j) - 1.0;
            z_hi[j] = std::max(0.0, M_j) + 1.0;

            for (int k = 0; k < n_y; ++k) {
                // upper-bound activation: y - ub_j <= (ub - ub_j)(1 - alpha)
                Gc(r, k) = 1.0;
                Gd(r, col_alpha(j)) = src.y_upper[k] - reg.upper[k];
                theta[r++] = src.y_upper[k];
                // y - ub_j >= eps + (lb - ub_j - eps) alpha
                Gc(r, k) = -1.0;
                Gd(r, col_alpha(j)) = src.y_lower[k] - reg.upper[k] - eps;
                theta[r++] = -reg.upper[k] - eps;
                // lower-bound activation: -y + lb_j <= (-lb + lb_j)(1 - beta)
                Gc(r, k) = -1.0;
                Gd(r, col_beta(j)) = reg.lower[k] - src.y_lower[k];
                theta[r++] = -src.y_lower[k];
                // -y + lb_j >= eps + (-ub + lb_j - eps) beta
                Gc(r, k) = 1.0;
                Gd(r, col_beta(j)) = reg.lower[k] - src.y_upper[k] - eps;
                theta[r++] = reg.lower[k] - eps;
            }
            // product linearization delta = alpha * beta
            Gd(r, col_alpha(j)) = -1.0;
            Gd(r, col_delta(j)) = 1.0;
            theta[r++] = 0.0;
            Gd(r, col_beta(j)) = -1.0;
            Gd(r, col_delta(j)) = 1.0;
            theta[r++] = 0.0;
            Gd(r, col_alpha(j)) = 1.0;
            Gd(r, col_beta(j)) = 1.0;
            Gd(r, col_delta(j)) = -1.0;
            theta[r++] = 1.0;
            // big-M rows for z_j = delta_j (c'y + b)
            Gd(r, col_delta(j)) = m_j;
            Gc(r, n_y + j) = -1.0;
            theta[r++] = 0.0;
            Gc(r, n_y + j) = 1.0;
            Gc.row(r).head(n_y) -= reg.c.transpose();
            Gd(r, col_delta(j)) = -m_j;
            theta[r++] = reg.b - m_j;
            Gc(r, n_y + j) = 1.0;
            Gd(r, col_delta(j)) = -M_j;
            theta[r++] = 0.0;
            Gc.row(r).head(n_y) = reg.c.transpose();
            Gd(r, col_delta(j)) = M_j;
            Gc(r, n_y + j) = -1.0;
            theta[r++] = M_j - reg.b;
        }

        Vec lo(nv), hi(nv);
        lo << src.y_lower, z_lo;
        hi << src.y_upper, z_hi;
        ag.y_set = SetDesc::box(lo, hi);

        ag.Gd_pre = {};
        // one precomputed matrix per block, sliced out of the assembled Gd
        for (int blk = 0; blk < 3 * pi; ++blk) ag.Gd_pre.push_back(Gd.middleCols(2 * blk, 2));
        ag.gc = ConstraintMap::affine_map(Gc);
        ag.theta = theta;

        if (n_rho > 0) {
            Mat Hc = Mat::Zero(n_rho, nv);
            if (src.hc.rows > 0) {
                if (!src.hc.affine) throw std::invalid_argument("reformulate_pwa: smooth coupling unsupported");
                Hc.leftCols(n_y) = src.hc.A;
            }
            ag.hc = ConstraintMap::affine_map(Hc, src.hc.rows > 0 ? src.hc.offset : Vec::Zero(n_rho));
        } else {
            ag.hc = ConstraintMap::zero_map(0, nv);
        }

        ag.cost_d = ZeroCost{};
        auto old_grad = src.smooth_cost.grad;
        ag.cost_c.affine_grad = src.smooth_cost.affine_grad;
        ag.cost_c.grad = [=](const Vec& y_all) {
            Vec out(nv);
            out.head(n_y) = old_grad ? Vec(old_grad(to_old_layout(y_all))) : Vec(Vec::Zero(n_y));
            out.tail(pi).setOnes();  // gradient of 1'z
            return out;
        };
        game.agents.push_back(std::move(ag));
    }
    game.validate();
    return game;
}

PwaInstance make_pwa_instance(std::uint64_t seed, int N, int p) {
    if (N < 1 || N > 20 || p < 1 || p > 4)
        throw std::invalid_argument("make_pwa_instance: size caps exceeded");
    Rng rng(seed);
    constexpr double gap = 1e-6;

    PwaInstance inst;
    inst.N = N;
    inst.p = p;

    PwaGameSpec spec;
    Vec q(N);
    double cap_sum = 0.0;
    for (int i = 0; i < N; ++i) {
        PwaAgent ag;
        const double width = rng.uniform(1.0, 3.0);
        ag.y_lower = Vec::Zero(1);
        ag.y_upper = Vec::Constant(1, width);
        cap_sum += width;

        std::vector<double> cuts;
        for (int j = 0; j + 1 < p; ++j) cuts.push_back(rng.uniform(0.2, 0.8) * width);
        std::sort(cuts.begin(), cuts.end());
        double lo = 0.0;
        for (int j = 0; j < p; ++j) {
            double hi = j + 1 < p ? cuts[j] : width;
            hi = std::max(hi, lo + 10 * gap);  // keep regions nondegenerate
            PwaRegion reg;
            reg.lower = Vec::Constant(1, lo);
            reg.upper = Vec::Constant(1, std::min(hi, width));
            reg.c = Vec::Constant(1, rng.uniform(-2.0, 2.0));
            reg.b = rng.uniform(-1.0, 1.0);
            ag.regions.push_back(reg);
            lo = reg.upper[0] + gap;
            if (lo >= width) {
                // fold any leftover regions into the last one
                ag.regions.back().upper[0] = width;
                break;
            }
        }
        ag.regions.back().upper[0] = width;
        q[i] = rng.uniform(1.0, 2.0);
        spec.agents.push_back(std::move(ag));
    }
    const double kappa = 0.5 / N;
    for (int i = 0; i < N; ++i) {
        const double qi = q[i];
        spec.agents[i].smooth_cost.affine_grad = true;
        spec.agents[i].smooth_cost.grad = [=](const Vec& y_all) {
            return Vec::Constant(1, qi * y_all[i] + kappa * y_all.sum());
        };
        spec.agents[i].hc = ConstraintMap::affine_map(Mat::Ones(1, 1));
    }
    spec.rho = Vec::Constant(1, 0.8 * cap_sum);
    spec.eps_tol = 1e-9;

    inst.game = reformulate_pwa(spec);
    inst.spec = std::move(spec);
    return inst;
}

}  // namespace msgne
