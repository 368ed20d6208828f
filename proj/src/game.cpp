#include "msgne/game.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <set>

namespace msgne {

int max_threads() {
    int cap = omp_get_max_threads();
    if (const char* env = std::getenv("MSGNE_THREADS")) {
        const int requested = std::atoi(env);
        if (requested > 0) cap = std::min(cap, requested);
    }
    return cap;
}

void apply_thread_cap() { omp_set_num_threads(max_threads()); }

/* ── actions ───────────────────────────────────────────────────────── */

Mat ActionBlock::action_matrix() const {
    Mat A(p(), m());
    for (int j = 0; j < m(); ++j) A.col(j) = actions[j].cast<double>();
    return A;
}

std::vector<IVec> enumerate_actions(int dim, const std::function<bool(const IVec&)>& member) {
    if (dim < 0 || dim > 20) throw std::invalid_argument("enumerate_actions: dimension out of range");
    const std::uint64_t count = 1ull << dim;
    if (count > 1000000ull)
        throw std::invalid_argument("enumerate_actions: cardinality overflow (" + std::to_string(count) + ")");
    std::vector<IVec> out;
    for (std::uint64_t k = 0; k < count; ++k) {
        IVec a(dim);
        for (int j = 0; j < dim; ++j) a[j] = static_cast<int>((k >> j) & 1u);  // component 0 fastest
        if (!member || member(a)) out.push_back(a);
    }
    return out;
}

std::vector<IVec> enumerate_actions_box(const IVec& lower, const IVec& upper,
                                        const std::function<bool(const IVec&)>& member) {
    const int dim = static_cast<int>(lower.size());
    if (upper.size() != dim) throw std::invalid_argument("enumerate_actions_box: bound size mismatch");
    std::uint64_t count = 1;
    for (int j = 0; j < dim; ++j) {
        if (upper[j] < lower[j]) throw std::invalid_argument("enumerate_actions_box: empty range");
        count *= static_cast<std::uint64_t>(upper[j] - lower[j] + 1);
        if (count > 1000000ull)
            throw std::invalid_argument("enumerate_actions_box: cardinality overflow (" +
                                        std::to_string(count) + ")");
    }
    std::vector<IVec> out;
    IVec a = lower;
    for (std::uint64_t k = 0; k < count; ++k) {
        if (!member || member(a)) out.push_back(a);
        for (int j = 0; j < dim; ++j) {  // odometer, component 0 fastest
            if (a[j] < upper[j]) {
                ++a[j];
                break;
            }
            a[j] = lower[j];
        }
    }
    return out;
}

/* ── constraint maps ───────────────────────────────────────────────── */

ConstraintMap ConstraintMap::affine_map(Mat A, Vec offset) {
    ConstraintMap m;
    m.rows = static_cast<int>(A.rows());
    if (offset.size() == 0) offset = Vec::Zero(m.rows);
    if (offset.size() != m.rows) throw std::invalid_argument("ConstraintMap: offset size mismatch");
    m.A = std::move(A);
    m.offset = std::move(offset);
    m.affine = true;
    return m;
}

ConstraintMap ConstraintMap::zero_map(int rows, int cols) {
    return affine_map(Mat::Zero(rows, cols), Vec::Zero(rows));
}

ConstraintMap ConstraintMap::smooth_map(int rows, std::function<Vec(const Vec&)> value,
                                        std::function<Mat(const Vec&)> jacobian) {
    ConstraintMap m;
    m.rows = rows;
    m.value = std::move(value);
    m.jacobian = std::move(jacobian);
    m.affine = false;
    return m;
}

Vec ConstraintMap::eval(const Vec& y_i) const {
    if (rows == 0) return Vec();
    if (affine) return A * y_i + offset;
    return value(y_i);
}

Mat ConstraintMap::jac(const Vec& y_i) const {
    if (affine) return A;
    return jacobian(y_i);
}

/* ── validation ────────────────────────────────────────────────────── */

void GmiGame::validate() const {
    const int nr = n_rho();
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const auto& ag = agents[i];
        const std::string who = "agent " + std::to_string(i);
        for (const auto& blk : ag.blocks) {
            if (blk.actions.empty()) throw std::invalid_argument(who + ": empty action block");
            std::set<std::vector<int>> seen;
            for (const auto& a : blk.actions) {
                if (a.size() != blk.actions[0].size())
                    throw std::invalid_argument(who + ": inconsistent action dimension");
                std::vector<int> key(a.data(), a.data() + a.size());
                if (!seen.insert(key).second) throw std::invalid_argument(who + ": duplicate action");
            }
        }
        if (ag.gc.rows != ag.n_theta())
            throw std::invalid_argument(who + ": g^c rows do not match theta");
        if (ag.gc.affine && ag.gc.rows > 0 && ag.gc.A.cols() != ag.n())
            throw std::invalid_argument(who + ": g^c width does not match Y_i");
        if (ag.hc.rows != nr) throw std::invalid_argument(who + ": h^c rows do not match rho");
        if (ag.hc.affine && nr > 0 && ag.hc.A.cols() != ag.n())
            throw std::invalid_argument(who + ": h^c width does not match Y_i");
        if (!ag.gd_fn.empty() && ag.gd_fn.size() != ag.blocks.size())
            throw std::invalid_argument(who + ": g^d functions must cover every block");
        if (!ag.hd_fn.empty() && ag.hd_fn.size() != ag.blocks.size())
            throw std::invalid_argument(who + ": h^d functions must cover every block");
        if (std::holds_alternative<OwnSmoothCost>(ag.cost_d)) {
            if (ag.blocks.size() != 1 || ag.blocks[0].p() != 1)
                throw std::invalid_argument(who + ": own-smooth cost requires one scalar action block");
        }
        if (std::holds_alternative<TensorCost>(ag.cost_d) || std::holds_alternative<LinearCoupledCost>(ag.cost_d)) {
            if (ag.blocks.size() != 1)
                throw std::invalid_argument(who + ": coupled discrete costs require a single action block");
        }
    }
    // tensor dimensions
    for (std::size_t i = 0; i < agents.size(); ++i) {
        if (const auto* t = std::get_if<TensorCost>(&agents[i].cost_d)) {
            std::uint64_t joint = 1;
            for (const auto& ag : agents) {
                if (ag.blocks.size() != 1)
                    throw std::invalid_argument("tensor cost requires single-block agents");
                joint *= static_cast<std::uint64_t>(ag.blocks[0].m());
            }
            if (agents.size() > 4) throw std::invalid_argument("tensor cost capped at 4 agents");
            if (joint > 1000000ull) throw std::invalid_argument("tensor cost: joint space exceeds 1e6");
            if (t->values.size() != joint)
                throw std::invalid_argument("tensor cost: value count does not match joint dimensions");
        }
    }
}

/* ── constraint relaxation ─────────────────────────────────────────── */

namespace {

Mat relax_block(const ActionBlock& blk, const std::function<Vec(const IVec&)>& fn, int rows) {
    Mat G = Mat::Zero(rows, blk.m());
    if (!fn) return G;
    for (int j = 0; j < blk.m(); ++j) {
        Vec col = fn(blk.actions[j]);
        if (col.size() != rows) throw std::invalid_argument("relax_constraints: row count mismatch");
        G.col(j) = col;
    }
    return G;
}

}  // namespace

std::pair<Mat, Mat> relax_constraints(const AgentSpec& agent, int n_rho) {
    const int n_th = agent.n_theta();
    Mat Gd = Mat::Zero(n_th, agent.m());
    Mat Hd = Mat::Zero(n_rho, agent.m());
    int off = 0;
    for (std::size_t b = 0; b < agent.blocks.size(); ++b) {
        const int mb = agent.blocks[b].m();
        if (b < agent.Gd_pre.size() && agent.Gd_pre[b].size() > 0) {
            if (agent.Gd_pre[b].rows() != n_th || agent.Gd_pre[b].cols() != mb)
                throw std::invalid_argument("relax_constraints: precomputed G^d has wrong shape");
            Gd.middleCols(off, mb) = agent.Gd_pre[b];
        } else if (!agent.gd_fn.empty()) {
            Gd.middleCols(off, mb) = relax_block(agent.blocks[b], agent.gd_fn[b], n_th);
        }
        if (b < agent.Hd_pre.size() && agent.Hd_pre[b].size() > 0) {
            if (agent.Hd_pre[b].rows() != n_rho || agent.Hd_pre[b].cols() != mb)
                throw std::invalid_argument("relax_constraints: precomputed H^d has wrong shape");
            Hd.middleCols(off, mb) = agent.Hd_pre[b];
        } else if (!agent.hd_fn.empty()) {
            Hd.middleCols(off, mb) = relax_block(agent.blocks[b], agent.hd_fn[b], n_rho);
        }
        off += mb;
    }
    return {Gd, Hd};
}

/* ── expected cost vectors ─────────────────────────────────────────── */

namespace {

std::vector<int> x_offsets(const GmiGame& game) {
    std::vector<int> off(game.agents.size() + 1, 0);
    for (std::size_t i = 0; i < game.agents.size(); ++i) off[i + 1] = off[i] + game.agents[i].m();
    return off;
}

Vec tensor_expected(const GmiGame& game, int i, const Vec& x_all, const TensorCost& cost) {
    const int N = game.n_agents();
    const auto off = x_offsets(game);
    std::vector<int> dims(N);
    for (int k = 0; k < N; ++k) dims[k] = game.agents[k].blocks[0].m();

    const int mi = dims[i];
    Vec f = Vec::Zero(mi);
    std::vector<int> idx(N, 0);
    const std::size_t joint = cost.values.size();
    for (std::size_t lin = 0; lin < joint; ++lin) {
        double w = 1.0;
        for (int k = 0; k < N; ++k)
            if (k != i) w *= x_all[off[k] + idx[k]];
        f[idx[i]] += cost.values[lin] * w;
        for (int k = N - 1; k >= 0; --k) {  // row-major, agent 0 slowest
            if (++idx[k] < dims[k]) break;
            idx[k] = 0;
        }
    }
    return f;
}

}  // namespace

Vec expected_cost_vector(const GmiGame& game, int i, const Vec& x_all) {
    const auto& ag = game.agents[i];
    const auto off = x_offsets(game);
    if (x_all.size() != off.back()) throw std::invalid_argument("expected_cost_vector: profile size mismatch");
    return std::visit(
        [&](const auto& cost) -> Vec {
            using T = std::decay_t<decltype(cost)>;
            if constexpr (std::is_same_v<T, ZeroCost>) {
                return Vec::Zero(ag.m());
            } else if constexpr (std::is_same_v<T, TensorCost>) {
                return tensor_expected(game, i, x_all, cost);
            } else if constexpr (std::is_same_v<T, LinearCoupledCost>) {
                Vec f = cost.pi_bar;
                const Mat Ai = ag.blocks[0].action_matrix();
                for (const auto& [j, M] : cost.coupling) {
                    if (j == i) continue;
                    const Mat Aj = game.agents[j].blocks[0].action_matrix();
                    f += Ai.transpose() * (M * (Aj * x_all.segment(off[j], game.agents[j].m())));
                }
                return f;
            } else {
                static_assert(std::is_same_v<T, OwnSmoothCost>);
                Vec f(ag.m());
                for (int j = 0; j < ag.m(); ++j) f[j] = cost.value(static_cast<double>(ag.blocks[0].actions[j][0]));
                return f;
            }
        },
        ag.cost_d);
}

/* ── compilation ───────────────────────────────────────────────────── */

int MsGnep::x_offset(int i) const {
    int off = 0;
    for (int k = 0; k < i; ++k) off += m[k];
    return off;
}

int MsGnep::y_offset(int i) const {
    int off = 0;
    for (int k = 0; k < i; ++k) off += n[k];
    return off;
}

int MsGnep::th_offset(int i) const {
    int off = 0;
    for (int k = 0; k < i; ++k) off += n_th[k];
    return off;
}

Vec MsGnep::Fd(const Vec& x_all) const {
    Vec out(m_total);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < N; ++i) out.segment(x_offset(i), m[i]) = f_agent(i, x_all);
    return out;
}

Vec MsGnep::Fc(const Vec& y_all) const {
    Vec out(n_total);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < N; ++i)
        if (n[i] > 0) out.segment(y_offset(i), n[i]) = fc_agent(i, y_all);
    return out;
}

Vec MsGnep::coupling_value(const Vec& x_all, const Vec& y_all) const {
    if (n_rho == 0) return Vec();
    // per-agent contributions in parallel, summed serially in agent order so
    // the result does not depend on the thread count
    Mat contrib(n_rho, N);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < N; ++i) {
        Vec c = Vec::Zero(n_rho);
        if (m[i] > 0) c += Hd[i] * x_all.segment(x_offset(i), m[i]);
        if (n[i] > 0 && hc[i].rows > 0) c += hc[i].eval(y_all.segment(y_offset(i), n[i]));
        contrib.col(i) = c;
    }
    Vec total = Vec::Zero(n_rho);
    for (int i = 0; i < N; ++i) total += contrib.col(i);
    return total;
}

double MsGnep::coupling_violation(const Vec& x_all, const Vec& y_all) const {
    if (n_rho == 0) return 0.0;
    const Vec slack = rho - coupling_value(x_all, y_all);
    return std::max(0.0, -slack.minCoeff());
}

double MsGnep::local_violation(const Vec& x_all, const Vec& y_all) const {
    double worst = 0.0;
    for (int i = 0; i < N; ++i) {
        if (n_th[i] == 0) continue;
        Vec v = -theta[i];
        if (m[i] > 0) v += Gd[i] * x_all.segment(x_offset(i), m[i]);
        if (n[i] > 0 && gc[i].rows > 0) v += gc[i].eval(y_all.segment(y_offset(i), n[i]));
        worst = std::max(worst, std::max(0.0, v.maxCoeff()));
    }
    return worst;
}

MsGnep compile(const GmiGame& game) {
    game.validate();
    auto g = std::make_shared<GmiGame>(game);

    MsGnep ms;
    ms.N = game.n_agents();
    ms.n_rho = game.n_rho();
    ms.rho = game.rho;
    ms.ell_fc_hint = game.fc_lipschitz_hint;
    ms.fd_affine = true;
    ms.fc_affine = true;
    ms.constraints_affine = true;

    for (int i = 0; i < ms.N; ++i) {
        const auto& ag = game.agents[i];
        std::vector<int> bd;
        for (const auto& blk : ag.blocks) bd.push_back(blk.m());
        ms.block_dims.push_back(bd);
        ms.m.push_back(ag.m());
        ms.n.push_back(ag.n());
        ms.n_th.push_back(ag.n_theta());
        ms.m_total += ag.m();
        ms.n_total += ag.n();
        ms.n_th_total += ag.n_theta();

        auto [Gd, Hd] = relax_constraints(ag, ms.n_rho);
        ms.Gd.push_back(std::move(Gd));
        ms.Hd.push_back(std::move(Hd));
        ms.gc.push_back(ag.gc);
        ms.hc.push_back(ag.hc);
        ms.theta.push_back(ag.theta);
        ms.y_sets.push_back(ag.y_set);

        if (!ag.gc.affine || !ag.hc.affine) ms.constraints_affine = false;
        if (ag.n() > 0 && ag.cost_c.grad && !ag.cost_c.affine_grad) ms.fc_affine = false;
        const bool tensor = std::holds_alternative<TensorCost>(ag.cost_d);
        if (tensor && ms.N > 2) ms.fd_affine = false;
    }

    ms.f_agent = [g](int i, const Vec& x_all) { return expected_cost_vector(*g, i, x_all); };
    ms.fc_agent = [g](int i, const Vec& y_all) -> Vec {
        const auto& ag = g->agents[i];
        if (ag.n() == 0) return Vec();
        if (!ag.cost_c.grad) return Vec::Zero(ag.n());
        Vec grad = ag.cost_c.grad(y_all);
        if (grad.size() != ag.n())
            throw std::invalid_argument("continuous cost gradient has wrong length for agent " +
                                        std::to_string(i));
        return grad;
    };
    return ms;
}

/* ── integer-cost lift ─────────────────────────────────────────────── */

GmiGame lift_integer_cost(const GmiGame& game) {
    game.validate();
    for (const auto& ag : game.agents) {
        if (std::holds_alternative<TensorCost>(ag.cost_d) ||
            std::holds_alternative<LinearCoupledCost>(ag.cost_d))
            throw std::invalid_argument(
                "lift_integer_cost: discrete cost feeds opponents; the lift applies only to "
                "own-action smooth costs");
    }

    const int N = game.n_agents();
    std::vector<int> old_n(N), new_n(N), old_off(N + 1, 0), new_off(N + 1, 0);
    std::vector<bool> lifts(N, false);
    for (int i = 0; i < N; ++i) {
        lifts[i] = std::holds_alternative<OwnSmoothCost>(game.agents[i].cost_d);
        old_n[i] = game.agents[i].n();
        new_n[i] = old_n[i] + (lifts[i] ? 1 : 0);
        old_off[i + 1] = old_off[i] + old_n[i];
        new_off[i + 1] = new_off[i] + new_n[i];
    }

    // strip the auxiliary coordinates to recover the pre-lift stacked y
    auto to_old_layout = [=](const Vec& y_new) {
        Vec y_old(old_off[N]);
        for (int k = 0; k < N; ++k)
            if (old_n[k] > 0) y_old.segment(old_off[k], old_n[k]) = y_new.segment(new_off[k], old_n[k]);
        return y_old;
    };

    GmiGame lifted;
    lifted.rho = game.rho;
    for (int i = 0; i < N; ++i) {
        AgentSpec ag = game.agents[i];
        if (!lifts[i]) {
            if (ag.cost_c.grad) {
                auto inner = ag.cost_c.grad;
                ag.cost_c.grad = [=](const Vec& y_all) { return inner(to_old_layout(y_all)); };
            }
            lifted.agents.push_back(std::move(ag));
            continue;
        }

        const auto smooth = std::get<OwnSmoothCost>(ag.cost_d);
        const auto& blk = ag.blocks[0];
        double lo = blk.actions[0][0], hi = blk.actions[0][0];
        Vec A_row(blk.m());
        for (int j = 0; j < blk.m(); ++j) {
            A_row[j] = static_cast<double>(blk.actions[j][0]);
            lo = std::min(lo, A_row[j]);
            hi = std::max(hi, A_row[j]);
        }

        // extend Y_i by the box [min a, max a] for the auxiliary coordinate
        const int n_old = ag.n();
        SetDesc ys = ag.y_set;
        if (n_old == 0) {
            ag.y_set = SetDesc::box(Vec::Constant(1, lo), Vec::Constant(1, hi));
        } else if (ys.kind == SetDesc::Kind::Box || ys.kind == SetDesc::Kind::BoxHalfspace) {
            Vec l(n_old + 1), u(n_old + 1);
            l << ys.lower, lo;
            u << ys.upper, hi;
            if (ys.kind == SetDesc::Kind::Box) {
                ag.y_set = SetDesc::box(l, u);
            } else {
                Vec a(n_old + 1);
                a << ys.a, 0.0;
                ag.y_set = SetDesc::box_halfspace(l, u, a, ys.b);
            }
        } else {
            throw std::invalid_argument("lift_integer_cost: Y_i must be a box to gain a coordinate");
        }

        // local rows encoding E[a_i] - v_i = 0 as two opposing inequalities
        const int n_th_old = ag.n_theta();
        Mat Gd_new = Mat::Zero(n_th_old + 2, ag.m());
        auto [Gd_old, Hd_old] = relax_constraints(game.agents[i], game.n_rho());
        if (n_th_old > 0) Gd_new.topRows(n_th_old) = Gd_old;
        Gd_new.row(n_th_old) = A_row.transpose();
        Gd_new.row(n_th_old + 1) = -A_row.transpose();

        Mat Gc_new = Mat::Zero(n_th_old + 2, n_old + 1);
        if (n_th_old > 0 && ag.gc.affine && n_old > 0) Gc_new.topLeftCorner(n_th_old, n_old) = ag.gc.A;
        if (!ag.gc.affine) throw std::invalid_argument("lift_integer_cost: smooth g^c not supported here");
        Gc_new(n_th_old, n_old) = -1.0;
        Gc_new(n_th_old + 1, n_old) = 1.0;

        Vec theta_new(n_th_old + 2);
        if (n_th_old > 0) theta_new.head(n_th_old) = ag.theta;
        theta_new[n_th_old] = 0.0;
        theta_new[n_th_old + 1] = 0.0;

        ag.gd_fn.clear();
        ag.Gd_pre = {Gd_new};
        ag.gc = ConstraintMap::affine_map(Gc_new);
        ag.theta = theta_new;
        ag.Hd_pre = {Hd_old};
        ag.hd_fn.clear();
        if (ag.hc.rows > 0) {
            Mat Hc_new = Mat::Zero(ag.hc.rows, n_old + 1);
            if (n_old > 0) Hc_new.leftCols(n_old) = ag.hc.A;
            ag.hc = ConstraintMap::affine_map(Hc_new, ag.hc.offset);
        } else {
            ag.hc = ConstraintMap::zero_map(game.n_rho(), n_old + 1);
        }

        auto old_grad = game.agents[i].cost_c.grad;
        const int my_new_off = new_off[i];
        ag.cost_c.grad = [=](const Vec& y_all) {
            Vec out(n_old + 1);
            if (n_old > 0)
                out.head(n_old) = old_grad ? Vec(old_grad(to_old_layout(y_all))) : Vec(Vec::Zero(n_old));
            out[n_old] = smooth.deriv(y_all[my_new_off + n_old]);
            return out;
        };
        ag.cost_c.affine_grad = false;
        ag.cost_d = ZeroCost{};
        lifted.agents.push_back(std::move(ag));
    }
    lifted.validate();
    return lifted;
}

}  // namespace msgne
