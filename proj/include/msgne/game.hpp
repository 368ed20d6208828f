#pragma once

#include <map>
#include <memory>
#include <optional>
#include <variant>

#include "msgne/common.hpp"
#include "msgne/regularizers.hpp"

namespace msgne {

/* ── discrete structure ────────────────────────────────────────────── */

/* One independent simplex block of an agent's discrete variable: an ordered
 * list of integer actions a^1..a^m. Agents whose discrete decision factors
 * into independent components (e.g. one on/off switch per device and time
 * step) carry several blocks; the mixed strategy is then the product of the
 * per-block distributions. */
struct ActionBlock {
    std::vector<IVec> actions;
    int m() const { return static_cast<int>(actions.size()); }
    int p() const { return actions.empty() ? 0 : static_cast<int>(actions[0].size()); }
    Mat action_matrix() const;  // p x m, columns are the actions
};

/* Deterministic lexicographic enumeration of {0,1}^dim (or an integer box)
 * filtered by a membership predicate. Rejects enumerations larger than 1e6. */
std::vector<IVec> enumerate_actions(int dim, const std::function<bool(const IVec&)>& member);
std::vector<IVec> enumerate_actions_box(const IVec& lower, const IVec& upper,
                                        const std::function<bool(const IVec&)>& member);

/* ── cost specifications ───────────────────────────────────────────── */

struct ZeroCost {};

/* Full array of J_i^d over joint actions, row-major with agent 1 slowest.
 * Desk scale only: requires every agent to have a single block and the
 * joint action count to stay under 1e6. */
struct TensorCost {
    std::vector<double> values;
};

/* J_i^d(a) = pi_i(a_i) + <sum_j M_{i,j} a_j, a_i>; the expected cost vector
 * is f_i = pi_bar_i + A_i' sum_{j != i} M_{i,j} A_j x_j. */
struct LinearCoupledCost {
    Vec pi_bar;                                // length m_i
    std::vector<std::pair<int, Mat>> coupling;  // (j, M_{i,j}) with M_{i,j} in R^{p_i x p_j}
};

/* Own-action cost with a continuously differentiable extension, defined on a
 * single scalar-action block; this is the liftable shape of Remark-style
 * reformulations. The expected cost vector is the constant (f(a^1),...,f(a^m)). */
struct OwnSmoothCost {
    std::function<double(double)> value;
    std::function<double(double)> deriv;
};

using DiscreteCost = std::variant<ZeroCost, TensorCost, LinearCoupledCost, OwnSmoothCost>;

/* Gradient oracle for the continuous cost: grad(y_all) returns
 * nabla_{y_i} J_i^c evaluated at the full stacked continuous profile. */
struct ContinuousCost {
    std::function<Vec(const Vec& y_all)> grad;
    bool affine_grad = false;  // gradient affine in y (enables exact Lipschitz assembly)
};

/* ── constraint maps on the continuous variable ────────────────────── */

/* g_i^c / h_i^c: affine (A y_i + offset) or smooth with a Jacobian oracle. */
struct ConstraintMap {
    Mat A;
    Vec offset;
    std::function<Vec(const Vec&)> value;     // used when !affine
    std::function<Mat(const Vec&)> jacobian;  // rows x n_i
    bool affine = true;
    int rows = 0;

    static ConstraintMap affine_map(Mat A, Vec offset = Vec());
    static ConstraintMap zero_map(int rows, int cols);
    static ConstraintMap smooth_map(int rows, std::function<Vec(const Vec&)> value,
                                    std::function<Mat(const Vec&)> jacobian);

    Vec eval(const Vec& y_i) const;
    Mat jac(const Vec& y_i) const;
};

/* ── agents and games ──────────────────────────────────────────────── */

struct AgentSpec {
    std::vector<ActionBlock> blocks;

    SetDesc y_set;  // descriptor of Y_i; dim may be 0

    // local constraints E[g_i^d(a_i)] + g_i^c(y_i) <= theta_i; the discrete
    // part is given per block, either as a function over actions or as a
    // precomputed matrix (n_theta_i x m_{i,b})
    std::vector<std::function<Vec(const IVec&)>> gd_fn;
    std::vector<Mat> Gd_pre;
    ConstraintMap gc;
    Vec theta;

    // coupling contributions sum_j (E[h_j^d] + h_j^c) <= rho
    std::vector<std::function<Vec(const IVec&)>> hd_fn;
    std::vector<Mat> Hd_pre;
    ConstraintMap hc;

    DiscreteCost cost_d = ZeroCost{};
    ContinuousCost cost_c;

    int m() const {
        int t = 0;
        for (const auto& b : blocks) t += b.m();
        return t;
    }
    int n() const { return y_set.dim; }
    int n_theta() const { return static_cast<int>(theta.size()); }
};

struct GmiGame {
    std::vector<AgentSpec> agents;
    Vec rho;

    /* Certified Lipschitz bound of the continuous pseudogradient, supplied
     * when the generator can derive one analytically (used instead of the
     * sampled estimate for nonlinear costs). */
    std::optional<double> fc_lipschitz_hint;

    int n_agents() const { return static_cast<int>(agents.size()); }
    int n_rho() const { return static_cast<int>(rho.size()); }
    void validate() const;
};

/* Column-wise relaxation of the discrete constraint functions:
 * G_i^d = [g_i^d(a^1) ... g_i^d(a^m)] per block, concatenated, so that
 * E[g_i^d(a_i)] = G_i^d x_i exactly. Returns (G_i^d, H_i^d). */
std::pair<Mat, Mat> relax_constraints(const AgentSpec& agent, int n_rho);

/* ── compiled operator form ────────────────────────────────────────── */

struct MsGnep {
    int N = 0;
    std::vector<std::vector<int>> block_dims;  // per agent, per block simplex sizes
    std::vector<int> m, n, n_th;               // per agent dims
    int n_rho = 0;
    int m_total = 0, n_total = 0, n_th_total = 0;

    std::vector<Mat> Gd, Hd;        // per agent (n_th_i x m_i), (n_rho x m_i)
    std::vector<ConstraintMap> gc;  // per agent (n_th_i rows over y_i)
    std::vector<ConstraintMap> hc;  // per agent (n_rho rows over y_i)
    std::vector<Vec> theta;
    Vec rho;
    std::vector<SetDesc> y_sets;

    bool fd_affine = false;  // F^d affine in x (N<=2 tensor, linear-coupled, zero, own-smooth)
    bool fc_affine = false;
    bool constraints_affine = true;        // all g^c / h^c affine
    std::optional<double> ell_fc_hint;     // forwarded from the game description

    // pseudogradient oracles; f_agent returns f_i(x_{-i}) for one agent,
    // fc_agent returns nabla_{y_i} J_i^c(y)
    std::function<Vec(int, const Vec& x_all)> f_agent;
    std::function<Vec(int, const Vec& y_all)> fc_agent;

    Vec Fd(const Vec& x_all) const;  // stacked, parallel over agents
    Vec Fc(const Vec& y_all) const;

    int x_offset(int i) const;  // offset of agent i inside stacked x
    int y_offset(int i) const;
    int th_offset(int i) const;

    /* Feasibility audits of the relaxed constraints at a stacked profile. */
    double coupling_violation(const Vec& x_all, const Vec& y_all) const;
    double local_violation(const Vec& x_all, const Vec& y_all) const;
    Vec coupling_value(const Vec& x_all, const Vec& y_all) const;  // sum_i H_i x_i + h_i(y_i)
};

/* Expected cost vector f_i(x_{-i}) of one agent given the full stacked
 * mixed-strategy profile (the own entry of x is ignored where irrelevant). */
Vec expected_cost_vector(const GmiGame& game, int i, const Vec& x_all);

/* Bundle the game into operator data: pseudogradient oracles, relaxed
 * constraint matrices and dimension bookkeeping. */
MsGnep compile(const GmiGame& game);

/* Remark-style lift: moves every own-smooth discrete cost onto an auxiliary
 * continuous variable v_i with the relaxed equality E[a_i] = v_i (two
 * opposing inequality rows); the integer block keeps zero cost. Games whose
 * discrete costs couple opponents are rejected. */
GmiGame lift_integer_cost(const GmiGame& game);

}  // namespace msgne
