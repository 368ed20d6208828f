#pragma once

#include "msgne/game.hpp"

namespace msgne {

/* ── builtin benchmark instances ───────────────────────────────────── */

/* Two-player matching pennies: tensor costs +/-1, no constraints. */
GmiGame make_matching_pennies();

/* Demand-side management with interruptible on/off devices. Each agent owns
 * `devices` flexible devices over a horizon of T steps; one binary block per
 * device and step. Inflexible profiles follow a seeded bimodal daily curve;
 * all other parameters are sampled from the published ranges. */
struct DsmInstance {
    GmiGame game;
    int N = 0, T = 0, devices = 1;
    std::vector<int> peak_hours;  // steps where the inflexible curve peaks
    Mat inflexible;               // N x T
    std::vector<double> y_min, y_max, energy_min;  // per (agent, device), row-major
};
DsmInstance make_dsm_instance(std::uint64_t seed, int N, int T, int devices = 1);

/* Networked Cournot competition with endogenous market participation:
 * binary participation vectors capped at nu_bar markets, continuous
 * allocations with minimum bids, shared market capacities. */
struct CournotInstance {
    GmiGame game;
    int N = 0, M = 0;
    Vec q;  // strong-convexity moduli of the production costs
};
CournotInstance make_cournot_instance(std::uint64_t seed, int N, int M);

/* Discrete-flow control with the continuous copy of the integer flow:
 * integer flows a_i in {0..abar_i} with own logarithmic cost, congestion
 * costs on the continuous copies, relaxed equality E[a_i] = y_i, and link
 * capacity coupling on the expected flows. */
struct FlowInstance {
    GmiGame game;
    int N = 0, L = 0;
    std::vector<int> a_bar;
    std::vector<std::vector<int>> links_of;  // per agent, ascending link ids
    Vec q_link, b_link;                      // congestion parameters per link
    Vec capacity;                            // raw link capacities (the game's
                                             // coupling rows are normalized)
};
FlowInstance make_flow_instance(std::uint64_t seed, int N, int L);

/* ── piecewise-affine local costs ──────────────────────────────────── */

struct PwaRegion {
    Vec lower, upper;  // box in R^{n_y}
    Vec c;             // affine piece c'y + b on this region
    double b = 0.0;
};

struct PwaAgent {
    Vec y_lower, y_upper;
    std::vector<PwaRegion> regions;
    ContinuousCost smooth_cost;  // gradient of J_i^c over the original stacked y
    ConstraintMap hc;            // coupling rows over the original y_i
};

struct PwaGameSpec {
    std::vector<PwaAgent> agents;
    Vec rho;
    double eps_tol = 1e-9;  // strict-inequality tolerance of the activation rows
};

/* Mixed-logical reformulation of the piecewise-affine cost: binary
 * activations (delta, alpha, beta) per region as independent on/off blocks,
 * auxiliary epigraph variables z with cost 1'z, and the full set of
 * activation, product-linearization and big-M rows. Big-M constants are the
 * closed-form box extrema of each affine piece. Overlapping or non-covering
 * regions are rejected. */
GmiGame reformulate_pwa(const PwaGameSpec& spec);

/* Seeded family of scalar PWA games used by the demos and the acceptance
 * run: p regions per agent, monotone quadratic smooth part, one aggregate
 * coupling row. */
struct PwaInstance {
    PwaGameSpec spec;
    GmiGame game;
    int N = 0, p = 0;
};
PwaInstance make_pwa_instance(std::uint64_t seed, int N, int p);

}  // namespace msgne
