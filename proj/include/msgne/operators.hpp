#pragma once

#include "msgne/game.hpp"
#include "msgne/network.hpp"

namespace msgne {

enum class Variant { SemiDecentralized, Alternative, Distributed };

/* Offsets of the stacked iterate. Variants share the (x, y) prefix;
 * SemiDecentralized appends (mu, lambda), Alternative appends lambda only,
 * Distributed appends (mu, lambda_1..lambda_N, nu_1..nu_N). */
struct Layout {
    Variant variant = Variant::SemiDecentralized;
    int dim = 0;
    std::vector<int> x_off, y_off, mu_off;  // per agent
    std::vector<int> x_dim, y_dim, mu_dim;
    int lambda_off = -1;                 // shared multiplier (variants 1-2)
    std::vector<int> lambda_i_off, nu_off;  // per-agent copies (variant 3)
    int n_rho = 0;

    Vec x_of(const Vec& w, int i) const { return w.segment(x_off[i], x_dim[i]); }
    Vec y_of(const Vec& w, int i) const { return w.segment(y_off[i], y_dim[i]); }
    Vec stacked_x(const Vec& w) const;
    Vec stacked_y(const Vec& w) const;
};

Layout layout_T(const MsGnep& ms);
Layout layout_S(const MsGnep& ms);
Layout layout_Ttilde(const MsGnep& ms);

/* ── forward operators ─────────────────────────────────────────────── */

/* B = T2 + T3 + T4 of the full KKT splitting, blocks per agent:
 *   x_i : f_i(x_{-i}) + G_i^d' mu_i + H_i^d' lambda
 *   y_i : grad J_i^c + (d g_i^c)' mu_i + (d h_i^c)' lambda
 *   mu_i: theta_i - G_i^d x_i - g_i^c(y_i)
 *   lam : rho - sum_i (H_i^d x_i + h_i^c(y_i))
 * The parallel kernel distributes agents over OpenMP threads; the serial
 * twin is the reference implementation used by the tests and the benchmark. */
void eval_forward_T(const MsGnep& ms, const Vec& w, Vec& out);
void eval_forward_T_serial(const MsGnep& ms, const Vec& w, Vec& out);

/* B = S2 + S3 of the condensed splitting (no mu block). */
void eval_forward_S(const MsGnep& ms, const Vec& w, Vec& out);
void eval_forward_S_serial(const MsGnep& ms, const Vec& w, Vec& out);

/* B = T~2 + T~3 + T~4 + T~5 of the augmented splitting with per-agent dual
 * copies and the Laplacian consensus rows. */
void eval_forward_Ttilde(const MsGnep& ms, const CommGraph& graph, const Vec& w, Vec& out);
void eval_forward_Ttilde_serial(const MsGnep& ms, const CommGraph& graph, const Vec& w, Vec& out);

/* ── step-size machinery ───────────────────────────────────────────── */

struct PowerIterResult {
    double value = 0.0;  // largest singular value estimate
    int iterations = 0;
    bool converged = false;
    double residual = 0.0;  // last relative Rayleigh change
};

/* Largest singular value by power iteration on M'M, seed-fixed start. */
PowerIterResult estimate_spectral_norm(const Mat& M, int max_iters = 500, double rel_tol = 1e-8,
                                       std::uint64_t seed = 20250505);

double step_size_bound(double ell_B, double sigma_phi);

/* Sampled Lipschitz estimate for nonlinear maps: the largest observed ratio
 * ||F(z)-F(z')|| / ||z-z'|| over seeded domain pairs, times a safety factor. */
double sampled_lipschitz(const std::function<Vec(const Vec&)>& F,
                         const std::function<Vec(Rng&)>& sample_domain, int n_pairs,
                         std::uint64_t seed, double safety = 2.0);

struct LipschitzReport {
    double ell_F = 0.0;
    double ell_T3 = 0.0;
    double ell_T4 = 0.0;   // also serves as ell_S3 / ell_T4~ per variant
    double ell_cns = 0.0;  // distributed variant only
    double ell_B = 0.0;
};

LipschitzReport lipschitz_T(const MsGnep& ms, std::uint64_t seed = 20250505);
LipschitzReport lipschitz_S(const MsGnep& ms, std::uint64_t seed = 20250505);
LipschitzReport lipschitz_Ttilde(const MsGnep& ms, const CommGraph& graph,
                                 std::uint64_t seed = 20250505);

/* Samples an interior point of the iterate domain (simplices, Y boxes,
 * nonnegative or free dual blocks); used by the Lipschitz and monotonicity
 * samplers. */
Vec sample_domain_point(const MsGnep& ms, const Layout& layout, Rng& rng);

/* Dense pseudogradient assembly by basis probing, valid when the map is
 * affine; returns the matrix of the linear part. */
Mat assemble_affine_map(const std::function<Vec(const Vec&)>& F, int dim);

/* ── backward structure ────────────────────────────────────────────── */

/* One block of the backward operator: a regularizer kind plus either a
 * simple set or a polytope (the Omega_i of the condensed splitting). */
struct BackwardBlock {
    int offset = 0;
    int size = 0;
    RegKind reg = RegKind::Euclidean;
    SetDesc set;
    std::shared_ptr<PolytopeDesc> poly;  // when set, overrides `set`
    int step_group = 0;                  // index into the per-group step sizes
};

struct SplitProblem {
    Variant variant = Variant::SemiDecentralized;
    int dim = 0;
    std::vector<BackwardBlock> blocks;
    std::function<void(const Vec&, Vec&)> forward;
    LipschitzReport lipschitz;
    int n_step_groups = 0;
    double polytope_tol = 1e-10;

    RegularizerSpec regularizer() const;
};

/* Assemble the three splittings. `entropy_x` selects Gibbs-Shannon blocks on
 * the simplices (the Bregman path); with false every block is Euclidean and
 * the iteration reduces to the standard reflected splitting. */
SplitProblem make_problem_T(const MsGnep& ms, bool entropy_x = true, std::uint64_t seed = 20250505);
SplitProblem make_problem_S(const MsGnep& ms, bool entropy_x = false, std::uint64_t seed = 20250505);
SplitProblem make_problem_Ttilde(const MsGnep& ms, const CommGraph& graph, bool entropy_x = true,
                                 std::uint64_t seed = 20250505);

}  // namespace msgne
