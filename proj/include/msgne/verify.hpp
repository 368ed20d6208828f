#pragma once

#include "msgne/instances.hpp"
#include "msgne/solvers.hpp"

namespace msgne {

struct EquilibriumCertificate {
    double fixed_point_residual_inf = 0.0;
    double coupling_violation_inf = 0.0;
    double local_violation_inf = 0.0;
    std::optional<double> exploitability;  // plain finite games only
    double complementarity_gap = 0.0;
};

/* Certificate at a stacked iterate of the given splitting: one reflected
 * step from a stationary cache measures the fixed-point residual, the
 * violations come straight from the relaxed constraints, complementarity
 * from |dual * slack| per multiplier row. For the distributed variant the
 * coupling slack is paired with the average of the dual copies. */
EquilibriumCertificate kkt_residual(const SplitProblem& problem, const MsGnep& ms,
                                    const Layout& layout, const Vec& gamma_groups, const Vec& w);

/* Sum over agents of <f_i(x_{-i}), x_i> - min_j f_i^j(x_{-i}); zero exactly
 * at a mixed equilibrium of an unconstrained finite game. Rejects games with
 * continuous variables or constraints. */
double exploitability(const MsGnep& ms, const Vec& x_stacked);

struct MonotonicityResult {
    double min_inner_product = 0.0;
    Vec witness_a, witness_b;  // the violating pair when one is certified
    bool certified_failure = false;
};

/* min over sampled pairs of <F(z)-F(z'), z-z'>; a pair below -1e-8 is
 * returned as a certified failure witness. */
MonotonicityResult monotonicity_sample(const std::function<Vec(const Vec&)>& F,
                                       const std::function<Vec(Rng&)>& sample_domain, int n_pairs,
                                       std::uint64_t seed);

/* Highest-probability action per block, ties to the lowest index; returns
 * one concatenated integer decision per agent. */
std::vector<IVec> round_to_pure(const GmiGame& game, const Vec& x_stacked);

/* Max relative error between the gradient oracle and central differences of
 * the scalar function at the point. */
double finite_difference_check(const std::function<double(const Vec&)>& f,
                               const std::function<Vec(const Vec&)>& grad, const Vec& point,
                               double h);

}  // namespace msgne
