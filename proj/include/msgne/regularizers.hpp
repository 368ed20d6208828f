#pragma once

#include "msgne/common.hpp"

namespace msgne {

/* ── Legendre blocks and Bregman distances ─────────────────────────── */

enum class RegKind { Euclidean, GibbsShannon };

/* Block-wise Legendre function: squared Euclidean norm on Euclidean blocks,
 * negative Gibbs-Shannon entropy on simplex blocks. Both kinds are
 * 1-strongly convex on their working domains, so the modulus of any mixture
 * is 1. */
struct RegularizerSpec {
    struct Block {
        RegKind kind;
        int dim;
    };
    std::vector<Block> blocks;
    double strong_convexity_modulus = 1.0;

    int dim() const {
        int d = 0;
        for (const auto& b : blocks) d += b.dim;
        return d;
    }
    static RegularizerSpec euclidean(int dim) { return {{{RegKind::Euclidean, dim}}, 1.0}; }
    static RegularizerSpec entropy(int dim) { return {{{RegKind::GibbsShannon, dim}}, 1.0}; }
};

/* dist_phi(x, y) = phi(x) - phi(y) - <grad phi(y), x - y>.
 * On Euclidean blocks this is 0.5*||x-y||^2; on entropy blocks the
 * Kullback-Leibler-type sum with the continuous extension 0*ln 0 = 0.
 * y must be interior (strictly positive on entropy blocks), x must be
 * nonnegative on entropy blocks. */
double bregman_distance(const RegularizerSpec& spec, const Vec& x, const Vec& y);

/* Gradient of the block Legendre function at an interior point. */
Vec legendre_gradient(const RegularizerSpec& spec, const Vec& x);

/* Multiplicative-weights step on one simplex block,
 *   out_j = x_j exp(-gamma d_j) / sum_l x_l exp(-gamma d_l),
 * computed in the log domain with max subtraction so no overflow occurs for
 * ||gamma d||_inf up to 700. Components below the interior floor are clamped
 * to 1e-300 and the result renormalized, keeping iterates in the relative
 * interior. */
Vec mirror_step_simplex(const Vec& x_prev, const Vec& d, double gamma);

/* ── Euclidean set descriptors and projections ─────────────────────── */

struct SetDesc {
    enum class Kind { Free, Orthant, Box, Halfspace, Simplex, BoxHalfspace, Product };
    Kind kind = Kind::Free;
    int dim = 0;
    Vec lower, upper;               // Box / BoxHalfspace
    Vec a;                          // Halfspace / BoxHalfspace: { v : a'v >= b }
    double b = 0.0;
    std::vector<SetDesc> children;  // Product: coordinate-ordered factors

    static SetDesc free_space(int dim);
    static SetDesc orthant(int dim);
    static SetDesc box(Vec lower, Vec upper);
    static SetDesc halfspace(Vec a, double b);
    static SetDesc simplex(int dim);
    static SetDesc box_halfspace(Vec lower, Vec upper, Vec a, double b);
    static SetDesc product(std::vector<SetDesc> factors);

    bool contains(const Vec& v, double tol = 1e-9) const;
};

/* A concrete interior-ish point of the set, used for default initialization:
 * box centers, uniform simplex points, projected origins elsewhere. */
Vec reference_point(const SetDesc& set);

/* Exact Euclidean projection onto one simple set. Simplex projection uses
 * the sort-and-threshold method; box-intersect-halfspace is solved exactly
 * through the monotone breakpoint search on the halfspace multiplier. */
Vec project_euclidean(const SetDesc& set, const Vec& v);

/* ── Polytope projection (Dykstra) ─────────────────────────────────── */

/* Intersection of a coordinate-partitioned product of simple sets with a
 * list of halfspace rows A v <= b. This is the shape of the local feasible
 * sets Omega_i = { (x_i, y_i) in simplices x Y_i : G x_i + G^c y_i <= theta }. */
struct PolytopeDesc {
    std::vector<SetDesc> parts;  // partition of the coordinates, in order
    Mat A;                       // extra rows, A v <= b (may have 0 rows)
    Vec b;

    int dim() const {
        int d = 0;
        for (const auto& p : parts) d += p.dim;
        return d;
    }
};

struct PolytopeProjection {
    Vec point;
    int sweeps = 0;
    bool converged = true;
    double residual = 0.0;  // last successive-sweep change (inf norm)
};

/* Dykstra's alternating projections over the constituent simple sets.
 * Terminates when one full sweep moves the iterate by less than tol; a
 * nonconverged result carries the residual attained. */
PolytopeProjection project_polytope(const PolytopeDesc& poly, const Vec& v, double tol = 1e-10,
                                    int max_sweeps = 100000);

}  // namespace msgne
