#pragma once

#include <optional>

#include "msgne/operators.hpp"

/* Independent oracles used by the unit and acceptance suites. Everything
 * here is deliberately written from the definitions rather than through the
 * library's evaluation paths. */
namespace oracles {

using msgne::Layout;
using msgne::Mat;
using msgne::MsGnep;
using msgne::Vec;

/* Exact largest singular value through a dense decomposition. */
double svd_norm(const Mat& M);

/* Projection of v onto { z : A z <= b, E z = e } by enumerating active sets
 * of the inequality rows and keeping the feasible minimizer; exact for tiny
 * systems (at most 16 inequality rows). */
std::optional<Vec> active_set_projection(const Vec& v, const Mat& A, const Vec& b, const Mat& E,
                                         const Vec& e);

/* Blockwise application of the three linear KKT pieces, assembled directly
 * from the definitions on the T layout (affine constraint case). */
Vec apply_T2(const MsGnep& ms, const Layout& lo, const Vec& w);
Vec apply_T3(const MsGnep& ms, const Layout& lo, const Vec& w);
Vec apply_T4(const MsGnep& ms, const Layout& lo, const Vec& w);

/* Consensus operator on the distributed layout: rows (0, ..., 0, -(L (x) I) nu,
 * (L (x) I) lambda). */
Vec apply_T5(const Mat& laplacian, const Layout& lo, const Vec& w);

/* Grid search over two mixed strategies at the given resolution; returns the
 * profile minimizing exploitability of a two-player finite game. */
struct GridResult {
    Vec x1, x2;
    double exploitability = 0.0;
};
GridResult grid_equilibrium_2p(const MsGnep& ms, double resolution);

/* Minimum of 1'z over all binary activation patterns that are feasible with
 * the fixed continuous point y, enumerated from the reformulated rows
 * (Gd, Gc, theta). Assumes each row touches at most one z coordinate.
 * Returns nothing if no pattern is feasible. */
std::optional<double> pwa_pattern_min_cost(const Mat& Gd, const Mat& Gc, const Vec& theta, int n_y,
                                           int p, const Vec& y);

}  // namespace oracles
