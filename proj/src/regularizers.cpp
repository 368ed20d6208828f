#include "msgne/regularizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace msgne {

namespace {

constexpr double kInteriorFloor = 1e-300;

void check_block_dims(const RegularizerSpec& spec, const Vec& x, const char* who) {
    if (spec.dim() != x.size())
        throw std::invalid_argument(std::string(who) + ": vector length does not match spec");
}

}  // namespace

double bregman_distance(const RegularizerSpec& spec, const Vec& x, const Vec& y) {
    check_block_dims(spec, x, "bregman_distance");
    check_block_dims(spec, y, "bregman_distance");
    double total = 0.0;
    int off = 0;
    for (const auto& blk : spec.blocks) {
        if (blk.kind == RegKind::Euclidean) {
            total += 0.5 * (x.segment(off, blk.dim) - y.segment(off, blk.dim)).squaredNorm();
        } else {
            for (int j = 0; j < blk.dim; ++j) {
                const double xj = x[off + j];
                const double yj = y[off + j];
                if (xj < 0.0)
                    throw std::invalid_argument("bregman_distance: negative component on entropy block");
                if (yj <= 0.0)
                    throw std::invalid_argument("bregman_distance: reference point on entropy-domain boundary");
                // x ln(x/y) + y - x, with 0 ln 0 := 0
                if (xj > 0.0) total += xj * std::log(xj / yj);
                total += yj - xj;
            }
        }
        off += blk.dim;
    }
    return std::max(total, 0.0);
}

Vec legendre_gradient(const RegularizerSpec& spec, const Vec& x) {
    check_block_dims(spec, x, "legendre_gradient");
    Vec g(x.size());
    int off = 0;
    for (const auto& blk : spec.blocks) {
        if (blk.kind == RegKind::Euclidean) {
            g.segment(off, blk.dim) = x.segment(off, blk.dim);
        } else {
            for (int j = 0; j < blk.dim; ++j) {
                if (x[off + j] <= 0.0)
                    throw std::invalid_argument("legendre_gradient: entropy block requires interior point");
                g[off + j] = std::log(x[off + j]) + 1.0;
            }
        }
        off += blk.dim;
    }
    return g;
}

Vec mirror_step_simplex(const Vec& x_prev, const Vec& d, double gamma) {
    const int m = static_cast<int>(x_prev.size());
    if (m == 0 || d.size() != m) throw std::invalid_argument("mirror_step_simplex: dimension mismatch");
    if (!(gamma > 0.0)) throw std::invalid_argument("mirror_step_simplex: step size must be positive");
    for (int j = 0; j < m; ++j) {
        if (!(x_prev[j] > 0.0))
            throw std::invalid_argument("mirror_step_simplex: iterate left the relative interior");
        if (!std::isfinite(d[j])) throw std::invalid_argument("mirror_step_simplex: nonfinite direction");
    }

    // Subtracting max(d) first makes the update invariant under d -> d + c*1
    // at the bit level for exactly representable shifts.
    const double dmax = d.maxCoeff();
    Vec w(m);
    for (int j = 0; j < m; ++j) w[j] = std::log(x_prev[j]) - gamma * (d[j] - dmax);
    const double wmax = w.maxCoeff();

    Vec out(m);
    double sum = 0.0;
    for (int j = 0; j < m; ++j) {
        out[j] = std::exp(w[j] - wmax);
        sum += out[j];
    }
    out /= sum;

    // interior floor: IEEE underflow must not eject the iterate from int dom phi
    bool floored = false;
    for (int j = 0; j < m; ++j) {
        if (out[j] < kInteriorFloor) {
            out[j] = kInteriorFloor;
            floored = true;
        }
    }
    if (floored) out /= out.sum();
    return out;
}

/* ── set descriptors ───────────────────────────────────────────────── */

SetDesc SetDesc::free_space(int dim) {
    SetDesc s;
    s.kind = Kind::Free;
    s.dim = dim;
    return s;
}

SetDesc SetDesc::orthant(int dim) {
    SetDesc s;
    s.kind = Kind::Orthant;
    s.dim = dim;
    return s;
}

SetDesc SetDesc::box(Vec lower, Vec upper) {
    if (lower.size() != upper.size()) throw std::invalid_argument("SetDesc::box: bound size mismatch");
    if ((lower.array() > upper.array()).any()) throw std::invalid_argument("SetDesc::box: empty box (l > u)");
    SetDesc s;
    s.kind = Kind::Box;
    s.dim = static_cast<int>(lower.size());
    s.lower = std::move(lower);
    s.upper = std::move(upper);
    return s;
}

SetDesc SetDesc::halfspace(Vec a, double b) {
    if (a.norm() == 0.0) throw std::invalid_argument("SetDesc::halfspace: zero normal");
    SetDesc s;
    s.kind = Kind::Halfspace;
    s.dim = static_cast<int>(a.size());
    s.a = std::move(a);
    s.b = b;
    return s;
}

SetDesc SetDesc::simplex(int dim) {
    if (dim <= 0) throw std::invalid_argument("SetDesc::simplex: dimension must be positive");
    SetDesc s;
    s.kind = Kind::Simplex;
    s.dim = dim;
    return s;
}

SetDesc SetDesc::box_halfspace(Vec lower, Vec upper, Vec a, double b) {
    SetDesc s = box(std::move(lower), std::move(upper));
    if (a.size() != s.dim) throw std::invalid_argument("SetDesc::box_halfspace: normal size mismatch");
    // maximum of a'v over the box must reach b, otherwise the set is empty
    double amax = 0.0;
    for (int k = 0; k < s.dim; ++k) amax += a[k] > 0.0 ? a[k] * s.upper[k] : a[k] * s.lower[k];
    if (amax < b) throw std::invalid_argument("SetDesc::box_halfspace: empty intersection");
    s.kind = Kind::BoxHalfspace;
    s.a = std::move(a);
    s.b = b;
    return s;
}

SetDesc SetDesc::product(std::vector<SetDesc> factors) {
    SetDesc s;
    s.kind = Kind::Product;
    s.children = std::move(factors);
    s.dim = 0;
    for (const auto& c : s.children) s.dim += c.dim;
    return s;
}

bool SetDesc::contains(const Vec& v, double tol) const {
    if (v.size() != dim) return false;
    switch (kind) {
        case Kind::Free:
            return true;
        case Kind::Orthant:
            return (v.array() >= -tol).all();
        case Kind::Box:
            return (v.array() >= lower.array() - tol).all() && (v.array() <= upper.array() + tol).all();
        case Kind::Halfspace:
            return a.dot(v) >= b - tol;
        case Kind::Simplex:
            return (v.array() >= -tol).all() && std::abs(v.sum() - 1.0) <= tol;
        case Kind::BoxHalfspace:
            return (v.array() >= lower.array() - tol).all() && (v.array() <= upper.array() + tol).all() &&
                   a.dot(v) >= b - tol;
        case Kind::Product: {
            int off = 0;
            for (const auto& c : children) {
                if (!c.contains(v.segment(off, c.dim), tol)) return false;
                off += c.dim;
            }
            return true;
        }
    }
    return false;
}

Vec reference_point(const SetDesc& set) {
    switch (set.kind) {
        case SetDesc::Kind::Free:
        case SetDesc::Kind::Orthant:
            return Vec::Zero(set.dim);
        case SetDesc::Kind::Box:
        case SetDesc::Kind::BoxHalfspace:
            return project_euclidean(set, 0.5 * (set.lower + set.upper));
        case SetDesc::Kind::Halfspace:
            return project_euclidean(set, Vec::Zero(set.dim));
        case SetDesc::Kind::Simplex:
            return Vec::Constant(set.dim, 1.0 / set.dim);
        case SetDesc::Kind::Product: {
            Vec out(set.dim);
            int off = 0;
            for (const auto& c : set.children) {
                out.segment(off, c.dim) = reference_point(c);
                off += c.dim;
            }
            return out;
        }
    }
    throw std::logic_error("reference_point: unknown set kind");
}

namespace {

Vec project_simplex_sorted(const Vec& v) {
    // Sort-and-threshold method (exact, O(m log m)).
    const int n = static_cast<int>(v.size());
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cumsum = 0.0, theta = 0.0;
    int rho = 0;
    double rho_sum = 0.0;
    for (int j = 0; j < n; ++j) {
        cumsum += u[j];
        if (u[j] - (cumsum - 1.0) / (j + 1) > 0.0) {
            rho = j + 1;
            rho_sum = cumsum;
        }
    }
    theta = (rho_sum - 1.0) / rho;
    Vec w(n);
    for (int i = 0; i < n; ++i) w[i] = std::max(v[i] - theta, 0.0);
    return w;
}

Vec project_box_halfspace(const SetDesc& set, const Vec& v) {
    // argmin ||z - v||^2 s.t. l <= z <= u, a'z >= b. The KKT point is
    // z = clip(v + tau a) with tau >= 0 complementary to the halfspace;
    // g(tau) = a' clip(v + tau a) is piecewise linear and nondecreasing, so
    // the exact tau is found by walking the clipping breakpoints.
    const int n = set.dim;
    auto clipped = [&](double tau) {
        Vec z(n);
        for (int k = 0; k < n; ++k) z[k] = std::clamp(v[k] + tau * set.a[k], set.lower[k], set.upper[k]);
        return z;
    };
    Vec z0 = clipped(0.0);
    if (set.a.dot(z0) >= set.b) return z0;

    std::vector<double> taus;
    taus.push_back(0.0);
    for (int k = 0; k < n; ++k) {
        if (set.a[k] == 0.0) continue;
        for (double bound : {set.lower[k], set.upper[k]}) {
            const double t = (bound - v[k]) / set.a[k];
            if (t > 0.0 && std::isfinite(t)) taus.push_back(t);
        }
    }
    std::sort(taus.begin(), taus.end());

    double t_prev = 0.0;
    double g_prev = set.a.dot(z0);
    for (std::size_t i = 1; i < taus.size(); ++i) {
        const double t = taus[i];
        if (t <= t_prev) continue;
        const double g = set.a.dot(clipped(t));
        if (g >= set.b) {
            const double slope = (g - g_prev) / (t - t_prev);
            const double tau = slope > 0.0 ? t_prev + (set.b - g_prev) / slope : t;
            return clipped(tau);
        }
        t_prev = t;
        g_prev = g;
    }
    // beyond the last breakpoint g is constant and equals its box maximum,
    // which was checked nonempty at construction
    return clipped(taus.back());
}

}  // namespace

Vec project_euclidean(const SetDesc& set, const Vec& v) {
    if (v.size() != set.dim) throw std::invalid_argument("project_euclidean: dimension mismatch");
    switch (set.kind) {
        case SetDesc::Kind::Free:
            return v;
        case SetDesc::Kind::Orthant:
            return v.cwiseMax(0.0);
        case SetDesc::Kind::Box:
            return v.cwiseMax(set.lower).cwiseMin(set.upper);
        case SetDesc::Kind::Halfspace: {
            const double g = set.a.dot(v);
            if (g >= set.b) return v;
            return v + ((set.b - g) / set.a.squaredNorm()) * set.a;
        }
        case SetDesc::Kind::Simplex:
            return project_simplex_sorted(v);
        case SetDesc::Kind::BoxHalfspace:
            return project_box_halfspace(set, v);
        case SetDesc::Kind::Product: {
            Vec out(set.dim);
            int off = 0;
            for (const auto& c : set.children) {
                out.segment(off, c.dim) = project_euclidean(c, v.segment(off, c.dim));
                off += c.dim;
            }
            return out;
        }
    }
    throw std::logic_error("project_euclidean: unknown set kind");
}

PolytopeProjection project_polytope(const PolytopeDesc& poly, const Vec& v, double tol, int max_sweeps) {
    const int n = poly.dim();
    if (v.size() != n) throw std::invalid_argument("project_polytope: dimension mismatch");
    if (!(tol > 0.0)) throw std::invalid_argument("project_polytope: tolerance must be positive");
    const int rows = static_cast<int>(poly.A.rows());
    if (rows > 0 && poly.A.cols() != n) throw std::invalid_argument("project_polytope: row width mismatch");

    std::vector<double> row_sqnorm(rows);
    for (int r = 0; r < rows; ++r) {
        row_sqnorm[r] = poly.A.row(r).squaredNorm();
        if (row_sqnorm[r] == 0.0 && poly.b[r] < 0.0)
            throw std::invalid_argument("project_polytope: infeasible zero row");
    }

    auto project_parts = [&](const Vec& z) {
        Vec out(n);
        int off = 0;
        for (const auto& p : poly.parts) {
            out.segment(off, p.dim) = project_euclidean(p, z.segment(off, p.dim));
            off += p.dim;
        }
        return out;
    };

    // Dykstra over [product of parts, halfspace rows...]
    const int n_sets = 1 + rows;
    Vec x = v;
    std::vector<Vec> increments(n_sets, Vec::Zero(n));

    PolytopeProjection result;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        const Vec x_before = x;
        for (int s = 0; s < n_sets; ++s) {
            const Vec z = x + increments[s];
            Vec y;
            if (s == 0) {
                y = project_parts(z);
            } else {
                const int r = s - 1;
                const double g = poly.A.row(r).dot(z);
                if (g <= poly.b[r] || row_sqnorm[r] == 0.0)
                    y = z;
                else
                    y = z - ((g - poly.b[r]) / row_sqnorm[r]) * poly.A.row(r).transpose();
            }
            increments[s] = z - y;
            x = y;
        }
        result.sweeps = sweep + 1;
        result.residual = (x - x_before).lpNorm<Eigen::Infinity>();
        if (result.residual < tol) {
            result.point = x;
            result.converged = true;
            return result;
        }
    }
    result.point = x;
    result.converged = false;
    return result;
}

}  // namespace msgne
