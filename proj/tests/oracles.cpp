#include "oracles.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>

namespace oracles {

double svd_norm(const Mat& M) {
    if (M.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(M);
    return svd.singularValues()[0];
}

std::optional<Vec> active_set_projection(const Vec& v, const Mat& A, const Vec& b, const Mat& E,
                                         const Vec& e) {
    const int rows = static_cast<int>(A.rows());
    if (rows > 16) throw std::invalid_argument("active_set_projection: too many rows");
    const double tol = 1e-9;

    std::optional<Vec> best;
    double best_obj = std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 0; mask < (1u << rows); ++mask) {
        int active = 0;
        for (int r = 0; r < rows; ++r)
            if (mask & (1u << r)) ++active;
        Mat C(active + E.rows(), v.size());
        Vec d(active + E.rows());
        int at = 0;
        for (int r = 0; r < rows; ++r) {
            if (mask & (1u << r)) {
                C.row(at) = A.row(r);
                d[at++] = b[r];
            }
        }
        if (E.rows() > 0) {
            C.bottomRows(E.rows()) = E;
            d.tail(E.rows()) = e;
        }
        Vec z = v;
        if (C.rows() > 0) {
            Eigen::CompleteOrthogonalDecomposition<Mat> cod(C);
            z = v - cod.pseudoInverse() * (C * v - d);
        }
        const bool feasible = (A.rows() == 0 || ((A * z - b).array() <= tol).all()) &&
                              (E.rows() == 0 || (E * z - e).cwiseAbs().maxCoeff() <= tol);
        if (!feasible) continue;
        const double obj = (z - v).squaredNorm();
        if (obj < best_obj) {
            best_obj = obj;
            best = z;
        }
    }
    return best;
}

Vec apply_T2(const MsGnep& ms, const Layout& lo, const Vec& w) {
    Vec out = Vec::Zero(lo.dim);
    const Vec x = lo.stacked_x(w);
    const Vec y = lo.stacked_y(w);
    out.head(ms.m_total) = ms.Fd(x);
    if (ms.n_total > 0) out.segment(ms.m_total, ms.n_total) = ms.Fc(y);
    for (int i = 0; i < ms.N; ++i)
        if (ms.n_th[i] > 0) out.segment(lo.mu_off[i], ms.n_th[i]) = ms.theta[i];
    if (ms.n_rho > 0) out.segment(lo.lambda_off, ms.n_rho) = ms.rho;
    return out;
}

Vec apply_T3(const MsGnep& ms, const Layout& lo, const Vec& w) {
    Vec out = Vec::Zero(lo.dim);
    for (int i = 0; i < ms.N; ++i) {
        if (ms.n_th[i] == 0) continue;
        const Vec mu = w.segment(lo.mu_off[i], ms.n_th[i]);
        out.segment(lo.x_off[i], ms.m[i]) = ms.Gd[i].transpose() * mu;
        Vec murow = -ms.Gd[i] * w.segment(lo.x_off[i], ms.m[i]);
        if (ms.n[i] > 0 && ms.gc[i].rows > 0) {
            const Vec y_i = w.segment(lo.y_off[i], ms.n[i]);
            out.segment(lo.y_off[i], ms.n[i]) = ms.gc[i].jac(y_i).transpose() * mu;
            murow -= ms.gc[i].eval(y_i);
        }
        out.segment(lo.mu_off[i], ms.n_th[i]) = murow;
    }
    return out;
}

Vec apply_T4(const MsGnep& ms, const Layout& lo, const Vec& w) {
    Vec out = Vec::Zero(lo.dim);
    if (ms.n_rho == 0) return out;
    const Vec lambda = w.segment(lo.lambda_off, ms.n_rho);
    Vec lam_row = Vec::Zero(ms.n_rho);
    for (int i = 0; i < ms.N; ++i) {
        out.segment(lo.x_off[i], ms.m[i]) = ms.Hd[i].transpose() * lambda;
        lam_row -= ms.Hd[i] * w.segment(lo.x_off[i], ms.m[i]);
        if (ms.n[i] > 0 && ms.hc[i].rows > 0) {
            const Vec y_i = w.segment(lo.y_off[i], ms.n[i]);
            out.segment(lo.y_off[i], ms.n[i]) = ms.hc[i].jac(y_i).transpose() * lambda;
            lam_row -= ms.hc[i].eval(y_i);
        }
    }
    out.segment(lo.lambda_off, ms.n_rho) = lam_row;
    return out;
}

Vec apply_T5(const Mat& laplacian, const Layout& lo, const Vec& w) {
    Vec out = Vec::Zero(lo.dim);
    const int N = static_cast<int>(lo.lambda_i_off.size());
    const int nr = lo.n_rho;
    for (int i = 0; i < N; ++i) {
        Vec lam_row = Vec::Zero(nr);
        Vec nu_row = Vec::Zero(nr);
        for (int j = 0; j < N; ++j) {
            lam_row -= laplacian(i, j) * w.segment(lo.nu_off[j], nr);
            nu_row += laplacian(i, j) * w.segment(lo.lambda_i_off[j], nr);
        }
        out.segment(lo.lambda_i_off[i], nr) = lam_row;
        out.segment(lo.nu_off[i], nr) = nu_row;
    }
    return out;
}

GridResult grid_equilibrium_2p(const MsGnep& ms, double resolution) {
    if (ms.N != 2 || ms.m[0] != 2 || ms.m[1] != 2)
        throw std::invalid_argument("grid_equilibrium_2p: binary two-player games only");
    GridResult best;
    best.exploitability = std::numeric_limits<double>::infinity();
    Vec x(4);
    const int steps = static_cast<int>(std::round(1.0 / resolution));
    for (int a = 0; a <= steps; ++a) {
        for (int c = 0; c <= steps; ++c) {
            x[0] = static_cast<double>(a) / steps;
            x[1] = 1.0 - x[0];
            x[2] = static_cast<double>(c) / steps;
            x[3] = 1.0 - x[2];
            double total = 0.0;
            for (int i = 0; i < 2; ++i) {
                const Vec f = ms.f_agent(i, x);
                total += f.dot(x.segment(2 * i, 2)) - f.minCoeff();
            }
            if (total < best.exploitability) {
                best.exploitability = total;
                best.x1 = x.head(2);
                best.x2 = x.tail(2);
            }
        }
    }
    return best;
}

std::optional<double> pwa_pattern_min_cost(const Mat& Gd, const Mat& Gc, const Vec& theta, int n_y,
                                           int p, const Vec& y) {
    const int rows = static_cast<int>(Gd.rows());
    const int blocks = 3 * p;
    const double tol = 1e-9;
    std::optional<double> best;
    for (std::uint32_t pattern = 0; pattern < (1u << blocks); ++pattern) {
        // embed the pattern as the pure strategy over the 2-column blocks
        Vec x = Vec::Zero(2 * blocks);
        for (int bk = 0; bk < blocks; ++bk) x[2 * bk + ((pattern >> bk) & 1u)] = 1.0;

        // per row: (z coefficient) * z_j <= rhs
        Vec z_lo = Vec::Constant(p, -std::numeric_limits<double>::infinity());
        Vec z_hi = Vec::Constant(p, std::numeric_limits<double>::infinity());
        bool feasible = true;
        for (int r = 0; r < rows && feasible; ++r) {
            double rhs = theta[r] - Gd.row(r).dot(x) - Gc.row(r).head(n_y).dot(y);
            int zi = -1;
            double zc = 0.0;
            for (int j = 0; j < p; ++j) {
                if (Gc(r, n_y + j) != 0.0) {
                    zi = j;
                    zc = Gc(r, n_y + j);
                }
            }
            if (zi < 0) {
                feasible = rhs >= -tol;
            } else if (zc > 0.0) {
                z_hi[zi] = std::min(z_hi[zi], rhs / zc);
            } else {
                z_lo[zi] = std::max(z_lo[zi], rhs / zc);
            }
        }
        if (!feasible) continue;
        double cost = 0.0;
        for (int j = 0; j < p; ++j) {
            if (z_lo[j] > z_hi[j] + tol) {
                feasible = false;
                break;
            }
            cost += std::isfinite(z_lo[j]) ? z_lo[j] : 0.0;
        }
        if (!feasible) continue;
        if (!best || cost < *best) best = cost;
    }
    return best;
}

}  // namespace oracles
