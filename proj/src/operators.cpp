#include "msgne/operators.hpp"

#include <cmath>

namespace msgne {

/* ── layouts ───────────────────────────────────────────────────────── */

Vec Layout::stacked_x(const Vec& w) const {
    int total = 0;
    for (int d : x_dim) total += d;
    Vec x(total);
    int off = 0;
    for (std::size_t i = 0; i < x_off.size(); ++i) {
        x.segment(off, x_dim[i]) = w.segment(x_off[i], x_dim[i]);
        off += x_dim[i];
    }
    return x;
}

Vec Layout::stacked_y(const Vec& w) const {
    int total = 0;
    for (int d : y_dim) total += d;
    Vec y(total);
    int off = 0;
    for (std::size_t i = 0; i < y_off.size(); ++i) {
        y.segment(off, y_dim[i]) = w.segment(y_off[i], y_dim[i]);
        off += y_dim[i];
    }
    return y;
}

Layout layout_T(const MsGnep& ms) {
    Layout lo;
    lo.variant = Variant::SemiDecentralized;
    lo.n_rho = ms.n_rho;
    int off = 0;
    for (int i = 0; i < ms.N; ++i) {
        lo.x_off.push_back(off);
        lo.x_dim.push_back(ms.m[i]);
        off += ms.m[i];
    }
    for (int i = 0; i < ms.N; ++i) {
        lo.y_off.push_back(off);
        lo.y_dim.push_back(ms.n[i]);
        off += ms.n[i];
    }
    for (int i = 0; i < ms.N; ++i) {
        lo.mu_off.push_back(off);
        lo.mu_dim.push_back(ms.n_th[i]);
        off += ms.n_th[i];
    }
    lo.lambda_off = off;
    off += ms.n_rho;
    lo.dim = off;
    return lo;
}

Layout layout_S(const MsGnep& ms) {
    Layout lo;
    lo.variant = Variant::Alternative;
    lo.n_rho = ms.n_rho;
    int off = 0;
    for (int i = 0; i < ms.N; ++i) {  // (x_i, y_i) contiguous for the joint projection
        lo.x_off.push_back(off);
        lo.x_dim.push_back(ms.m[i]);
        off += ms.m[i];
        lo.y_off.push_back(off);
        lo.y_dim.push_back(ms.n[i]);
        off += ms.n[i];
    }
    lo.lambda_off = off;
    off += ms.n_rho;
    lo.dim = off;
    return lo;
}

Layout layout_Ttilde(const MsGnep& ms) {
    Layout lo;
    lo.variant = Variant::Distributed;
    lo.n_rho = ms.n_rho;
    int off = 0;
    for (int i = 0; i < ms.N; ++i) {
        lo.x_off.push_back(off);
        lo.x_dim.push_back(ms.m[i]);
        off += ms.m[i];
    }
    for (int i = 0; i < ms.N; ++i) {
        lo.y_off.push_back(off);
        lo.y_dim.push_back(ms.n[i]);
        off += ms.n[i];
    }
    for (int i = 0; i < ms.N; ++i) {
        lo.mu_off.push_back(off);
        lo.mu_dim.push_back(ms.n_th[i]);
        off += ms.n_th[i];
    }
    for (int i = 0; i < ms.N; ++i) {
        lo.lambda_i_off.push_back(off);
        off += ms.n_rho;
    }
    for (int i = 0; i < ms.N; ++i) {
        lo.nu_off.push_back(off);
        off += ms.n_rho;
    }
    lo.dim = off;
    return lo;
}

/* ── forward kernels ───────────────────────────────────────────────── */

namespace {

/* Per-agent rows of B = T2 + T3 + T4; the coupling contribution
 * H_i^d x_i + h_i^c(y_i) is returned for the serial lambda-row sum. */
void forward_T_agent(const MsGnep& ms, const Layout& lo, const Vec& w, const Vec& x_all,
                     const Vec& y_all, int i, Vec& out, Mat& contrib) {
    const auto x_i = w.segment(lo.x_off[i], lo.x_dim[i]);
    const Vec mu_i = w.segment(lo.mu_off[i], lo.mu_dim[i]);
    const auto lambda = w.segment(lo.lambda_off, lo.n_rho);

    Vec xrow = ms.f_agent(i, x_all);
    if (lo.mu_dim[i] > 0) xrow += ms.Gd[i].transpose() * mu_i;
    if (lo.n_rho > 0) xrow += ms.Hd[i].transpose() * lambda;
    out.segment(lo.x_off[i], lo.x_dim[i]) = xrow;

    if (lo.y_dim[i] > 0) {
        const Vec y_i = w.segment(lo.y_off[i], lo.y_dim[i]);
        Vec yrow = ms.fc_agent(i, y_all);
        if (lo.mu_dim[i] > 0) yrow += ms.gc[i].jac(y_i).transpose() * mu_i;
        if (lo.n_rho > 0 && ms.hc[i].rows > 0) yrow += ms.hc[i].jac(y_i).transpose() * lambda;
        out.segment(lo.y_off[i], lo.y_dim[i]) = yrow;
    }

    if (lo.mu_dim[i] > 0) {
        Vec murow = ms.theta[i] - ms.Gd[i] * x_i;
        if (lo.y_dim[i] > 0) murow -= ms.gc[i].eval(w.segment(lo.y_off[i], lo.y_dim[i]));
        out.segment(lo.mu_off[i], lo.mu_dim[i]) = murow;
    }

    if (lo.n_rho > 0) {
        Vec c = ms.Hd[i] * x_i;
        if (lo.y_dim[i] > 0 && ms.hc[i].rows > 0) c += ms.hc[i].eval(w.segment(lo.y_off[i], lo.y_dim[i]));
        contrib.col(i) = c;
    }
}

void eval_T_impl(const MsGnep& ms, const Layout& lo, const Vec& w, Vec& out, bool parallel) {
    if (w.size() != lo.dim) throw std::invalid_argument("eval_forward_T: dimension mismatch");
    out.resize(lo.dim);
    const Vec x_all = lo.stacked_x(w);
    const Vec y_all = lo.stacked_y(w);
    Mat contrib(std::max(lo.n_rho, 1), ms.N);
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < ms.N; ++i) forward_T_agent(ms, lo, w, x_all, y_all, i, out, contrib);
    } else {
        for (int i = 0; i < ms.N; ++i) forward_T_agent(ms, lo, w, x_all, y_all, i, out, contrib);
    }
    if (lo.n_rho > 0) {
        Vec lam_row = ms.rho;
        for (int i = 0; i < ms.N; ++i) lam_row -= contrib.col(i);
        out.segment(lo.lambda_off, lo.n_rho) = lam_row;
    }
}

void forward_S_agent(const MsGnep& ms, const Layout& lo, const Vec& w, const Vec& x_all,
                     const Vec& y_all, int i, Vec& out, Mat& contrib) {
    const auto x_i = w.segment(lo.x_off[i], lo.x_dim[i]);
    const auto lambda = w.segment(lo.lambda_off, lo.n_rho);

    Vec xrow = ms.f_agent(i, x_all);
    if (lo.n_rho > 0) xrow += ms.Hd[i].transpose() * lambda;
    out.segment(lo.x_off[i], lo.x_dim[i]) = xrow;

    if (lo.y_dim[i] > 0) {
        const Vec y_i = w.segment(lo.y_off[i], lo.y_dim[i]);
        Vec yrow = ms.fc_agent(i, y_all);
        if (lo.n_rho > 0 && ms.hc[i].rows > 0) yrow += ms.hc[i].jac(y_i).transpose() * lambda;
        out.segment(lo.y_off[i], lo.y_dim[i]) = yrow;
    }

    if (lo.n_rho > 0) {
        Vec c = ms.Hd[i] * x_i;
        if (lo.y_dim[i] > 0 && ms.hc[i].rows > 0) c += ms.hc[i].eval(w.segment(lo.y_off[i], lo.y_dim[i]));
        contrib.col(i) = c;
    }
}

void eval_S_impl(const MsGnep& ms, const Layout& lo, const Vec& w, Vec& out, bool parallel) {
    if (w.size() != lo.dim) throw std::invalid_argument("eval_forward_S: dimension mismatch");
    out.resize(lo.dim);
    const Vec x_all = lo.stacked_x(w);
    const Vec y_all = lo.stacked_y(w);
    Mat contrib(std::max(lo.n_rho, 1), ms.N);
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < ms.N; ++i) forward_S_agent(ms, lo, w, x_all, y_all, i, out, contrib);
    } else {
        for (int i = 0; i < ms.N; ++i) forward_S_agent(ms, lo, w, x_all, y_all, i, out, contrib);
    }
    if (lo.n_rho > 0) {
        Vec lam_row = ms.rho;
        for (int i = 0; i < ms.N; ++i) lam_row -= contrib.col(i);
        out.segment(lo.lambda_off, lo.n_rho) = lam_row;
    }
}

void forward_Ttilde_agent(const MsGnep& ms, const CommGraph& graph, const Layout& lo, const Vec& w,
                          const Vec& x_all, const Vec& y_all, int i, Vec& out) {
    const int nr = lo.n_rho;
    const auto x_i = w.segment(lo.x_off[i], lo.x_dim[i]);
    const auto lambda_i = w.segment(lo.lambda_i_off[i], nr);
    const Vec mu_i = w.segment(lo.mu_off[i], lo.mu_dim[i]);

    Vec xrow = ms.f_agent(i, x_all);
    if (lo.mu_dim[i] > 0) xrow += ms.Gd[i].transpose() * mu_i;
    if (nr > 0) xrow += ms.Hd[i].transpose() * lambda_i;
    out.segment(lo.x_off[i], lo.x_dim[i]) = xrow;

    if (lo.y_dim[i] > 0) {
        const Vec y_i = w.segment(lo.y_off[i], lo.y_dim[i]);
        Vec yrow = ms.fc_agent(i, y_all);
        if (lo.mu_dim[i] > 0) yrow += ms.gc[i].jac(y_i).transpose() * mu_i;
        if (nr > 0 && ms.hc[i].rows > 0) yrow += ms.hc[i].jac(y_i).transpose() * lambda_i;
        out.segment(lo.y_off[i], lo.y_dim[i]) = yrow;
    }

    if (lo.mu_dim[i] > 0) {
        Vec murow = ms.theta[i] - ms.Gd[i] * x_i;
        if (lo.y_dim[i] > 0) murow -= ms.gc[i].eval(w.segment(lo.y_off[i], lo.y_dim[i]));
        out.segment(lo.mu_off[i], lo.mu_dim[i]) = murow;
    }

    if (nr > 0) {
        Vec lam_row = ms.rho / static_cast<double>(ms.N) - ms.Hd[i] * x_i;
        if (lo.y_dim[i] > 0 && ms.hc[i].rows > 0)
            lam_row -= ms.hc[i].eval(w.segment(lo.y_off[i], lo.y_dim[i]));
        Vec nu_row = Vec::Zero(nr);
        const auto nu_i = w.segment(lo.nu_off[i], nr);
        for (int j = 0; j < graph.n; ++j) {
            const double wij = graph.W(i, j);
            if (wij <= 0.0) continue;
            lam_row -= wij * (nu_i - w.segment(lo.nu_off[j], nr));
            nu_row += wij * (lambda_i - w.segment(lo.lambda_i_off[j], nr));
        }
        out.segment(lo.lambda_i_off[i], nr) = lam_row;
        out.segment(lo.nu_off[i], nr) = nu_row;
    }
}

void eval_Ttilde_impl(const MsGnep& ms, const CommGraph& graph, const Layout& lo, const Vec& w,
                      Vec& out, bool parallel) {
    if (w.size() != lo.dim) throw std::invalid_argument("eval_forward_Ttilde: dimension mismatch");
    if (graph.n != ms.N) throw std::invalid_argument("eval_forward_Ttilde: graph size mismatch");
    out.resize(lo.dim);
    const Vec x_all = lo.stacked_x(w);
    const Vec y_all = lo.stacked_y(w);
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < ms.N; ++i) forward_Ttilde_agent(ms, graph, lo, w, x_all, y_all, i, out);
    } else {
        for (int i = 0; i < ms.N; ++i) forward_Ttilde_agent(ms, graph, lo, w, x_all, y_all, i, out);
    }
}

}  // namespace

void eval_forward_T(const MsGnep& ms, const Vec& w, Vec& out) {
    eval_T_impl(ms, layout_T(ms), w, out, true);
}
void eval_forward_T_serial(const MsGnep& ms, const Vec& w, Vec& out) {
    eval_T_impl(ms, layout_T(ms), w, out, false);
}
void eval_forward_S(const MsGnep& ms, const Vec& w, Vec& out) {
    eval_S_impl(ms, layout_S(ms), w, out, true);
}
void eval_forward_S_serial(const MsGnep& ms, const Vec& w, Vec& out) {
    eval_S_impl(ms, layout_S(ms), w, out, false);
}
void eval_forward_Ttilde(const MsGnep& ms, const CommGraph& graph, const Vec& w, Vec& out) {
    graph.validate();
    eval_Ttilde_impl(ms, graph, layout_Ttilde(ms), w, out, true);
}
void eval_forward_Ttilde_serial(const MsGnep& ms, const CommGraph& graph, const Vec& w, Vec& out) {
    graph.validate();
    eval_Ttilde_impl(ms, graph, layout_Ttilde(ms), w, out, false);
}

/* ── Lipschitz machinery ───────────────────────────────────────────── */

PowerIterResult estimate_spectral_norm(const Mat& M, int max_iters, double rel_tol,
                                       std::uint64_t seed) {
    PowerIterResult res;
    if (M.size() == 0) {
        res.converged = true;
        return res;
    }
    Rng rng(seed);
    Vec v = rng.uniform_vec(static_cast<int>(M.cols()), -1.0, 1.0);
    if (v.norm() == 0.0) v.setOnes();
    v.normalize();
    double lam_prev = 0.0;
    for (int k = 0; k < max_iters; ++k) {
        Vec w = M.transpose() * (M * v);
        const double lam = v.dot(w);
        res.iterations = k + 1;
        if (w.norm() == 0.0) {  // started in the nullspace or M == 0
            res.value = 0.0;
            res.converged = true;
            return res;
        }
        res.residual = std::abs(lam - lam_prev) / std::max(std::abs(lam), 1e-300);
        if (k > 0 && res.residual < rel_tol) {
            res.value = std::sqrt(std::max(lam, 0.0));
            res.converged = true;
            return res;
        }
        lam_prev = lam;
        v = w / w.norm();
    }
    res.value = std::sqrt(std::max(lam_prev, 0.0));
    res.converged = false;
    return res;
}

double step_size_bound(double ell_B, double sigma_phi) {
    if (!(ell_B > 0.0) || !(sigma_phi > 0.0))
        throw std::invalid_argument("step_size_bound: constants must be positive");
    return sigma_phi / (2.0 * ell_B);
}

double sampled_lipschitz(const std::function<Vec(const Vec&)>& F,
                         const std::function<Vec(Rng&)>& sample_domain, int n_pairs,
                         std::uint64_t seed, double safety) {
    Rng rng(seed);
    double worst = 0.0;
    for (int k = 0; k < n_pairs; ++k) {
        const Vec z = sample_domain(rng);
        const Vec zp = sample_domain(rng);
        const double dz = (z - zp).norm();
        if (dz < 1e-12) continue;
        worst = std::max(worst, (F(z) - F(zp)).norm() / dz);
    }
    return safety * worst;
}

Mat assemble_affine_map(const std::function<Vec(const Vec&)>& F, int dim) {
    if (dim == 0) return Mat();
    const Vec f0 = F(Vec::Zero(dim));
    Mat M(f0.size(), dim);
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < dim; ++k) {
        Vec e = Vec::Zero(dim);
        e[k] = 1.0;
        M.col(k) = F(e) - f0;
    }
    return M;
}

Vec sample_domain_point(const MsGnep& ms, const Layout& layout, Rng& rng) {
    Vec w = Vec::Zero(layout.dim);
    for (int i = 0; i < ms.N; ++i) {
        int off = layout.x_off[i];
        for (int mb : ms.block_dims[i]) {
            w.segment(off, mb) = rng.simplex_point(mb);
            off += mb;
        }
        if (layout.y_dim[i] > 0) {
            const auto& set = ms.y_sets[i];
            Vec y(layout.y_dim[i]);
            if (set.kind == SetDesc::Kind::Box || set.kind == SetDesc::Kind::BoxHalfspace) {
                for (int k = 0; k < set.dim; ++k) y[k] = rng.uniform(set.lower[k], set.upper[k]);
            } else if (set.kind == SetDesc::Kind::Product) {
                int yoff = 0;
                for (const auto& c : set.children) {
                    for (int k = 0; k < c.dim; ++k) {
                        const double lo = c.kind == SetDesc::Kind::Box || c.kind == SetDesc::Kind::BoxHalfspace
                                              ? c.lower[k]
                                              : -1.0;
                        const double hi = c.kind == SetDesc::Kind::Box || c.kind == SetDesc::Kind::BoxHalfspace
                                              ? c.upper[k]
                                              : 1.0;
                        y[yoff + k] = rng.uniform(lo, hi);
                    }
                    yoff += c.dim;
                }
            } else {
                y = rng.uniform_vec(set.dim, -1.0, 1.0);
            }
            w.segment(layout.y_off[i], layout.y_dim[i]) = project_euclidean(set, y);
        }
        if (!layout.mu_off.empty() && layout.mu_dim[i] > 0)
            w.segment(layout.mu_off[i], layout.mu_dim[i]) = rng.uniform_vec(layout.mu_dim[i], 0.0, 5.0);
    }
    if (layout.variant == Variant::Distributed) {
        for (int i = 0; i < ms.N; ++i) {
            w.segment(layout.lambda_i_off[i], layout.n_rho) = rng.uniform_vec(layout.n_rho, 0.0, 5.0);
            w.segment(layout.nu_off[i], layout.n_rho) = rng.uniform_vec(layout.n_rho, -5.0, 5.0);
        }
    } else if (layout.n_rho > 0) {
        w.segment(layout.lambda_off, layout.n_rho) = rng.uniform_vec(layout.n_rho, 0.0, 5.0);
    }
    return w;
}

namespace {

double ell_of_pseudogradients(const MsGnep& ms, std::uint64_t seed) {
    double ell_fd = 0.0, ell_fc = 0.0;
    if (ms.m_total > 0) {
        if (ms.fd_affine) {
            const Mat M = assemble_affine_map([&](const Vec& x) { return ms.Fd(x); }, ms.m_total);
            ell_fd = estimate_spectral_norm(M).value;
        } else {
            ell_fd = sampled_lipschitz(
                [&](const Vec& x) { return ms.Fd(x); },
                [&](Rng& rng) {
                    Vec x(ms.m_total);
                    int off = 0;
                    for (int i = 0; i < ms.N; ++i)
                        for (int mb : ms.block_dims[i]) {
                            x.segment(off, mb) = rng.simplex_point(mb);
                            off += mb;
                        }
                    return x;
                },
                2000, seed);
        }
    }
    if (ms.n_total > 0) {
        if (ms.fc_affine) {
            const Mat M = assemble_affine_map([&](const Vec& y) { return ms.Fc(y); }, ms.n_total);
            ell_fc = estimate_spectral_norm(M).value;
        } else if (ms.ell_fc_hint.has_value()) {
            ell_fc = *ms.ell_fc_hint;
        } else {
            ell_fc = sampled_lipschitz(
                [&](const Vec& y) { return ms.Fc(y); },
                [&](Rng& rng) {
                    Vec y(ms.n_total);
                    int off = 0;
                    for (int i = 0; i < ms.N; ++i) {
                        if (ms.n[i] == 0) continue;
                        Vec raw = rng.uniform_vec(ms.n[i], -1.0, 1.0);
                        const auto& set = ms.y_sets[i];
                        if (set.kind == SetDesc::Kind::Box || set.kind == SetDesc::Kind::BoxHalfspace)
                            for (int k = 0; k < set.dim; ++k) raw[k] = rng.uniform(set.lower[k], set.upper[k]);
                        y.segment(off, ms.n[i]) = project_euclidean(set, raw);
                        off += ms.n[i];
                    }
                    return y;
                },
                2000, seed + 1);
        }
    }
    return std::max(ell_fd, ell_fc);
}

Mat stack_T3_matrix(const MsGnep& ms) {
    // rows: n_theta, cols: m + n, block diagonal per agent
    Mat C = Mat::Zero(ms.n_th_total, ms.m_total + ms.n_total);
    for (int i = 0; i < ms.N; ++i) {
        if (ms.n_th[i] == 0) continue;
        C.block(ms.th_offset(i), ms.x_offset(i), ms.n_th[i], ms.m[i]) = ms.Gd[i];
        if (ms.n[i] > 0 && ms.gc[i].rows > 0)
            C.block(ms.th_offset(i), ms.m_total + ms.y_offset(i), ms.n_th[i], ms.n[i]) = ms.gc[i].A;
    }
    return C;
}

Mat stack_T4_matrix(const MsGnep& ms) {
    // rows: n_rho, cols: m + n
    Mat D = Mat::Zero(ms.n_rho, ms.m_total + ms.n_total);
    for (int i = 0; i < ms.N; ++i) {
        if (ms.m[i] > 0) D.block(0, ms.x_offset(i), ms.n_rho, ms.m[i]) = ms.Hd[i];
        if (ms.n[i] > 0 && ms.hc[i].rows > 0)
            D.block(0, ms.m_total + ms.y_offset(i), ms.n_rho, ms.n[i]) = ms.hc[i].A;
    }
    return D;
}

double ell_T3_of(const MsGnep& ms, std::uint64_t seed) {
    if (ms.n_th_total == 0) return 0.0;
    if (ms.constraints_affine) return estimate_spectral_norm(stack_T3_matrix(ms)).value;
    // nonlinear local maps: sampled over the domain with a bounded dual window
    const auto lo = layout_T(ms);
    return sampled_lipschitz(
        [&](const Vec& w) {
            Vec out = Vec::Zero(lo.dim);
            for (int i = 0; i < ms.N; ++i) {
                if (ms.n_th[i] == 0) continue;
                const Vec mu_i = w.segment(lo.mu_off[i], lo.mu_dim[i]);
                out.segment(lo.x_off[i], lo.x_dim[i]) = ms.Gd[i].transpose() * mu_i;
                if (ms.n[i] > 0) {
                    const Vec y_i = w.segment(lo.y_off[i], lo.y_dim[i]);
                    out.segment(lo.y_off[i], lo.y_dim[i]) = ms.gc[i].jac(y_i).transpose() * mu_i;
                    out.segment(lo.mu_off[i], lo.mu_dim[i]) =
                        -ms.Gd[i] * w.segment(lo.x_off[i], lo.x_dim[i]) - ms.gc[i].eval(y_i);
                } else {
                    out.segment(lo.mu_off[i], lo.mu_dim[i]) = -ms.Gd[i] * w.segment(lo.x_off[i], lo.x_dim[i]);
                }
            }
            return out;
        },
        [&](Rng& rng) { return sample_domain_point(ms, lo, rng); }, 2000, seed + 2);
}

double ell_T4_of(const MsGnep& ms, std::uint64_t seed) {
    if (ms.n_rho == 0) return 0.0;
    if (ms.constraints_affine) return estimate_spectral_norm(stack_T4_matrix(ms)).value;
    const auto lo = layout_T(ms);
    return sampled_lipschitz(
        [&](const Vec& w) {
            Vec out = Vec::Zero(ms.m_total + ms.n_total + ms.n_rho);
            const Vec lambda = w.segment(lo.lambda_off, ms.n_rho);
            Vec lam_row = Vec::Zero(ms.n_rho);
            for (int i = 0; i < ms.N; ++i) {
                out.segment(ms.x_offset(i), ms.m[i]) = ms.Hd[i].transpose() * lambda;
                lam_row -= ms.Hd[i] * w.segment(lo.x_off[i], lo.x_dim[i]);
                if (ms.n[i] > 0 && ms.hc[i].rows > 0) {
                    const Vec y_i = w.segment(lo.y_off[i], lo.y_dim[i]);
                    out.segment(ms.m_total + ms.y_offset(i), ms.n[i]) = ms.hc[i].jac(y_i).transpose() * lambda;
                    lam_row -= ms.hc[i].eval(y_i);
                }
            }
            out.tail(ms.n_rho) = lam_row;
            return out;
        },
        [&](Rng& rng) { return sample_domain_point(ms, lo, rng); }, 2000, seed + 3);
}

double ell_T4_distributed(const MsGnep& ms, std::uint64_t seed) {
    if (ms.n_rho == 0) return 0.0;
    if (ms.constraints_affine) {
        double worst = 0.0;
        for (int i = 0; i < ms.N; ++i) {
            Mat Di(ms.n_rho, ms.m[i] + ms.n[i]);
            Di.leftCols(ms.m[i]) = ms.Hd[i];
            if (ms.n[i] > 0 && ms.hc[i].rows > 0)
                Di.rightCols(ms.n[i]) = ms.hc[i].A;
            else if (ms.n[i] > 0)
                Di.rightCols(ms.n[i]).setZero();
            worst = std::max(worst, estimate_spectral_norm(Di, 500, 1e-8, seed + i).value);
        }
        return worst;
    }
    return ell_T4_of(ms, seed);  // sampled fallback dominates the block-diagonal map
}

}  // namespace

LipschitzReport lipschitz_T(const MsGnep& ms, std::uint64_t seed) {
    LipschitzReport rep;
    rep.ell_F = ell_of_pseudogradients(ms, seed);
    rep.ell_T3 = ell_T3_of(ms, seed);
    rep.ell_T4 = ell_T4_of(ms, seed);
    rep.ell_B = std::max({rep.ell_F, rep.ell_T3, rep.ell_T4});
    return rep;
}

LipschitzReport lipschitz_S(const MsGnep& ms, std::uint64_t seed) {
    LipschitzReport rep;
    rep.ell_F = ell_of_pseudogradients(ms, seed);
    rep.ell_T4 = ell_T4_of(ms, seed);  // S3 has the T4 structure
    rep.ell_B = std::max(rep.ell_F, rep.ell_T4);
    return rep;
}

LipschitzReport lipschitz_Ttilde(const MsGnep& ms, const CommGraph& graph, std::uint64_t seed) {
    LipschitzReport rep;
    rep.ell_F = ell_of_pseudogradients(ms, seed);
    rep.ell_T3 = ell_T3_of(ms, seed);
    rep.ell_T4 = ell_T4_distributed(ms, seed);
    rep.ell_cns = consensus_lipschitz(graph);
    rep.ell_B = std::max({rep.ell_F, rep.ell_T3, rep.ell_T4, rep.ell_cns});
    return rep;
}

/* ── problem assembly ──────────────────────────────────────────────── */

RegularizerSpec SplitProblem::regularizer() const {
    RegularizerSpec spec;
    for (const auto& b : blocks) spec.blocks.push_back({b.reg, b.size});
    spec.strong_convexity_modulus = 1.0;
    return spec;
}

SplitProblem make_problem_T(const MsGnep& ms, bool entropy_x, std::uint64_t seed) {
    const Layout lo = layout_T(ms);
    SplitProblem p;
    p.variant = Variant::SemiDecentralized;
    p.dim = lo.dim;
    for (int i = 0; i < ms.N; ++i) {
        int off = lo.x_off[i];
        for (int mb : ms.block_dims[i]) {
            BackwardBlock blk;
            blk.offset = off;
            blk.size = mb;
            blk.reg = entropy_x ? RegKind::GibbsShannon : RegKind::Euclidean;
            blk.set = SetDesc::simplex(mb);
            blk.step_group = i;
            p.blocks.push_back(blk);
            off += mb;
        }
    }
    for (int i = 0; i < ms.N; ++i) {
        if (ms.n[i] == 0) continue;
        BackwardBlock blk;
        blk.offset = lo.y_off[i];
        blk.size = ms.n[i];
        blk.set = ms.y_sets[i];
        blk.step_group = i;
        p.blocks.push_back(blk);
    }
    for (int i = 0; i < ms.N; ++i) {
        if (ms.n_th[i] == 0) continue;
        BackwardBlock blk;
        blk.offset = lo.mu_off[i];
        blk.size = ms.n_th[i];
        blk.set = SetDesc::orthant(ms.n_th[i]);
        blk.step_group = i;
        p.blocks.push_back(blk);
    }
    if (ms.n_rho > 0) {
        BackwardBlock blk;
        blk.offset = lo.lambda_off;
        blk.size = ms.n_rho;
        blk.set = SetDesc::orthant(ms.n_rho);
        blk.step_group = ms.N;  // coordinator
        p.blocks.push_back(blk);
    }
    p.n_step_groups = ms.N + 1;
    p.forward = [ms, lo](const Vec& w, Vec& out) { eval_T_impl(ms, lo, w, out, true); };
    p.lipschitz = lipschitz_T(ms, seed);
    return p;
}

SplitProblem make_problem_S(const MsGnep& ms, bool entropy_x, std::uint64_t seed) {
    if (entropy_x)
        throw std::invalid_argument("make_problem_S: the condensed splitting uses the Euclidean regularizer");
    if (!ms.constraints_affine)
        throw std::invalid_argument("make_problem_S: projection onto Omega_i needs affine local rows");
    const Layout lo = layout_S(ms);
    SplitProblem p;
    p.variant = Variant::Alternative;
    p.dim = lo.dim;
    for (int i = 0; i < ms.N; ++i) {
        BackwardBlock blk;
        blk.offset = lo.x_off[i];
        blk.size = ms.m[i] + ms.n[i];
        blk.step_group = i;
        auto poly = std::make_shared<PolytopeDesc>();
        for (int mb : ms.block_dims[i]) poly->parts.push_back(SetDesc::simplex(mb));
        if (ms.n[i] > 0) poly->parts.push_back(ms.y_sets[i]);
        if (ms.n_th[i] > 0) {
            poly->A = Mat::Zero(ms.n_th[i], blk.size);
            poly->A.leftCols(ms.m[i]) = ms.Gd[i];
            if (ms.n[i] > 0) poly->A.rightCols(ms.n[i]) = ms.gc[i].A;
            poly->b = ms.theta[i] - (ms.gc[i].rows > 0 ? ms.gc[i].offset : Vec::Zero(ms.n_th[i]));
        }
        blk.poly = std::move(poly);
        p.blocks.push_back(blk);
    }
    if (ms.n_rho > 0) {
        BackwardBlock blk;
        blk.offset = lo.lambda_off;
        blk.size = ms.n_rho;
        blk.set = SetDesc::orthant(ms.n_rho);
        blk.step_group = ms.N;
        p.blocks.push_back(blk);
    }
    p.n_step_groups = ms.N + 1;
    p.forward = [ms, lo](const Vec& w, Vec& out) { eval_S_impl(ms, lo, w, out, true); };
    p.lipschitz = lipschitz_S(ms, seed);
    return p;
}

SplitProblem make_problem_Ttilde(const MsGnep& ms, const CommGraph& graph, bool entropy_x,
                                 std::uint64_t seed) {
    graph.validate();
    if (graph.n != ms.N) throw std::invalid_argument("make_problem_Ttilde: graph size mismatch");
    const Layout lo = layout_Ttilde(ms);
    SplitProblem p;
    p.variant = Variant::Distributed;
    p.dim = lo.dim;
    for (int i = 0; i < ms.N; ++i) {
        int off = lo.x_off[i];
        for (int mb : ms.block_dims[i]) {
            BackwardBlock blk;
            blk.offset = off;
            blk.size = mb;
            blk.reg = entropy_x ? RegKind::GibbsShannon : RegKind::Euclidean;
            blk.set = SetDesc::simplex(mb);
            blk.step_group = i;
            p.blocks.push_back(blk);
            off += mb;
        }
    }
    for (int i = 0; i < ms.N; ++i) {
        if (ms.n[i] == 0) continue;
        BackwardBlock blk;
        blk.offset = lo.y_off[i];
        blk.size = ms.n[i];
        blk.set = ms.y_sets[i];
        blk.step_group = i;
        p.blocks.push_back(blk);
    }
    for (int i = 0; i < ms.N; ++i) {
        if (ms.n_th[i] == 0) continue;
        BackwardBlock blk;
        blk.offset = lo.mu_off[i];
        blk.size = ms.n_th[i];
        blk.set = SetDesc::orthant(ms.n_th[i]);
        blk.step_group = i;
        p.blocks.push_back(blk);
    }
    for (int i = 0; i < ms.N && ms.n_rho > 0; ++i) {
        BackwardBlock blk;
        blk.offset = lo.lambda_i_off[i];
        blk.size = ms.n_rho;
        blk.set = SetDesc::orthant(ms.n_rho);
        blk.step_group = i;
        p.blocks.push_back(blk);
    }
    for (int i = 0; i < ms.N && ms.n_rho > 0; ++i) {
        BackwardBlock blk;
        blk.offset = lo.nu_off[i];
        blk.size = ms.n_rho;
        blk.set = SetDesc::free_space(ms.n_rho);
        blk.step_group = i;
        p.blocks.push_back(blk);
    }
    p.n_step_groups = ms.N;
    p.forward = [ms, graph, lo](const Vec& w, Vec& out) { eval_Ttilde_impl(ms, graph, lo, w, out, true); };
    p.lipschitz = lipschitz_Ttilde(ms, graph, seed);
    return p;
}

}  // namespace msgne
