#include "msgne/verify.hpp"

#include <cmath>

namespace msgne {

EquilibriumCertificate kkt_residual(const SplitProblem& problem, const MsGnep& ms,
                                    const Layout& layout, const Vec& gamma_groups, const Vec& w) {
    EquilibriumCertificate cert;

    Vec B_w(problem.dim), w_next(problem.dim), B_again(problem.dim);
    problem.forward(w, B_w);
    bforb_step(problem, gamma_groups, w, B_w, w_next, B_again);
    cert.fixed_point_residual_inf = (w - w_next).lpNorm<Eigen::Infinity>();

    const Vec x = layout.stacked_x(w);
    const Vec y = layout.stacked_y(w);
    cert.coupling_violation_inf = ms.coupling_violation(x, y);
    cert.local_violation_inf = ms.local_violation(x, y);

    double gap = 0.0;
    if (!layout.mu_off.empty()) {
        for (int i = 0; i < ms.N; ++i) {
            if (layout.mu_dim[i] == 0) continue;
            Vec slack = ms.theta[i] - ms.Gd[i] * w.segment(layout.x_off[i], layout.x_dim[i]);
            if (ms.n[i] > 0 && ms.gc[i].rows > 0)
                slack -= ms.gc[i].eval(w.segment(layout.y_off[i], layout.y_dim[i]));
            const Vec mu = w.segment(layout.mu_off[i], layout.mu_dim[i]);
            gap = std::max(gap, mu.cwiseProduct(slack).cwiseAbs().maxCoeff());
        }
    }
    if (ms.n_rho > 0) {
        const Vec slack = ms.rho - ms.coupling_value(x, y);
        Vec lambda;
        if (layout.variant == Variant::Distributed) {
            lambda = Vec::Zero(ms.n_rho);
            for (int i = 0; i < ms.N; ++i) lambda += w.segment(layout.lambda_i_off[i], ms.n_rho);
            lambda /= static_cast<double>(ms.N);
        } else {
            lambda = w.segment(layout.lambda_off, ms.n_rho);
        }
        gap = std::max(gap, lambda.cwiseProduct(slack).cwiseAbs().maxCoeff());
    }
    cert.complementarity_gap = gap;

    if (ms.n_total == 0 && ms.n_th_total == 0 && ms.n_rho == 0)
        cert.exploitability = exploitability(ms, x);
    return cert;
}

double exploitability(const MsGnep& ms, const Vec& x_stacked) {
    if (ms.n_total > 0 || ms.n_th_total > 0 || ms.n_rho > 0)
        throw std::invalid_argument("exploitability: defined only for plain finite games");
    if (x_stacked.size() != ms.m_total) throw std::invalid_argument("exploitability: profile size mismatch");
    double total = 0.0;
    for (int i = 0; i < ms.N; ++i) {
        const Vec f = ms.f_agent(i, x_stacked);
        const Vec x_i = x_stacked.segment(ms.x_offset(i), ms.m[i]);
        total += f.dot(x_i) - f.minCoeff();
    }
    return total;
}

MonotonicityResult monotonicity_sample(const std::function<Vec(const Vec&)>& F,
                                       const std::function<Vec(Rng&)>& sample_domain, int n_pairs,
                                       std::uint64_t seed) {
    Rng rng(seed);
    MonotonicityResult res;
    res.min_inner_product = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n_pairs; ++k) {
        const Vec z = sample_domain(rng);
        const Vec zp = sample_domain(rng);
        const double ip = (F(z) - F(zp)).dot(z - zp);
        if (ip < res.min_inner_product) {
            res.min_inner_product = ip;
            if (ip < -1e-8) {
                res.witness_a = z;
                res.witness_b = zp;
                res.certified_failure = true;
            }
        }
    }
    if (n_pairs == 0) res.min_inner_product = 0.0;
    return res;
}

std::vector<IVec> round_to_pure(const GmiGame& game, const Vec& x_stacked) {
    std::vector<IVec> out;
    int off = 0;
    for (const auto& ag : game.agents) {
        std::vector<int> coords;
        for (const auto& blk : ag.blocks) {
            int best = 0;
            for (int j = 1; j < blk.m(); ++j)
                if (x_stacked[off + j] > x_stacked[off + best]) best = j;
            for (int k = 0; k < blk.p(); ++k) coords.push_back(blk.actions[best][k]);
            off += blk.m();
        }
        IVec a(static_cast<int>(coords.size()));
        for (std::size_t k = 0; k < coords.size(); ++k) a[static_cast<int>(k)] = coords[k];
        out.push_back(std::move(a));
    }
    if (off != x_stacked.size()) throw std::invalid_argument("round_to_pure: profile size mismatch");
    return out;
}

double finite_difference_check(const std::function<double(const Vec&)>& f,
                               const std::function<Vec(const Vec&)>& grad, const Vec& point,
                               double h) {
    if (!(h >= 1e-8 && h <= 1e-4)) throw std::invalid_argument("finite_difference_check: h out of range");
    const Vec g = grad(point);
    double worst = 0.0;
    for (int k = 0; k < point.size(); ++k) {
        Vec hi = point, lo = point;
        hi[k] += h;
        lo[k] -= h;
        const double fd = (f(hi) - f(lo)) / (2.0 * h);
        const double scale = std::max({std::abs(g[k]), std::abs(fd), 1e-8});
        worst = std::max(worst, std::abs(fd - g[k]) / scale);
    }
    return worst;
}

}  // namespace msgne
