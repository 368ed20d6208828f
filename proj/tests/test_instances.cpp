#include <doctest.h>

#include <cmath>

#include "msgne/instances.hpp"
#include "msgne/verify.hpp"
#include "oracles.hpp"

using namespace msgne;

TEST_CASE("dsm instances expose the two-sided grid coupling") {
    const auto inst = make_dsm_instance(1, 10, 24);
    CHECK(inst.game.n_rho() == 48);
    CHECK(inst.game.agents.size() == 10);
    CHECK(inst.game.agents[0].blocks.size() == 24);
    CHECK(!inst.peak_hours.empty());
    CHECK(inst.peak_hours.size() < 24u / 2u);

    // determinism: identical seeds give identical operator data
    const auto a = compile(make_dsm_instance(5, 3, 6).game);
    const auto b = compile(make_dsm_instance(5, 3, 6).game);
    CHECK((a.rho - b.rho).lpNorm<Eigen::Infinity>() == 0.0);
    for (int i = 0; i < a.N; ++i) {
        CHECK((a.Gd[i] - b.Gd[i]).lpNorm<Eigen::Infinity>() == 0.0);
        CHECK((a.hc[i].A - b.hc[i].A).lpNorm<Eigen::Infinity>() == 0.0);
    }
    Rng rng(2);
    const Vec y = rng.uniform_vec(a.n_total, 0.0, 10.0);
    CHECK((a.Fc(y) - b.Fc(y)).lpNorm<Eigen::Infinity>() == 0.0);

    CHECK_THROWS_AS(make_dsm_instance(1, 40, 24), std::invalid_argument);
}

TEST_CASE("dsm gradient matches the electricity-cost finite differences") {
    const auto inst = make_dsm_instance(3, 3, 5);
    const auto ms = compile(inst.game);
    const int T = inst.T;
    // J_i = sum_t r (P_t + S_t) s_{i,t} reconstructed from the instance data
    auto cost_value = [&](int i, const Vec& y_all) {
        double total = 0.0;
        for (int t = 0; t < T; ++t) {
            double p_tot = 0.0, s_all = 0.0;
            for (int k = 0; k < inst.N; ++k) {
                p_tot += inst.inflexible(k, t);
                s_all += y_all[k * T + t];
            }
            total += 0.1 * (p_tot + s_all) * y_all[i * T + t];
        }
        return total;
    };
    Rng rng(4);
    const Vec y_full = rng.uniform_vec(ms.n_total, 0.0, 30.0);
    for (int i = 0; i < inst.N; ++i) {
        // perturb only the agent's own block; the oracle returns that block
        auto assemble = [&](const Vec& own) {
            Vec y = y_full;
            y.segment(i * T, T) = own;
            return y;
        };
        const double err = finite_difference_check(
            [&](const Vec& own) { return cost_value(i, assemble(own)); },
            [&](const Vec& own) { return ms.fc_agent(i, assemble(own)); },
            y_full.segment(i * T, T), 1e-5);
        CHECK(err < 1e-6);
    }
}

TEST_CASE("cournot pseudogradient is strongly monotone with the sampled modulus") {
    const auto inst = make_cournot_instance(7, 5, 3);
    const auto ms = compile(inst.game);
    const double sigma = inst.q.minCoeff();
    Rng rng(11);
    for (int t = 0; t < 200; ++t) {
        const Vec y = rng.uniform_vec(ms.n_total, 0.0, 2.0);
        const Vec yp = rng.uniform_vec(ms.n_total, 0.0, 2.0);
        const double ip = (ms.Fc(y) - ms.Fc(yp)).dot(y - yp);
        CHECK(ip >= sigma * (y - yp).squaredNorm() - 1e-9);
    }
}

TEST_CASE("cournot local rows tie bids to participation") {
    const auto inst = make_cournot_instance(19, 4, 3);
    const auto ms = compile(inst.game);
    for (int i = 0; i < 4; ++i) {
        CHECK(ms.n_th[i] == 6);
        CHECK(ms.n[i] == 3);
        // at x = pure "no participation", E[a] = 0: rows force y <= 0
        Vec x_i = Vec::Zero(ms.m[i]);
        x_i[0] = 1.0;  // lexicographically first action is all-zeros
        const Vec gx = ms.Gd[i] * x_i;
        CHECK(gx.lpNorm<Eigen::Infinity>() < 1e-12);
    }
}

TEST_CASE("flow instances keep congestion denominators positive") {
    const auto inst = make_flow_instance(23, 6, 4);
    const auto ms = compile(inst.game);
    // extreme point: everyone ships the maximum
    Vec y(ms.n_total);
    for (int i = 0; i < inst.N; ++i) y[i] = inst.a_bar[i];
    const Vec g = ms.Fc(y);
    CHECK(g.allFinite());
    CHECK(g.minCoeff() > 0.0);

    // own-smooth expected cost vector: f_j = d ln(e (1 + a_j)) increasing in a
    Rng rng(2);
    Vec x(ms.m_total);
    int off = 0;
    for (int i = 0; i < ms.N; ++i)
        for (int mb : ms.block_dims[i]) {
            x.segment(off, mb) = rng.simplex_point(mb);
            off += mb;
        }
    const Vec f = ms.Fd(x);
    off = 0;
    for (int i = 0; i < ms.N; ++i) {
        for (int j = 0; j + 1 < ms.m[i]; ++j) CHECK(f[off + j] < f[off + j + 1]);
        off += ms.m[i];
    }
}

TEST_CASE("pwa reformulation: single-region big-M and forced epigraph value") {
    PwaGameSpec spec;
    PwaAgent ag;
    ag.y_lower = Vec::Zero(1);
    ag.y_upper = Vec::Constant(1, 2.0);
    PwaRegion reg;
    reg.lower = Vec::Zero(1);
    reg.upper = Vec::Constant(1, 2.0);
    reg.c = Vec::Ones(1);
    reg.b = 0.0;
    ag.regions = {reg};
    ag.hc = ConstraintMap::zero_map(0, 1);
    spec.agents = {ag};
    spec.rho = Vec();

    const auto game = reformulate_pwa(spec);
    REQUIRE(game.agents.size() == 1);
    const auto& rag = game.agents[0];
    CHECK(rag.blocks.size() == 3);  // delta, alpha, beta
    CHECK(rag.theta.size() == 11);
    // z box bounds derived from m = 0, M = 2
    CHECK(rag.y_set.upper[1] == doctest::Approx(3.0));
    CHECK(rag.y_set.lower[1] == doctest::Approx(-1.0));

    const auto [Gd, Hd] = relax_constraints(rag, 0);
    const Vec y = Vec::Constant(1, 1.5);
    const auto cost = oracles::pwa_pattern_min_cost(Gd, rag.gc.A, rag.theta, 1, 1, y);
    REQUIRE(cost.has_value());
    CHECK(*cost == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("pwa reformulation: two regions select the active piece") {
    PwaGameSpec spec;
    PwaAgent ag;
    ag.y_lower = Vec::Zero(1);
    ag.y_upper = Vec::Constant(1, 2.0);
    PwaRegion r1, r2;
    r1.lower = Vec::Zero(1);
    r1.upper = Vec::Constant(1, 1.0);
    r1.c = Vec::Zero(1);
    r1.b = 0.0;
    r2.lower = Vec::Constant(1, 1.0 + 1e-6);
    r2.upper = Vec::Constant(1, 2.0);
    r2.c = Vec::Ones(1);
    r2.b = 0.0;
    ag.regions = {r1, r2};
    ag.hc = ConstraintMap::zero_map(0, 1);
    spec.agents = {ag};
    spec.rho = Vec();

    const auto game = reformulate_pwa(spec);
    const auto& rag = game.agents[0];
    const auto [Gd, Hd] = relax_constraints(rag, 0);

    const auto at_low = oracles::pwa_pattern_min_cost(Gd, rag.gc.A, rag.theta, 1, 2, Vec::Constant(1, 0.5));
    REQUIRE(at_low.has_value());
    CHECK(*at_low == doctest::Approx(0.0).epsilon(1e-9));

    const auto at_high = oracles::pwa_pattern_min_cost(Gd, rag.gc.A, rag.theta, 1, 2, Vec::Constant(1, 1.7));
    REQUIRE(at_high.has_value());
    CHECK(*at_high == doctest::Approx(1.7).epsilon(1e-9));
}

TEST_CASE("pwa product-linearization rows are tight-feasible at all-ones") {
    // -alpha + delta <= 0, -beta + delta <= 0, alpha + beta - delta <= 1
    const double alpha = 1.0, beta = 1.0, delta = 1.0;
    CHECK(-alpha + delta <= 0.0);
    CHECK(-beta + delta <= 0.0);
    CHECK(alpha + beta - delta == 1.0);
}

TEST_CASE("pwa rejects overlapping regions") {
    PwaGameSpec spec;
    PwaAgent ag;
    ag.y_lower = Vec::Zero(1);
    ag.y_upper = Vec::Constant(1, 2.0);
    PwaRegion r1, r2;
    r1.lower = Vec::Zero(1);
    r1.upper = Vec::Constant(1, 1.2);
    r1.c = Vec::Zero(1);
    r2.lower = Vec::Constant(1, 1.0);
    r2.upper = Vec::Constant(1, 2.0);
    r2.c = Vec::Zero(1);
    ag.regions = {r1, r2};
    ag.hc = ConstraintMap::zero_map(0, 1);
    spec.agents = {ag};
    spec.rho = Vec();
    CHECK_THROWS_AS(reformulate_pwa(spec), std::invalid_argument);
}

TEST_CASE("pwa value identity on seeded instances") {
    for (std::uint64_t seed : {101ull, 102ull}) {
        const auto inst = make_pwa_instance(seed, 2, 3);
        Rng rng(seed + 7);
        for (std::size_t i = 0; i < inst.spec.agents.size(); ++i) {
            const auto& src = inst.spec.agents[i];
            const auto& rag = inst.game.agents[i];
            const int p = static_cast<int>(src.regions.size());
            const auto [Gd, Hd] = relax_constraints(rag, inst.game.n_rho());
            for (int t = 0; t < 20; ++t) {
                const int r = rng.uniform_int(0, p - 1);
                const auto& reg = src.regions[r];
                const double width = reg.upper[0] - reg.lower[0];
                const Vec y = Vec::Constant(1, reg.lower[0] + rng.uniform(0.05, 0.95) * width);
                const double truth = reg.c[0] * y[0] + reg.b;
                const auto cost = oracles::pwa_pattern_min_cost(Gd, rag.gc.A, rag.theta, 1, p, y);
                REQUIRE(cost.has_value());
                CHECK(std::abs(*cost - truth) < 1e-8);
            }
        }
    }
}
