#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "msgne/network.hpp"
#include "oracles.hpp"

using namespace msgne;

TEST_CASE("laplacian of the unit ring and the path graph") {
    const auto ring = make_ring(3);
    const Mat L = laplacian(ring.W);
    Mat expected(3, 3);
    expected << 2, -1, -1, -1, 2, -1, -1, -1, 2;
    CHECK((L - expected).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((L * Vec::Ones(3)).lpNorm<Eigen::Infinity>() == 0.0);

    Mat Wpath = Mat::Zero(3, 3);
    Wpath(0, 1) = Wpath(1, 0) = 1.0;
    Wpath(1, 2) = Wpath(2, 1) = 1.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(laplacian(Wpath));
    const Vec ev = es.eigenvalues();
    CHECK(ev[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ev[1] == doctest::Approx(1.0));
    CHECK(ev[2] == doctest::Approx(3.0));

    Mat bad = Mat::Zero(2, 2);
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS(laplacian(bad), std::invalid_argument);
}

TEST_CASE("consensus Lipschitz constant") {
    CHECK(consensus_lipschitz(make_ring(3)) == doctest::Approx(4.0));
    CHECK(consensus_lipschitz(make_star(5)) == doctest::Approx(8.0));

    for (int t = 0; t < 100; ++t) {
        const auto g = make_erdos(4 + t % 10, 0.5, 1000 + t);
        CHECK(consensus_lipschitz(g) >= oracles::svd_norm(laplacian(g.W)) - 1e-9);
    }
}

TEST_CASE("laplacian quadratic form and consensus kernel") {
    Rng rng(5);
    for (int t = 0; t < 20; ++t) {
        const auto g = make_erdos(3 + t % 18, 0.4, 77 + t);
        const Mat L = laplacian(g.W);
        const Vec x = rng.uniform_vec(g.n, -2.0, 2.0);
        double form = 0.0;
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j) form += 0.5 * g.W(i, j) * (x[i] - x[j]) * (x[i] - x[j]);
        CHECK(x.dot(L * x) == doctest::Approx(form).epsilon(1e-10));
        CHECK(x.dot(L * x) >= -1e-12);

        // kernel is exactly the consensus subspace on connected graphs
        CHECK((L * Vec::Ones(g.n)).lpNorm<Eigen::Infinity>() < 1e-12);
        Eigen::SelfAdjointEigenSolver<Mat> es(L);
        CHECK(es.eigenvalues()[1] > 1e-9);  // algebraic connectivity positive
    }
}

TEST_CASE("graph validation") {
    Mat W = Mat::Zero(3, 3);
    W(0, 1) = 1.0;  // asymmetric
    CommGraph g;
    g.n = 3;
    g.W = W;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);

    Mat W2 = Mat::Zero(4, 4);
    W2(0, 1) = W2(1, 0) = 1.0;  // disconnected
    CommGraph g2;
    g2.n = 4;
    g2.W = W2;
    CHECK_THROWS_AS(g2.validate(), std::invalid_argument);
}

TEST_CASE("synchronous rounds deliver exactly the neighbor values") {
    {
        SyncExchange ex(make_complete(2));
        ex.deposit(0, Vec::Constant(1, 10.0));
        ex.deposit(1, Vec::Constant(1, 20.0));
        const auto out = ex.exchange();
        REQUIRE(out[0].size() == 1);
        CHECK(out[0][0].first == 1);
        CHECK(out[0][0].second[0] == 20.0);
        CHECK(out[1][0].second[0] == 10.0);
    }
    {
        const int n = 6;
        SyncExchange ex(make_ring(n));
        for (int i = 0; i < n; ++i) ex.deposit(i, Vec::Constant(1, static_cast<double>(i)));
        const auto out = ex.exchange();
        REQUIRE(out[0].size() == 2);  // ring neighbors only, ascending ids
        CHECK(out[0][0].first == 1);
        CHECK(out[0][1].first == n - 1);
    }
    {
        SyncExchange ex(make_ring(3));
        ex.deposit(0, Vec::Ones(1));
        ex.deposit(2, Vec::Ones(1));
        CHECK_THROWS_WITH_AS(ex.exchange(), doctest::Contains("node 1"), std::runtime_error);
    }
}
