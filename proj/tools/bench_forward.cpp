#include <chrono>
#include <cstdio>

#include "msgne/instances.hpp"
#include "msgne/operators.hpp"
#include "msgne/solvers.hpp"

using namespace msgne;

/* Times the OpenMP forward kernels against the serial reference on the
 * heavier desk instances. Run with MSGNE_THREADS to pin the thread count. */

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
    fn();  // warm up
    const auto start = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) fn();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count() / reps;
}

void bench_case(const char* name, const MsGnep& ms, int reps) {
    const auto layout = layout_T(ms);
    Rng rng(7);
    const Vec w = sample_domain_point(ms, layout, rng);
    Vec out_par(layout.dim), out_ser(layout.dim);

    const double t_par = time_ms([&] { eval_forward_T(ms, w, out_par); }, reps);
    const double t_ser = time_ms([&] { eval_forward_T_serial(ms, w, out_ser); }, reps);
    const double diff = (out_par - out_ser).lpNorm<Eigen::Infinity>();

    std::printf("%-28s dim=%6d  serial %9.3f ms  parallel %9.3f ms  speedup %5.2fx  |diff| %.1e\n",
                name, layout.dim, t_ser, t_par, t_ser / t_par, diff);
}

GmiGame big_tensor_game() {
    // four agents, 30 actions each: the contraction walks 810k joint actions
    GmiGame game;
    game.rho = Vec();
    Rng rng(11);
    const int N = 4, m = 30;
    std::vector<std::vector<double>> values(N);
    std::size_t joint = 1;
    for (int i = 0; i < N; ++i) joint *= m;
    for (int i = 0; i < N; ++i) {
        values[i].resize(joint);
        for (auto& v : values[i]) v = rng.uniform(-1.0, 1.0);
    }
    for (int i = 0; i < N; ++i) {
        AgentSpec ag;
        ActionBlock blk;
        for (int j = 0; j < m; ++j) blk.actions.push_back(IVec::Constant(1, j));
        ag.blocks = {blk};
        ag.y_set = SetDesc::free_space(0);
        ag.gc = ConstraintMap::zero_map(0, 0);
        ag.hc = ConstraintMap::zero_map(0, 0);
        TensorCost t;
        t.values = values[i];
        ag.cost_d = std::move(t);
        game.agents.push_back(std::move(ag));
    }
    return game;
}

}  // namespace

int main() {
    apply_thread_cap();
    std::printf("forward-kernel benchmark, %d thread(s)\n", max_threads());

    bench_case("tensor 4x30 (810k joint)", compile(big_tensor_game()), 20);
    bench_case("dsm N=30 T=24", compile(make_dsm_instance(3, 30, 24).game), 50);
    bench_case("cournot N=30 M=9", compile(make_cournot_instance(3, 30, 9).game), 20);
    return 0;
}
