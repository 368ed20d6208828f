#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace msgne {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using IVec = Eigen::VectorXi;

/* Deterministic pseudo-random source. All stochastic choices in the library
 * (instance generation, Lipschitz sampling, power-iteration starts) go
 * through this class so that a fixed seed reproduces the same numbers; the
 * standard <random> distributions are implementation-defined and are
 * deliberately not used. */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed == 0 ? 0x9e3779b97f4a7c15ull : seed) {
        // warm up so that nearby seeds decorrelate
        for (int i = 0; i < 8; ++i) next();
    }

    std::uint64_t next() {
        // xorshift64*
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 0x2545f4914f6cdd1dull;
    }

    /* uniform in [0, 1) with 53 random bits */
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /* integer in [a, b], inclusive */
    int uniform_int(int a, int b) {
        if (b < a) throw std::invalid_argument("Rng::uniform_int: empty range");
        const auto span = static_cast<std::uint64_t>(b - a) + 1;
        return a + static_cast<int>(next() % span);
    }

    Vec uniform_vec(int n, double a, double b) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = uniform(a, b);
        return v;
    }

    /* point in the relative interior of the probability simplex */
    Vec simplex_point(int n) {
        Vec v(n);
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            v[i] = 0.05 + uniform();
            s += v[i];
        }
        return v / s;
    }

private:
    std::uint64_t state_;
};

/* Number of OpenMP threads the kernels may use; respects MSGNE_THREADS. */
int max_threads();

/* Apply MSGNE_THREADS (if set) to the OpenMP runtime. Called by the solvers
 * and the CLI; idempotent. */
void apply_thread_cap();

}  // namespace msgne
