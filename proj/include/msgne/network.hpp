#pragma once

#include <optional>

#include "msgne/common.hpp"

namespace msgne {

/* Weighted undirected communication graph over which the dual copies reach
 * consensus. W must be symmetric, nonnegative and hollow; the positive-weight
 * edges must form a single connected component. */
struct CommGraph {
    int n = 0;
    Mat W;

    std::vector<std::vector<std::pair<int, double>>> neighbors() const;  // ascending ids
    bool connected() const;
    void validate() const;
};

CommGraph make_graph(Mat W);
CommGraph make_ring(int n, double w = 1.0);
CommGraph make_star(int n, double w = 1.0);
CommGraph make_complete(int n, double w = 1.0);
/* Erdos-Renyi with edge probability p; resamples until connected. */
CommGraph make_erdos(int n, double p, std::uint64_t seed);

/* L = diag(row sums) - W; symmetric positive semidefinite with L 1 = 0. */
Mat laplacian(const Mat& W);

/* Lipschitz bound of the consensus operator: 2 max_i sum_j w_ij. */
double consensus_lipschitz(const CommGraph& g);

/* Synchronous message rounds: every node deposits its payload for round k,
 * then the exchange delivers exactly the graph neighbors' round-k values,
 * ordered by ascending node index. A missing deposit aborts the round naming
 * the offending node. In-process only; no sockets. */
class SyncExchange {
public:
    explicit SyncExchange(const CommGraph& g);

    void deposit(int node, Vec value);

    /* Runs the round barrier; outbox[i] lists (neighbor id, neighbor value).
     * Clears the mailboxes for the next round. */
    std::vector<std::vector<std::pair<int, Vec>>> exchange();

    int round() const { return round_; }

private:
    CommGraph graph_;
    std::vector<std::vector<std::pair<int, double>>> adj_;
    std::vector<std::optional<Vec>> inbox_;
    int round_ = 0;
};

}  // namespace msgne
