#include "msgne/network.hpp"

#include <optional>

namespace msgne {

std::vector<std::vector<std::pair<int, double>>> CommGraph::neighbors() const {
    std::vector<std::vector<std::pair<int, double>>> adj(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (j != i && W(i, j) > 0.0) adj[i].emplace_back(j, W(i, j));
    return adj;
}

bool CommGraph::connected() const {
    if (n == 0) return false;
    std::vector<bool> seen(n, false);
    std::vector<int> stack = {0};
    seen[0] = true;
    int reached = 1;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int j = 0; j < n; ++j) {
            if (!seen[j] && W(v, j) > 0.0) {
                seen[j] = true;
                ++reached;
                stack.push_back(j);
            }
        }
    }
    return reached == n;
}

void CommGraph::validate() const {
    if (W.rows() != n || W.cols() != n) throw std::invalid_argument("CommGraph: W must be n x n");
    for (int i = 0; i < n; ++i) {
        if (W(i, i) != 0.0) throw std::invalid_argument("CommGraph: W must have zero diagonal");
        for (int j = 0; j < n; ++j) {
            if (W(i, j) < 0.0) throw std::invalid_argument("CommGraph: negative weight");
            if (W(i, j) != W(j, i)) throw std::invalid_argument("CommGraph: W must be symmetric");
        }
    }
    if (!connected()) throw std::invalid_argument("CommGraph: graph is not connected");
}

CommGraph make_graph(Mat W) {
    CommGraph g;
    g.n = static_cast<int>(W.rows());
    g.W = std::move(W);
    g.validate();
    return g;
}

CommGraph make_ring(int n, double w) {
    if (n < 2) throw std::invalid_argument("make_ring: need at least 2 nodes");
    Mat W = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        W(i, j) = W(j, i) = w;
    }
    return make_graph(std::move(W));
}

CommGraph make_star(int n, double w) {
    if (n < 2) throw std::invalid_argument("make_star: need at least 2 nodes");
    Mat W = Mat::Zero(n, n);
    for (int i = 1; i < n; ++i) W(0, i) = W(i, 0) = w;
    return make_graph(std::move(W));
}

CommGraph make_complete(int n, double w) {
    if (n < 2) throw std::invalid_argument("make_complete: need at least 2 nodes");
    Mat W = Mat::Constant(n, n, w);
    W.diagonal().setZero();
    return make_graph(std::move(W));
}

CommGraph make_erdos(int n, double p, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("make_erdos: need at least 2 nodes");
    Rng rng(seed);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Mat W = Mat::Zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (rng.uniform() < p) W(i, j) = W(j, i) = rng.uniform(0.5, 1.5);
        CommGraph g;
        g.n = n;
        g.W = std::move(W);
        if (g.connected()) return g;
    }
    throw std::runtime_error("make_erdos: no connected sample after 1000 attempts");
}

Mat laplacian(const Mat& W) {
    const int n = static_cast<int>(W.rows());
    if (W.cols() != n) throw std::invalid_argument("laplacian: W must be square");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (W(i, j) != W(j, i)) throw std::invalid_argument("laplacian: W must be symmetric");
    Mat L = -W;
    for (int i = 0; i < n; ++i) L(i, i) = W.row(i).sum() - W(i, i);
    return L;
}

double consensus_lipschitz(const CommGraph& g) {
    double worst = 0.0;
    for (int i = 0; i < g.n; ++i) worst = std::max(worst, g.W.row(i).sum());
    return 2.0 * worst;
}

SyncExchange::SyncExchange(const CommGraph& g) : graph_(g), adj_(g.neighbors()), inbox_(g.n) {
    graph_.validate();
}

void SyncExchange::deposit(int node, Vec value) {
    if (node < 0 || node >= graph_.n) throw std::invalid_argument("SyncExchange: unknown node");
    inbox_[node] = std::move(value);
}

std::vector<std::vector<std::pair<int, Vec>>> SyncExchange::exchange() {
    for (int i = 0; i < graph_.n; ++i)
        if (!inbox_[i].has_value())
            throw std::runtime_error("SyncExchange: round " + std::to_string(round_) +
                                     " aborted, node " + std::to_string(i) + " did not deposit");
    std::vector<std::vector<std::pair<int, Vec>>> out(graph_.n);
    for (int i = 0; i < graph_.n; ++i)
        for (const auto& [j, w] : adj_[i]) out[i].emplace_back(j, *inbox_[j]);
    for (auto& slot : inbox_) slot.reset();
    ++round_;
    return out;
}

}  // namespace msgne
