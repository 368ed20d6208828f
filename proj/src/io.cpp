#include "msgne/io.hpp"

#include <fstream>

namespace msgne {

namespace {

Json mat_to_json(const Mat& M) {
    Json rows = Json::array();
    for (int r = 0; r < M.rows(); ++r) {
        Json row = Json::array();
        for (int c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Mat mat_from_json(const Json& j, int expected_cols = -1) {
    if (j.empty()) return Mat(0, std::max(expected_cols, 0));
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j[0].size());
    Mat M(rows, cols);
    for (int r = 0; r < rows; ++r) {
        if (static_cast<int>(j[r].size()) != cols) throw std::invalid_argument("ragged matrix in file");
        for (int c = 0; c < cols; ++c) M(r, c) = j[r][c].get<double>();
    }
    return M;
}

Json vec_to_json(const Vec& v) {
    Json a = Json::array();
    for (int k = 0; k < v.size(); ++k) a.push_back(v[k]);
    return a;
}

Vec vec_from_json(const Json& j) {
    Vec v(static_cast<int>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) v[static_cast<int>(k)] = j[k].get<double>();
    return v;
}

Json block_to_json(const ActionBlock& blk) {
    Json actions = Json::array();
    for (const auto& a : blk.actions) {
        Json row = Json::array();
        for (int k = 0; k < a.size(); ++k) row.push_back(a[k]);
        actions.push_back(std::move(row));
    }
    return actions;
}

ActionBlock block_from_json(const Json& j) {
    ActionBlock blk;
    for (const auto& row : j) {
        IVec a(static_cast<int>(row.size()));
        for (std::size_t k = 0; k < row.size(); ++k) a[static_cast<int>(k)] = row[k].get<int>();
        blk.actions.push_back(std::move(a));
    }
    return blk;
}

Json set_to_json(const SetDesc& s);

Json set_to_json(const SetDesc& s) {
    Json j;
    switch (s.kind) {
        case SetDesc::Kind::Box:
            j["y_box"] = {{"lower", vec_to_json(s.lower)}, {"upper", vec_to_json(s.upper)}};
            break;
        case SetDesc::Kind::BoxHalfspace:
            j["y_box"] = {{"lower", vec_to_json(s.lower)}, {"upper", vec_to_json(s.upper)}};
            j["y_halfspace"] = {{"a", vec_to_json(s.a)}, {"b", s.b}};
            break;
        case SetDesc::Kind::Product: {
            Json factors = Json::array();
            for (const auto& c : s.children) factors.push_back(set_to_json(c));
            j["y_product"] = std::move(factors);
            break;
        }
        case SetDesc::Kind::Free:
            if (s.dim > 0) throw std::invalid_argument("save_game: free continuous sets are not representable");
            break;
        default:
            throw std::invalid_argument("save_game: continuous set kind not representable");
    }
    return j;
}

SetDesc set_from_json(const Json& j) {
    if (j.contains("y_product")) {
        std::vector<SetDesc> factors;
        for (const auto& f : j["y_product"]) factors.push_back(set_from_json(f));
        return SetDesc::product(std::move(factors));
    }
    if (!j.contains("y_box")) return SetDesc::free_space(0);
    Vec lo = vec_from_json(j["y_box"]["lower"]);
    Vec hi = vec_from_json(j["y_box"]["upper"]);
    if (j.contains("y_halfspace"))
        return SetDesc::box_halfspace(std::move(lo), std::move(hi),
                                      vec_from_json(j["y_halfspace"]["a"]),
                                      j["y_halfspace"]["b"].get<double>());
    return SetDesc::box(std::move(lo), std::move(hi));
}

/* Assemble a dense representation of an affine gradient: grad = Q y + q. */
std::pair<Mat, Vec> probe_affine_gradient(const std::function<Vec(const Vec&)>& grad, int n_total) {
    const Vec q = grad(Vec::Zero(n_total));
    Mat Q(q.size(), n_total);
    for (int k = 0; k < n_total; ++k) {
        Vec e = Vec::Zero(n_total);
        e[k] = 1.0;
        Q.col(k) = grad(e) - q;
    }
    return {Q, q};
}

}  // namespace

Json game_to_json(const GmiGame& game) {
    game.validate();
    int n_total = 0;
    for (const auto& ag : game.agents) n_total += ag.n();

    Json j;
    Json agents = Json::array();
    for (const auto& ag : game.agents) {
        Json a;
        if (ag.blocks.size() == 1) {
            a["actions"] = block_to_json(ag.blocks[0]);
        } else {
            Json blocks = Json::array();
            for (const auto& blk : ag.blocks) blocks.push_back(block_to_json(blk));
            a["blocks"] = std::move(blocks);
        }
        const Json yset = set_to_json(ag.y_set);
        for (const auto& [k, v] : yset.items()) a[k] = v;

        auto [Gd, Hd] = relax_constraints(ag, game.n_rho());
        if (ag.n_theta() > 0) {
            a["Gd"] = mat_to_json(Gd);
            if (!ag.gc.affine) throw std::invalid_argument("save_game: smooth g^c is not representable");
            a["Gc"] = mat_to_json(ag.gc.A);
            a["theta"] = vec_to_json(ag.theta);
        }
        if (game.n_rho() > 0) {
            a["Hd"] = mat_to_json(Hd);
            if (ag.hc.rows > 0) {
                if (!ag.hc.affine) throw std::invalid_argument("save_game: smooth h^c is not representable");
                a["Hc"] = mat_to_json(ag.hc.A);
            }
        }

        Json cost;
        if (std::holds_alternative<ZeroCost>(ag.cost_d)) {
            cost["kind"] = "zero";
        } else if (const auto* t = std::get_if<TensorCost>(&ag.cost_d)) {
            cost["kind"] = "tensor";
            cost["values"] = t->values;
        } else if (const auto* lc = std::get_if<LinearCoupledCost>(&ag.cost_d)) {
            cost["kind"] = "linear_coupled";
            cost["pi_bar"] = vec_to_json(lc->pi_bar);
            Json coup = Json::array();
            for (const auto& [jj, M] : lc->coupling) coup.push_back({{"j", jj}, {"M", mat_to_json(M)}});
            cost["coupling"] = std::move(coup);
        } else {
            throw std::invalid_argument("save_game: own-smooth costs are not representable; lift first");
        }
        a["cost"] = std::move(cost);

        Json cc;
        if (ag.n() == 0 || !ag.cost_c.grad) {
            cc["kind"] = "none";
        } else if (ag.cost_c.affine_grad) {
            auto [Q, q] = probe_affine_gradient(ag.cost_c.grad, n_total);
            cc["kind"] = "quadratic_continuous";
            cc["Q"] = mat_to_json(Q);
            cc["q"] = vec_to_json(q);
        } else {
            throw std::invalid_argument("save_game: oracle continuous cost is not representable");
        }
        a["cost_continuous"] = std::move(cc);
        agents.push_back(std::move(a));
    }
    j["agents"] = std::move(agents);
    j["rho"] = vec_to_json(game.rho);
    j["coupling"] = {{"n_rho", game.n_rho()}};
    return j;
}

GmiGame game_from_json(const Json& j) {
    GmiGame game;
    game.rho = j.contains("rho") ? vec_from_json(j["rho"]) : Vec();
    const int n_rho = static_cast<int>(game.rho.size());
    if (j.contains("coupling") && j["coupling"].contains("n_rho") &&
        j["coupling"]["n_rho"].get<int>() != n_rho)
        throw std::invalid_argument("game file: coupling.n_rho disagrees with rho");

    if (!j.contains("agents")) throw std::invalid_argument("game file: missing agents");
    for (const auto& a : j["agents"]) {
        AgentSpec ag;
        if (a.contains("blocks"))
            for (const auto& blk : a["blocks"]) ag.blocks.push_back(block_from_json(blk));
        else if (a.contains("actions"))
            ag.blocks.push_back(block_from_json(a["actions"]));
        else
            throw std::invalid_argument("game file: agent without actions");

        ag.y_set = set_from_json(a);
        const int n_i = ag.y_set.dim;

        if (a.contains("theta")) {
            ag.theta = vec_from_json(a["theta"]);
            const Mat Gd = mat_from_json(a["Gd"]);
            if (Gd.rows() != ag.theta.size() || Gd.cols() != ag.m())
                throw std::invalid_argument("game file: Gd shape mismatch");
            int off = 0;
            for (const auto& blk : ag.blocks) {
                ag.Gd_pre.push_back(Gd.middleCols(off, blk.m()));
                off += blk.m();
            }
            ag.gc = a.contains("Gc") ? ConstraintMap::affine_map(mat_from_json(a["Gc"], n_i))
                                     : ConstraintMap::zero_map(static_cast<int>(ag.theta.size()), n_i);
            if (ag.gc.rows != ag.theta.size())
                throw std::invalid_argument("game file: Gc shape mismatch");
        } else {
            ag.theta = Vec();
            ag.gc = ConstraintMap::zero_map(0, n_i);
        }

        if (n_rho > 0) {
            if (a.contains("Hd")) {
                const Mat Hd = mat_from_json(a["Hd"]);
                if (Hd.rows() != n_rho || Hd.cols() != ag.m())
                    throw std::invalid_argument("game file: Hd shape mismatch");
                int off = 0;
                for (const auto& blk : ag.blocks) {
                    ag.Hd_pre.push_back(Hd.middleCols(off, blk.m()));
                    off += blk.m();
                }
            }
            ag.hc = a.contains("Hc") ? ConstraintMap::affine_map(mat_from_json(a["Hc"], n_i))
                                     : ConstraintMap::zero_map(n_rho, n_i);
            if (ag.hc.rows != n_rho) throw std::invalid_argument("game file: Hc shape mismatch");
        } else {
            ag.hc = ConstraintMap::zero_map(0, n_i);
        }

        const Json& cost = a.at("cost");
        const std::string kind = cost.at("kind").get<std::string>();
        if (kind == "zero") {
            ag.cost_d = ZeroCost{};
        } else if (kind == "tensor") {
            TensorCost t;
            t.values = cost.at("values").get<std::vector<double>>();
            ag.cost_d = std::move(t);
        } else if (kind == "linear_coupled") {
            LinearCoupledCost lc;
            lc.pi_bar = vec_from_json(cost.at("pi_bar"));
            for (const auto& c : cost.at("coupling"))
                lc.coupling.emplace_back(c.at("j").get<int>(), mat_from_json(c.at("M")));
            ag.cost_d = std::move(lc);
        } else {
            throw std::invalid_argument("game file: unknown cost kind " + kind);
        }
        game.agents.push_back(std::move(ag));
    }

    // continuous costs need the final stacked layout, resolved in a second pass
    int n_total = 0;
    std::vector<int> y_off;
    for (const auto& ag : game.agents) {
        y_off.push_back(n_total);
        n_total += ag.n();
    }
    int idx = 0;
    for (const auto& a : j["agents"]) {
        auto& ag = game.agents[idx];
        const Json cc = a.value("cost_continuous", Json{{"kind", "none"}});
        const std::string kind = cc.at("kind").get<std::string>();
        if (kind == "quadratic_continuous") {
            const Mat Q = mat_from_json(cc.at("Q"), n_total);
            const Vec q = vec_from_json(cc.at("q"));
            if (Q.rows() != ag.n() || (Q.cols() != n_total && Q.size() > 0))
                throw std::invalid_argument("game file: quadratic cost shape mismatch");
            ag.cost_c.affine_grad = true;
            ag.cost_c.grad = [Q, q](const Vec& y_all) { return Vec(Q * y_all + q); };
        } else if (kind != "none") {
            throw std::invalid_argument("game file: unknown continuous cost kind " + kind);
        }
        ++idx;
    }

    game.validate();
    return game;
}

Json graph_to_json(const CommGraph& g) {
    Json j;
    j["n"] = g.n;
    Json edges = Json::array();
    for (int i = 0; i < g.n; ++i)
        for (int k = i + 1; k < g.n; ++k)
            if (g.W(i, k) > 0.0) edges.push_back({i, k, g.W(i, k)});
    j["edges"] = std::move(edges);
    return j;
}

CommGraph graph_from_json(const Json& j) {
    const int n = j.at("n").get<int>();
    Mat W = Mat::Zero(n, n);
    for (const auto& e : j.at("edges")) {
        const int a = e[0].get<int>();
        const int b = e[1].get<int>();
        const double w = e.size() > 2 ? e[2].get<double>() : 1.0;
        if (a < 0 || a >= n || b < 0 || b >= n) throw std::invalid_argument("graph file: edge out of range");
        W(a, b) = W(b, a) = w;
    }
    return make_graph(std::move(W));
}

GmiGame load_game(const std::string& path) { return game_from_json(read_json(path)); }
void save_game(const GmiGame& game, const std::string& path) { write_json(game_to_json(game), path); }
CommGraph load_graph(const std::string& path) { return graph_from_json(read_json(path)); }
void save_graph(const CommGraph& g, const std::string& path) { write_json(graph_to_json(g), path); }

Json report_to_json(const SolveReport& report, const EquilibriumCertificate& cert,
                    const GmiGame& game, std::uint64_t seed, const Json& config_echo) {
    Json j;
    j["status"] = to_string(report.status);
    j["iterations"] = report.iterations;

    Json c;
    c["fixed_point_residual_inf"] = cert.fixed_point_residual_inf;
    c["coupling_violation_inf"] = cert.coupling_violation_inf;
    c["local_violation_inf"] = cert.local_violation_inf;
    if (cert.exploitability.has_value()) c["exploitability"] = *cert.exploitability;
    c["complementarity_gap"] = cert.complementarity_gap;
    j["certificate"] = std::move(c);

    Json strategies = Json::array();
    int off = 0;
    for (const auto& ag : game.agents) {
        Json per_agent = Json::array();
        for (const auto& blk : ag.blocks) {
            per_agent.push_back(vec_to_json(report.final_x.segment(off, blk.m())));
            off += blk.m();
        }
        strategies.push_back(std::move(per_agent));
    }
    j["final_strategies"] = std::move(strategies);

    Json continuous = Json::array();
    off = 0;
    for (const auto& ag : game.agents) {
        continuous.push_back(vec_to_json(report.final_y.segment(off, ag.n())));
        off += ag.n();
    }
    j["final_continuous"] = std::move(continuous);

    Json rounded = Json::array();
    for (const auto& a : round_to_pure(game, report.final_x)) {
        Json row = Json::array();
        for (int k = 0; k < a.size(); ++k) row.push_back(a[k]);
        rounded.push_back(std::move(row));
    }
    j["rounded_actions"] = std::move(rounded);

    j["seed"] = seed;
    j["config_echo"] = config_echo;
    return j;
}

void write_json(const Json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

Json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    Json j;
    in >> j;
    return j;
}

}  // namespace msgne
