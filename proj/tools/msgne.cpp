#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <sstream>

#include "msgne/io.hpp"

using namespace msgne;

namespace {

/* "name:k=v,k=v" -> (name, params) */
std::pair<std::string, std::map<std::string, std::string>> parse_spec(const std::string& text) {
    const auto colon = text.find(':');
    std::map<std::string, std::string> params;
    const std::string name = text.substr(0, colon);
    if (colon != std::string::npos) {
        std::stringstream ss(text.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("malformed parameter '" + item + "' in " + text);
            params[item.substr(0, eq)] = item.substr(eq + 1);
        }
    }
    return {name, params};
}

int param_int(const std::map<std::string, std::string>& p, const std::string& key, int fallback) {
    const auto it = p.find(key);
    return it == p.end() ? fallback : std::stoi(it->second);
}

double param_double(const std::map<std::string, std::string>& p, const std::string& key,
                    double fallback) {
    const auto it = p.find(key);
    return it == p.end() ? fallback : std::stod(it->second);
}

GmiGame build_game(const std::string& game_path, const std::string& generator, std::uint64_t seed) {
    if (!game_path.empty()) return load_game(game_path);
    const auto [name, p] = parse_spec(generator);
    if (name == "matching_pennies") return make_matching_pennies();
    if (name == "dsm")
        return make_dsm_instance(seed, param_int(p, "N", 5), param_int(p, "T", 8),
                                 param_int(p, "devices", 1))
            .game;
    if (name == "cournot")
        return make_cournot_instance(seed, param_int(p, "N", 5), param_int(p, "M", 4)).game;
    if (name == "flow")
        return make_flow_instance(seed, param_int(p, "N", 10), param_int(p, "L", 6)).game;
    if (name == "pwa_demo")
        return make_pwa_instance(seed, param_int(p, "N", 3), param_int(p, "p", 3)).game;
    throw std::invalid_argument("unknown generator '" + name + "'");
}

CommGraph build_graph(const std::string& spec, int n, std::uint64_t seed) {
    if (spec.find(".json") != std::string::npos) return load_graph(spec);
    const auto [name, p] = parse_spec(spec);
    if (name == "ring") return make_ring(n, param_double(p, "w", 1.0));
    if (name == "star") return make_star(n, param_double(p, "w", 1.0));
    if (name == "complete") return make_complete(n, param_double(p, "w", 1.0));
    if (name == "erdos") return make_erdos(n, param_double(p, "p", 0.5), seed);
    throw std::invalid_argument("unknown graph '" + name + "'");
}

struct AlgorithmRun {
    std::string name;
    SolveReport report;
    EquilibriumCertificate certificate;
};

AlgorithmRun run_one(const std::string& algorithm, const GmiGame& game, const MsGnep& ms,
                     const std::string& graph_spec, const SolveConfig& cfg, std::uint64_t seed) {
    AlgorithmRun run;
    run.name = algorithm;
    if (algorithm == "bforb") {
        run.report = run_bforb(ms, cfg);
        run.certificate = kkt_residual(make_problem_T(ms, true), ms, run.report.layout,
                                       run.report.gamma_groups, run.report.final_iterate);
    } else if (algorithm == "forb_alternative") {
        run.report = run_forb_alternative(ms, cfg);
        run.certificate = kkt_residual(make_problem_S(ms, false), ms, run.report.layout,
                                       run.report.gamma_groups, run.report.final_iterate);
    } else if (algorithm == "distributed") {
        if (graph_spec.empty())
            throw std::invalid_argument("algorithm 'distributed' requires --graph");
        const CommGraph graph = build_graph(graph_spec, ms.N, seed);
        run.report = run_distributed(ms, graph, cfg);
        run.certificate = kkt_residual(make_problem_Ttilde(ms, graph, true), ms, run.report.layout,
                                       run.report.gamma_groups, run.report.final_iterate);
    } else {
        throw std::invalid_argument("unknown algorithm '" + algorithm + "'");
    }
    return run;
}

int status_code(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged:
            return 0;
        case SolveStatus::MaxIters:
            return 2;
        case SolveStatus::Diverged:
            return 3;
    }
    return 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mixed-strategy generalized Nash equilibrium solver"};

    std::string game_path, generator, algorithm = "bforb", graph_spec, trace_path, report_path,
                compare_list;
    double gamma = -1.0, zeta = -1.0, eps = 1e-5;
    int max_iters = 200000;
    std::uint64_t seed = 1;

    app.add_option("--game", game_path, "game interchange file (JSON)");
    app.add_option("--generator", generator, "builtin generator, e.g. dsm:N=5,T=8");
    app.add_option("--algorithm", algorithm, "bforb | forb_alternative | distributed");
    app.add_option("--graph", graph_spec, "graph file or generator (ring, star, complete, erdos:p=..)");
    app.add_option("--gamma", gamma, "agent step size (default: 0.9 of the bound)")->check(CLI::PositiveNumber);
    app.add_option("--zeta", zeta, "coordinator step size")->check(CLI::PositiveNumber);
    app.add_option("--eps", eps, "stopping tolerance on the iterate change")->check(CLI::PositiveNumber);
    app.add_option("--max-iters", max_iters, "iteration cap")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "seed for generators and samplers");
    app.add_option("--trace", trace_path, "residual trace CSV path");
    app.add_option("--report", report_path, "JSON report path");
    app.add_option("--compare", compare_list, "comma list of algorithms to run on the same game");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 4;
    }

    try {
        apply_thread_cap();
        if (game_path.empty() && generator.empty())
            throw std::invalid_argument("one of --game or --generator is required");

        const GmiGame game = build_game(game_path, generator, seed);
        const MsGnep ms = compile(game);

        SolveConfig cfg;
        if (gamma > 0.0) cfg.gamma = Vec::Constant(1, gamma);
        if (zeta > 0.0) cfg.zeta = zeta;
        cfg.epsilon = eps;
        cfg.max_iters = max_iters;

        Json echo;
        echo["game"] = game_path.empty() ? generator : game_path;
        echo["algorithm"] = compare_list.empty() ? algorithm : compare_list;
        echo["graph"] = graph_spec;
        echo["gamma"] = gamma;
        echo["zeta"] = zeta;
        echo["eps"] = eps;
        echo["max_iters"] = max_iters;
        echo["seed"] = seed;

        if (!compare_list.empty()) {
            std::vector<std::string> algos;
            std::stringstream ss(compare_list);
            std::string item;
            while (std::getline(ss, item, ','))
                if (!item.empty()) algos.push_back(item);
            if (algos.empty()) throw std::invalid_argument("--compare needs at least one algorithm");

            std::vector<AlgorithmRun> runs;
            for (const auto& a : algos) runs.push_back(run_one(a, game, ms, graph_spec, cfg, seed));

            Json j;
            Json items = Json::array();
            for (const auto& r : runs) {
                Json it;
                it["algorithm"] = r.name;
                it["status"] = to_string(r.report.status);
                it["iterations"] = r.report.iterations;
                it["certificate"] = {
                    {"fixed_point_residual_inf", r.certificate.fixed_point_residual_inf},
                    {"coupling_violation_inf", r.certificate.coupling_violation_inf},
                    {"local_violation_inf", r.certificate.local_violation_inf},
                    {"complementarity_gap", r.certificate.complementarity_gap}};
                items.push_back(std::move(it));
            }
            j["runs"] = std::move(items);
            Json pains = Json::array();
            for (std::size_t a = 0; a < runs.size(); ++a)
                for (std::size_t b = a + 1; b < runs.size(); ++b) {
                    Vec pa(runs[a].report.final_x.size() + runs[a].report.final_y.size());
                    pa << runs[a].report.final_x, runs[a].report.final_y;
                    Vec pb(pa.size());
                    pb << runs[b].report.final_x, runs[b].report.final_y;
                    pains.push_back({{"a", runs[a].name},
                                     {"b", runs[b].name},
                                     {"primal_distance_inf", (pa - pb).lpNorm<Eigen::Infinity>()}});
                }
            j["pairwise"] = std::move(pains);
            j["seed"] = seed;
            j["config_echo"] = echo;

            if (!report_path.empty()) write_json(j, report_path);
            std::cout << j.dump(2) << std::endl;
            if (!trace_path.empty())
                for (const auto& r : runs) write_trace_csv(trace_path + "." + r.name + ".csv", r.report);

            int rc = 0;
            for (const auto& r : runs) rc = std::max(rc, status_code(r.report.status));
            return rc;
        }

        const AlgorithmRun run = run_one(algorithm, game, ms, graph_spec, cfg, seed);
        const Json j = report_to_json(run.report, run.certificate, game, seed, echo);
        if (!report_path.empty()) write_json(j, report_path);
        if (!trace_path.empty()) write_trace_csv(trace_path, run.report);
        std::cout << j.dump(2) << std::endl;
        return status_code(run.report.status);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 4;
    }
}
