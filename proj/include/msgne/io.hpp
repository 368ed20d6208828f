#pragma once

#include <json.hpp>

#include "msgne/network.hpp"
#include "msgne/verify.hpp"

namespace msgne {

using Json = nlohmann::ordered_json;

/* Game interchange files: {agents: [...], rho: [...], coupling: {...}} with
 * dense row-major matrices and decimal reals that round-trip at 17
 * significant digits. Discrete costs: zero | tensor | linear_coupled;
 * continuous costs: none | quadratic_continuous (gradient Q y + q over the
 * stacked y). Games with oracle-only pieces (e.g. congestion costs) are not
 * representable and are rejected on save. */
Json game_to_json(const GmiGame& game);
GmiGame game_from_json(const Json& j);
GmiGame load_game(const std::string& path);
void save_game(const GmiGame& game, const std::string& path);

/* Graph files: {n: int, edges: [[i, j, w], ...]} with 0-based indices. */
Json graph_to_json(const CommGraph& g);
CommGraph graph_from_json(const Json& j);
CommGraph load_graph(const std::string& path);
void save_graph(const CommGraph& g, const std::string& path);

/* CLI report document. */
Json report_to_json(const SolveReport& report, const EquilibriumCertificate& cert,
                    const GmiGame& game, std::uint64_t seed, const Json& config_echo);

void write_json(const Json& j, const std::string& path);
Json read_json(const std::string& path);

}  // namespace msgne
