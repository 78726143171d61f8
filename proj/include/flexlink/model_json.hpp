#pragma once

#include <json.hpp>

#include "flexlink/model.hpp"
#include "flexlink/sampler.hpp"

namespace flexlink {

// JSON document schema (all blocks optional except link):
// {
//   "name": "splogit",
//   "link": {"family": "splogit", "r": 1.0, "mirror": false},
//   "sample": {"r": true},
//   "priors": {
//     "beta": {"type": "normal", "variance": 1e4} | {"type": "flat"},
//     "r": {"shape": 1.0, "rate": 1.0},
//     "nu": {"shape": 8.0, "rate": 1.0},
//     "p": {"lo": 1.0, "hi": 2.0},
//     "alpha": {"variance": 100.0},
//     "xi": {"lo": -1.0, "hi": 1.0},
//     "tau2": {"shape": 0.5, "rate": 0.05}
//   },
//   "spatial": {"enabled": false},
//   "sampler": {"burnin": 2000, "samples": 4000, "thin": 1, "seed": 1}
// }
nlohmann::json link_spec_to_json(const LinkSpec& link);
LinkSpec link_spec_from_json(const nlohmann::json& j);

nlohmann::json model_spec_to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const nlohmann::json& j,
                               const AdjacencyGraph* graph = nullptr);

nlohmann::json chain_config_to_json(const ChainConfig& cfg);
ChainConfig chain_config_from_json(const nlohmann::json& j);

nlohmann::json graph_to_json(const AdjacencyGraph& graph);
AdjacencyGraph graph_from_json(const nlohmann::json& j);

}  // namespace flexlink
