#include "flexlink/model_json.hpp"

#include <stdexcept>

namespace flexlink {

using nlohmann::json;

json link_spec_to_json(const LinkSpec& link) {
  json j;
  j["family"] = to_string(link.family);
  if (link.mirror) j["mirror"] = true;
  if (link.r) j["r"] = *link.r;
  if (link.nu) j["nu"] = *link.nu;
  if (link.p) j["p"] = *link.p;
  if (link.alpha1) j["alpha1"] = *link.alpha1;
  if (link.alpha2) j["alpha2"] = *link.alpha2;
  if (link.xi) j["xi"] = *link.xi;
  return j;
}

LinkSpec link_spec_from_json(const json& j) {
  LinkSpec link;
  link.family = link_family_from_string(j.at("family").get<std::string>());
  link.mirror = j.value("mirror", false);
  if (j.contains("r")) link.r = j["r"].get<double>();
  if (j.contains("nu")) link.nu = j["nu"].get<double>();
  if (j.contains("p")) link.p = j["p"].get<double>();
  if (j.contains("alpha1")) link.alpha1 = j["alpha1"].get<double>();
  if (j.contains("alpha2")) link.alpha2 = j["alpha2"].get<double>();
  if (j.contains("xi")) link.xi = j["xi"].get<double>();
  // Fill family defaults for omitted shape parameters.
  switch (link.family) {
    case LinkFamily::splogit:
    case LinkFamily::plogit:
    case LinkFamily::altersplogit:
      if (!link.r) link.r = 1.0;
      break;
    case LinkFamily::spt:
      if (!link.r) link.r = 1.0;
      if (!link.nu) link.nu = 8.0;
      break;
    case LinkFamily::spep:
      if (!link.r) link.r = 1.0;
      if (!link.p) link.p = 1.5;
      break;
    case LinkFamily::stukel:
      if (!link.alpha1) link.alpha1 = 0.0;
      if (!link.alpha2) link.alpha2 = 0.0;
      break;
    case LinkFamily::czado:
      if (!link.alpha1) link.alpha1 = 1.0;
      if (!link.alpha2) link.alpha2 = 1.0;
      break;
    case LinkFamily::gev:
      if (!link.xi) link.xi = 0.0;
      break;
    default:
      break;
  }
  link.validate();
  return link;
}

json model_spec_to_json(const ModelSpec& spec) {
  json j;
  j["name"] = spec.name;
  j["link"] = link_spec_to_json(spec.link);
  j["sample"] = {{"r", spec.sampled.r},
                 {"nu", spec.sampled.nu},
                 {"p", spec.sampled.p},
                 {"alpha", spec.sampled.alpha},
                 {"xi", spec.sampled.xi}};
  json priors;
  if (spec.beta_prior)
    priors["beta"] = {{"type", "normal"}, {"variance", spec.beta_prior->variance}};
  else
    priors["beta"] = {{"type", "flat"}};
  priors["r"] = {{"shape", spec.r_prior.shape}, {"rate", spec.r_prior.rate}};
  priors["nu"] = {{"shape", spec.nu_prior.shape}, {"rate", spec.nu_prior.rate}};
  priors["p"] = {{"lo", spec.p_prior.lo}, {"hi", spec.p_prior.hi}};
  priors["alpha"] = {{"variance", spec.alpha_prior.variance}};
  priors["xi"] = {{"lo", spec.xi_prior.lo}, {"hi", spec.xi_prior.hi}};
  priors["tau2"] = {{"shape", spec.spatial.tau2_prior.shape},
                    {"rate", spec.spatial.tau2_prior.rate}};
  j["priors"] = priors;
  j["spatial"] = {{"enabled", spec.spatial.enabled}};
  if (spec.spatial.enabled) j["spatial"]["graph"] = graph_to_json(spec.spatial.graph);
  return j;
}

ModelSpec model_spec_from_json(const json& j, const AdjacencyGraph* graph) {
  ModelSpec spec = ModelSpec::for_link(link_spec_from_json(j.at("link")),
                                       j.value("name", ""));
  if (j.contains("sample")) {
    const auto& s = j["sample"];
    if (s.contains("r")) spec.sampled.r = s["r"].get<bool>();
    if (s.contains("nu")) spec.sampled.nu = s["nu"].get<bool>();
    if (s.contains("p")) spec.sampled.p = s["p"].get<bool>();
    if (s.contains("alpha")) spec.sampled.alpha = s["alpha"].get<bool>();
    if (s.contains("xi")) spec.sampled.xi = s["xi"].get<bool>();
  }
  if (j.contains("priors")) {
    const auto& pr = j["priors"];
    if (pr.contains("beta")) {
      const auto& b = pr["beta"];
      const std::string type = b.value("type", "normal");
      if (type == "flat")
        spec.beta_prior.reset();
      else if (type == "normal")
        spec.beta_prior = NormalPrior{b.value("variance", 1e4)};
      else
        throw std::invalid_argument("unknown beta prior type: " + type);
    }
    if (pr.contains("r"))
      spec.r_prior = {pr["r"].value("shape", 1.0), pr["r"].value("rate", 1.0)};
    if (pr.contains("nu"))
      spec.nu_prior = {pr["nu"].value("shape", 8.0), pr["nu"].value("rate", 1.0)};
    if (pr.contains("p"))
      spec.p_prior = {pr["p"].value("lo", 1.0), pr["p"].value("hi", 2.0)};
    if (pr.contains("alpha"))
      spec.alpha_prior = NormalPrior{pr["alpha"].value("variance", 100.0)};
    if (pr.contains("xi"))
      spec.xi_prior = {pr["xi"].value("lo", -1.0), pr["xi"].value("hi", 1.0)};
    if (pr.contains("tau2"))
      spec.spatial.tau2_prior = {pr["tau2"].value("shape", 0.5),
                                 pr["tau2"].value("rate", 0.05)};
  }
  if (j.contains("spatial")) {
    spec.spatial.enabled = j["spatial"].value("enabled", false);
    if (spec.spatial.enabled) {
      if (graph)
        spec.spatial.graph = *graph;
      else if (j["spatial"].contains("graph"))
        spec.spatial.graph = graph_from_json(j["spatial"]["graph"]);
      else
        throw std::invalid_argument(
            "spatial model requested but no adjacency graph supplied");
    }
  }
  spec.validate();
  return spec;
}

json chain_config_to_json(const ChainConfig& cfg) {
  return {{"burnin", cfg.n_burnin},
          {"samples", cfg.n_samples},
          {"thin", cfg.thin},
          {"seed", cfg.seed},
          {"adapt_target_beta", cfg.adapt_target_beta},
          {"adapt_target_scalar", cfg.adapt_target_scalar}};
}

ChainConfig chain_config_from_json(const json& j) {
  ChainConfig cfg;
  cfg.n_burnin = j.value("burnin", 2000);
  cfg.n_samples = j.value("samples", 4000);
  cfg.thin = j.value("thin", 1);
  cfg.seed = j.value("seed", std::uint64_t{1});
  cfg.adapt_target_beta = j.value("adapt_target_beta", 0.234);
  cfg.adapt_target_scalar = j.value("adapt_target_scalar", 0.44);
  cfg.validate();
  return cfg;
}

json graph_to_json(const AdjacencyGraph& graph) {
  json edges = json::array();
  for (int i = 0; i < graph.size(); ++i)
    for (int k : graph.neighbors(i))
      if (k > i) edges.push_back({graph.labels()[i], graph.labels()[k]});
  return {{"labels", graph.labels()}, {"edges", edges}};
}

AdjacencyGraph graph_from_json(const json& j) {
  std::vector<std::pair<std::string, std::string>> edges;
  for (const auto& e : j.at("edges"))
    edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
  auto g = AdjacencyGraph::from_edges(edges);
  // Preserve isolated labels.
  if (j.contains("labels"))
    for (const auto& l : j["labels"])
      if (g.index_of(l.get<std::string>()) < 0)
        throw std::runtime_error("graph json: isolated label '" +
                                 l.get<std::string>() + "' has no edges");
  return g;
}

}  // namespace flexlink
