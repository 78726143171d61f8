#include "flexlink/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "flexlink/model_json.hpp"

namespace flexlink {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double softplus(double t) {
  if (t > 0.0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}
}  // namespace

void ChainConfig::validate() const {
  if (n_burnin < 0 || n_samples <= 0 || thin <= 0)
    throw std::invalid_argument("ChainConfig: burnin >= 0, samples > 0, thin > 0 required");
  if (adapt_target_beta <= 0.0 || adapt_target_beta >= 1.0 ||
      adapt_target_scalar <= 0.0 || adapt_target_scalar >= 1.0)
    throw std::invalid_argument("ChainConfig: acceptance targets must lie in (0,1)");
}

// ---------------------------------------------------------------------------
// Initialization

Eigen::VectorXd irls_initial_beta(const Dataset& data, const LinkSpec& link) {
  const int k = data.k();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
  for (int iter = 0; iter < 25; ++iter) {
    const Eigen::VectorXd eta = data.X * beta;
    Eigen::MatrixXd xtwx = 1e-8 * Eigen::MatrixXd::Identity(k, k);
    Eigen::VectorXd xtwz = Eigen::VectorXd::Zero(k);
    for (int i = 0; i < data.n(); ++i) {
      const double mu = std::clamp(cdf(link, eta[i]), 1e-10, 1.0 - 1e-10);
      const double f = std::max(pdf(link, eta[i]), 1e-10);
      const double wgt = data.trials[i] * f * f / (mu * (1.0 - mu));
      const double z = eta[i] + (double(data.y[i]) / data.trials[i] - mu) / f;
      xtwx.noalias() += wgt * data.X.row(i).transpose() * data.X.row(i);
      xtwz.noalias() += wgt * z * data.X.row(i).transpose();
    }
    const Eigen::VectorXd next = xtwx.ldlt().solve(xtwz);
    if (!next.allFinite()) break;
    const double step = (next - beta).norm();
    beta = next;
    if (beta.norm() > 20.0) {  // separation guard: stop at a bounded point
      beta *= 20.0 / beta.norm();
      break;
    }
    if (step < 1e-8) break;
  }
  return beta;
}

namespace {

ParamState make_initial_state(const ModelSpec& spec, const Dataset& data) {
  ParamState s;
  s.r = spec.link.r.value_or(1.0);
  s.nu = spec.link.nu.value_or(8.0);
  s.p = spec.link.p.value_or(1.5);
  s.alpha1 = spec.link.alpha1.value_or(0.0);
  s.alpha2 = spec.link.alpha2.value_or(0.0);
  s.xi = spec.link.xi.value_or(0.0);
  if (spec.sampled.p)
    s.p = std::clamp(s.p, spec.p_prior.lo + 1e-3, spec.p_prior.hi - 1e-3);
  if (spec.sampled.xi)
    s.xi = std::clamp(s.xi, spec.xi_prior.lo + 1e-3, spec.xi_prior.hi - 1e-3);
  if (spec.spatial.enabled) s.w = Eigen::VectorXd::Zero(spec.spatial.graph.size());
  s.tau2 = 1.0;
  s.beta = irls_initial_beta(data, s.link_at(spec));
  return s;
}

// Unconstrained-scale reparameterizations for the scalar blocks.
struct Transform {
  enum Kind { identity, log_scale, logit_range } kind = identity;
  double lo = 0.0, hi = 1.0;

  double unconstrain(double v) const {
    switch (kind) {
      case identity:
        return v;
      case log_scale:
        return std::log(v);
      case logit_range: {
        const double t = (v - lo) / (hi - lo);
        return std::log(t) - std::log1p(-t);
      }
    }
    return v;
  }

  double constrain(double u) const {
    switch (kind) {
      case identity:
        return u;
      case log_scale:
        return std::exp(u);
      case logit_range:
        return lo + (hi - lo) / (1.0 + std::exp(-u));
    }
    return u;
  }

  // log |d constrain / du|
  double log_jacobian(double u) const {
    switch (kind) {
      case identity:
        return 0.0;
      case log_scale:
        return u;
      case logit_range:
        return std::log(hi - lo) - softplus(u) - softplus(-u);
    }
    return 0.0;
  }
};

struct ScalarBlock {
  std::string name;
  double ParamState::* field;
  Transform tf;
  ScalarRWKernel kernel;
};

std::vector<ScalarBlock> make_scalar_blocks(const ModelSpec& spec,
                                            double target) {
  std::vector<ScalarBlock> blocks;
  if (spec.sampled.r)
    blocks.push_back({"r", &ParamState::r, {Transform::log_scale}, ScalarRWKernel(target)});
  if (spec.sampled.nu)
    blocks.push_back({"nu", &ParamState::nu, {Transform::log_scale}, ScalarRWKernel(target)});
  if (spec.sampled.p)
    blocks.push_back({"p", &ParamState::p,
                      {Transform::logit_range, spec.p_prior.lo, spec.p_prior.hi},
                      ScalarRWKernel(target)});
  if (spec.sampled.alpha) {
    blocks.push_back({"alpha1", &ParamState::alpha1, {Transform::identity}, ScalarRWKernel(target)});
    blocks.push_back({"alpha2", &ParamState::alpha2, {Transform::identity}, ScalarRWKernel(target)});
  }
  if (spec.sampled.xi)
    blocks.push_back({"xi", &ParamState::xi,
                      {Transform::logit_range, spec.xi_prior.lo, spec.xi_prior.hi},
                      ScalarRWKernel(target)});
  return blocks;
}

}  // namespace

// ---------------------------------------------------------------------------
// Spatial blocks

double icar_conditional_mean(const AdjacencyGraph& graph,
                             const Eigen::VectorXd& w, int k) {
  const auto& nbr = graph.neighbors(k);
  if (nbr.empty()) return 0.0;
  double s = 0.0;
  for (int j : nbr) s += w[j];
  return s / double(nbr.size());
}

bool update_w_node(ParamState& state, int node, const Dataset& data,
                   const ModelSpec& spec, const std::vector<int>& rows,
                   ScalarRWKernel& kernel, Rng& rng) {
  const auto& graph = spec.spatial.graph;
  const int m = graph.degree(node);
  const double mean = icar_conditional_mean(graph, state.w, node);

  if (rows.empty()) {
    if (m == 0) return false;  // isolated node: no proper conditional
    state.w[node] = rng.normal(mean, std::sqrt(state.tau2 / m));
    return true;
  }

  const double w_cur = state.w[node];
  const double w_new = kernel.propose(w_cur, rng);
  double delta = 0.0;
  if (m > 0) {
    const double dn = w_new - mean, dc = w_cur - mean;
    delta += -0.5 * m / state.tau2 * (dn * dn - dc * dc);
  }
  const LinkSpec link = state.link_at(spec);
  for (int i : rows) {
    const double base = data.X.row(i).dot(state.beta);
    const int yi = data.y[i], ni = data.trials[i];
    if (yi > 0)
      delta += yi * (log_cdf(link, base + w_new) - log_cdf(link, base + w_cur));
    if (yi < ni)
      delta += (ni - yi) * (log_sf(link, base + w_new) - log_sf(link, base + w_cur));
  }
  const bool acc = std::log(rng.uniform()) < delta;
  if (acc) state.w[node] = w_new;
  kernel.record(acc);
  return acc;
}

std::pair<double, double> tau2_posterior(const ModelSpec& spec,
                                         const Eigen::VectorXd& w) {
  const auto& g = spec.spatial.graph;
  const int rank = g.size() - g.component_count();
  return {spec.spatial.tau2_prior.shape + 0.5 * rank,
          spec.spatial.tau2_prior.rate + 0.5 * icar_quadform(g, w)};
}

double update_tau2(const ParamState& state, const ModelSpec& spec, Rng& rng) {
  const auto [shape, rate] = tau2_posterior(spec, state.w);
  return rng.inverse_gamma(shape, rate);
}

// ---------------------------------------------------------------------------
// Main loop

Chain run_chain(const ModelSpec& spec, const Dataset& data,
                const ChainConfig& cfg) {
  spec.validate();
  data.validate();
  cfg.validate();

  Chain chain;
  chain.config = cfg;
  chain.beta_names = data.covariate_names;

  const bool spatial = spec.spatial.enabled;
  if (spatial && !data.has_regions())
    throw std::invalid_argument("run_chain: spatial model but data carry no regions");
  if (spatial && !spec.spatial.graph.connected())
    chain.warnings.push_back("adjacency graph is disconnected");

  if (!spec.beta_prior) {
    const ProprietyReport rep = check_propriety(data, spec);
    if (!rep.ok()) {
      std::string msg = "flat beta prior refused: ";
      msg += rep.full_rank ? "" : "design matrix is rank deficient; ";
      if (!rep.overlap) msg += "responses are separable (no overlap)";
      msg += " -- use a proper beta prior or augment the data";
      throw propriety_error(msg);
    }
  }

  ParamState state = cfg.init ? *cfg.init : make_initial_state(spec, data);
  if (state.beta.size() != data.k())
    throw std::invalid_argument("run_chain: init beta dimension mismatch");
  if (spatial && state.w.size() != spec.spatial.graph.size())
    throw std::invalid_argument("run_chain: init w dimension mismatch");

  double cur_lp = log_posterior(state, data, spec);
  if (!std::isfinite(cur_lp)) {
    state.beta.setZero();
    cur_lp = log_posterior(state, data, spec);
  }
  if (!std::isfinite(cur_lp))
    throw std::runtime_error("run_chain: non-finite log posterior at initial state");

  Rng rng(cfg.seed);
  const int k = data.k();
  const bool with_r = spec.sampled.r;
  const int core_dim = k + (with_r ? 1 : 0);
  MvRWKernel beta_kernel(core_dim, cfg.adapt_target_beta);
  std::vector<ScalarBlock> blocks = make_scalar_blocks(spec, cfg.adapt_target_scalar);
  for (const auto& b : blocks) chain.shape_names.push_back(b.name);
  ScalarRWKernel rscale_kernel(cfg.adapt_target_scalar);

  const int K = spatial ? spec.spatial.graph.size() : 0;
  std::vector<ScalarRWKernel> w_kernels(K, ScalarRWKernel(cfg.adapt_target_scalar));
  std::vector<std::vector<int>> rows_by_region(K);
  if (spatial) {
    chain.w_names = spec.spatial.graph.labels();
    for (int i = 0; i < data.n(); ++i) rows_by_region[data.region[i]].push_back(i);
  }

  std::map<std::string, BlockStats> stats;

  const long total = long(cfg.n_burnin) + long(cfg.n_samples) * cfg.thin;
  chain.draws.reserve(cfg.n_samples);

  auto snapshot_scales = [&](std::map<std::string, double>& dst) {
    dst["beta"] = beta_kernel.scale();
    if (spec.sampled.r) dst["rscale"] = rscale_kernel.scale();
    for (const auto& b : blocks) dst[b.name] = b.kernel.scale();
    for (int j = 0; j < K; ++j)
      dst["w_" + spec.spatial.graph.labels()[j]] = w_kernels[j].scale();
  };

  for (long t = 0; t < total; ++t) {
    const bool post = t >= cfg.n_burnin;
    if (t == cfg.n_burnin) {
      beta_kernel.freeze();
      rscale_kernel.freeze();
      for (auto& b : blocks) b.kernel.freeze();
      for (auto& kw : w_kernels) kw.freeze();
      snapshot_scales(chain.scales_at_freeze);
    }

    // core block: beta jointly, with log r appended when r is sampled so the
    // adapted covariance captures the beta-r ridge of the power families
    {
      const int dim = core_dim;
      Eigen::VectorXd z(dim);
      z.head(k) = state.beta;
      if (with_r) z[k] = std::log(state.r);
      const Eigen::VectorXd z2 = beta_kernel.propose(z, rng);
      ParamState prop = state;
      prop.beta = z2.head(k);
      if (with_r) prop.r = std::exp(z2[k]);
      const double lp2 = log_posterior(prop, data, spec);
      const double jac = with_r ? z2[k] - z[k] : 0.0;  // d r / d log r
      const bool acc = std::log(rng.uniform()) < lp2 - cur_lp + jac;
      if (acc) {
        state.beta = prop.beta;
        if (with_r) state.r = prop.r;
        cur_lp = lp2;
      }
      beta_kernel.record(acc);
      if (!post) {
        z.head(k) = state.beta;
        if (with_r) z[k] = std::log(state.r);
        beta_kernel.observe(z);
      }
      if (post) {
        auto& s = stats["beta"];
        ++s.proposals;
        s.accepts += acc;
      }
    }

    // ridge move for the power families: rescale (beta, r) jointly at fixed
    // beta/r, a random walk on u = log r along the likelihood ridge induced
    // by the x/r scaling in Eq. (2); Jacobian e^{(k+1)u}
    if (spec.sampled.r) {
      const double u = std::log(state.r);
      const double u2 = rscale_kernel.propose(u, rng);
      const double c = std::exp(u2 - u);
      ParamState prop = state;
      prop.r = state.r * c;
      prop.beta = state.beta * c;
      const double lp2 = log_posterior(prop, data, spec);
      const double logratio = (lp2 + (k + 1) * u2) - (cur_lp + (k + 1) * u);
      const bool acc = std::log(rng.uniform()) < logratio;
      if (acc) {
        state.r = prop.r;
        state.beta = prop.beta;
        cur_lp = lp2;
      }
      rscale_kernel.record(acc);
      if (post) {
        auto& s = stats["rscale"];
        ++s.proposals;
        s.accepts += acc;
      }
    }

    // scalar shape blocks
    for (auto& b : blocks) {
      const double v = state.*(b.field);
      const double u = b.tf.unconstrain(v);
      const double u2 = b.kernel.propose(u, rng);
      const double v2 = b.tf.constrain(u2);
      ParamState prop = state;
      prop.*(b.field) = v2;
      const double lp2 = log_posterior(prop, data, spec);
      const double logratio =
          (lp2 + b.tf.log_jacobian(u2)) - (cur_lp + b.tf.log_jacobian(u));
      const bool acc = std::log(rng.uniform()) < logratio;
      if (acc) {
        state.*(b.field) = v2;
        cur_lp = lp2;
      }
      b.kernel.record(acc);
      if (post) {
        auto& s = stats[b.name];
        ++s.proposals;
        s.accepts += acc;
      }
    }

    // spatial sweep, exact recentering, conjugate tau2
    if (spatial) {
      for (int node = 0; node < K; ++node) {
        const bool acc = update_w_node(state, node, data, spec,
                                       rows_by_region[node], w_kernels[node], rng);
        if (post && !rows_by_region[node].empty()) {
          auto& s = stats["w"];
          ++s.proposals;
          s.accepts += acc;
        }
      }
      state.w.array() -= state.w.mean();
      state.tau2 = update_tau2(state, spec, rng);
      cur_lp = log_posterior(state, data, spec);
    }

    if (post && (t - cfg.n_burnin + 1) % cfg.thin == 0) chain.draws.push_back(state);
  }

  snapshot_scales(chain.scales_final);
  chain.acceptance = std::move(stats);
  for (const auto& [name, s] : chain.acceptance)
    if (s.proposals >= 100 && s.accepts == 0)
      chain.warnings.push_back("block '" + name +
                               "' accepted no proposals after adaptation");
  return chain;
}

// ---------------------------------------------------------------------------
// Chain access and serialization

std::vector<std::string> Chain::column_names() const {
  std::vector<std::string> names;
  for (const auto& b : beta_names) names.push_back("beta_" + b);
  for (const auto& s : shape_names) names.push_back(s);
  for (const auto& w : w_names) names.push_back("w_" + w);
  if (!w_names.empty()) names.push_back("tau2");
  return names;
}

namespace {

std::function<double(const ParamState&)> column_getter(const Chain& chain,
                                                       const std::string& name) {
  for (size_t j = 0; j < chain.beta_names.size(); ++j)
    if (name == "beta_" + chain.beta_names[j])
      return [j](const ParamState& s) { return s.beta[j]; };
  if (name == "r") return [](const ParamState& s) { return s.r; };
  if (name == "nu") return [](const ParamState& s) { return s.nu; };
  if (name == "p") return [](const ParamState& s) { return s.p; };
  if (name == "alpha1") return [](const ParamState& s) { return s.alpha1; };
  if (name == "alpha2") return [](const ParamState& s) { return s.alpha2; };
  if (name == "xi") return [](const ParamState& s) { return s.xi; };
  if (name == "tau2") return [](const ParamState& s) { return s.tau2; };
  for (size_t j = 0; j < chain.w_names.size(); ++j)
    if (name == "w_" + chain.w_names[j])
      return [j](const ParamState& s) { return s.w[j]; };
  throw std::invalid_argument("unknown chain column: " + name);
}

}  // namespace

std::vector<double> Chain::column(const std::string& name) const {
  const auto get = column_getter(*this, name);
  std::vector<double> out;
  out.reserve(draws.size());
  for (const auto& d : draws) out.push_back(get(d));
  return out;
}

void write_chain(const Chain& chain, const ModelSpec& spec,
                 const std::string& directory, const std::string& data_path) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);

  {
    std::ofstream out(fs::path(directory) / "chain.csv");
    if (!out) throw std::runtime_error("cannot write chain.csv in " + directory);
    const auto names = chain.column_names();
    for (size_t j = 0; j < names.size(); ++j)
      out << (j ? "," : "") << names[j];
    out << "\n";
    std::vector<std::function<double(const ParamState&)>> getters;
    for (const auto& n : names) getters.push_back(column_getter(chain, n));
    char buf[40];
    for (const auto& d : chain.draws) {
      for (size_t j = 0; j < getters.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", getters[j](d));
        if (j) out << ',';
        out << buf;
      }
      out << "\n";
    }
  }

  nlohmann::json meta;
  meta["model"] = model_spec_to_json(spec);
  meta["config"] = chain_config_to_json(chain.config);
  meta["beta_names"] = chain.beta_names;
  meta["shape_names"] = chain.shape_names;
  meta["w_names"] = chain.w_names;
  nlohmann::json acc;
  for (const auto& [name, s] : chain.acceptance)
    acc[name] = {{"proposals", s.proposals}, {"accepts", s.accepts}, {"rate", s.rate()}};
  meta["acceptance"] = acc;
  meta["warnings"] = chain.warnings;
  meta["seed"] = chain.config.seed;
  if (!data_path.empty()) meta["data_path"] = data_path;
  std::ofstream mout(fs::path(directory) / "chain_meta.json");
  mout << meta.dump(2) << "\n";
}

LoadedChain read_chain(const std::string& directory) {
  namespace fs = std::filesystem;
  std::ifstream min(fs::path(directory) / "chain_meta.json");
  if (!min) throw std::runtime_error("cannot open chain_meta.json in " + directory);
  nlohmann::json meta = nlohmann::json::parse(min);

  LoadedChain loaded;
  loaded.spec = model_spec_from_json(meta.at("model"));
  loaded.data_path = meta.value("data_path", "");
  Chain& chain = loaded.chain;
  chain.config = chain_config_from_json(meta.at("config"));
  chain.beta_names = meta.at("beta_names").get<std::vector<std::string>>();
  chain.shape_names = meta.at("shape_names").get<std::vector<std::string>>();
  chain.w_names = meta.at("w_names").get<std::vector<std::string>>();
  for (const auto& w : meta.value("warnings", std::vector<std::string>{}))
    chain.warnings.push_back(w);

  std::ifstream in(fs::path(directory) / "chain.csv");
  if (!in) throw std::runtime_error("cannot open chain.csv in " + directory);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("chain.csv is empty");
  std::vector<std::string> header;
  {
    std::istringstream is(line);
    std::string f;
    while (std::getline(is, f, ',')) header.push_back(f);
  }
  const auto expected = chain.column_names();
  if (header != expected) throw std::runtime_error("chain.csv column mismatch");

  const size_t nb = chain.beta_names.size();
  const size_t ns = chain.shape_names.size();
  const size_t nw = chain.w_names.size();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream is(line);
    std::string f;
    std::vector<double> v;
    while (std::getline(is, f, ',')) v.push_back(std::strtod(f.c_str(), nullptr));
    if (v.size() != expected.size())
      throw std::runtime_error("chain.csv: ragged row");
    ParamState s;
    s.beta.resize(nb);
    for (size_t j = 0; j < nb; ++j) s.beta[j] = v[j];
    for (size_t j = 0; j < ns; ++j) {
      const double val = v[nb + j];
      const std::string& name = chain.shape_names[j];
      if (name == "r") s.r = val;
      else if (name == "nu") s.nu = val;
      else if (name == "p") s.p = val;
      else if (name == "alpha1") s.alpha1 = val;
      else if (name == "alpha2") s.alpha2 = val;
      else if (name == "xi") s.xi = val;
    }
    if (nw) {
      s.w.resize(nw);
      for (size_t j = 0; j < nw; ++j) s.w[j] = v[nb + ns + j];
      s.tau2 = v[nb + ns + nw];
    }
    // fixed shapes come from the model template
    const auto& link = loaded.spec.link;
    if (!loaded.spec.sampled.r && link.r) s.r = *link.r;
    if (!loaded.spec.sampled.nu && link.nu) s.nu = *link.nu;
    if (!loaded.spec.sampled.p && link.p) s.p = *link.p;
    if (!loaded.spec.sampled.alpha && link.alpha1) {
      s.alpha1 = *link.alpha1;
      s.alpha2 = *link.alpha2;
    }
    if (!loaded.spec.sampled.xi && link.xi) s.xi = *link.xi;
    chain.draws.push_back(std::move(s));
  }
  return loaded;
}

}  // namespace flexlink
