#include "flexlink/simulation.hpp"

#include "flexlink/model_json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace flexlink {

void ScenarioSpec::validate() const {
  true_link.validate();
  if (n <= 0) throw std::invalid_argument("scenario: n must be positive");
  if (replicates < 1) throw std::invalid_argument("scenario: replicates >= 1");
  if (models.empty()) throw std::invalid_argument("scenario: no fitted models");
  const int k = scheme == CovariateScheme::binary_plus_normal ? 3 : 2;
  if (beta_true.size() != k)
    throw std::invalid_argument("scenario: beta_true has wrong length");
  for (const auto& m : models) m.validate();
  if (threads < 1) throw std::invalid_argument("scenario: threads >= 1");
}

ScenarioSpec scenario_study1(LinkFamily truth, int n, int replicates) {
  ScenarioSpec s;
  s.name = "study1-" + to_string(truth);
  switch (truth) {
    case LinkFamily::logit:
      s.true_link = LinkSpec::logit();
      break;
    case LinkFamily::cloglog:
      s.true_link = LinkSpec::cloglog();
      break;
    case LinkFamily::loglog:
      s.true_link = LinkSpec::loglog();
      break;
    default:
      throw std::invalid_argument("study 1 truth is logit, cloglog or loglog");
  }
  s.n = n;
  s.scheme = CovariateScheme::binary_plus_normal;
  s.beta_true = Eigen::Vector3d(0.0, 1.0, 1.0);
  s.replicates = replicates;
  for (const char* m : {"logit", "cloglog", "loglog", "stukel", "czado",
                        "splogit", "spt", "spep"})
    s.models.push_back(ModelSpec::by_name(m));
  return s;
}

ScenarioSpec scenario_study2(double xi, int n, int replicates) {
  ScenarioSpec s;
  s.name = "study2-xi" + std::to_string(xi);
  s.true_link = LinkSpec::gev(xi);
  s.n = n;
  s.scheme = CovariateScheme::binary_plus_normal;
  s.beta_true = Eigen::Vector3d(0.0, 1.0, 1.0);
  s.replicates = replicates;
  s.models.push_back(ModelSpec::by_name("splogit"));
  s.models.push_back(ModelSpec::by_name("plogit"));
  s.models.push_back(ModelSpec::by_name("altersplogit"));
  return s;
}

ScenarioSpec scenario_study3(LinkFamily truth, int replicates) {
  ScenarioSpec s = scenario_study1(truth, 200, replicates);
  s.name = "study3-" + to_string(truth);
  s.scheme = CovariateScheme::standard_normal;
  s.beta_true = Eigen::Vector2d(1.0, 1.0);
  s.beta_sd = 0.1;
  s.models.clear();
  s.models.push_back(ModelSpec::by_name("splogit"));
  // The paper's gev comparator is the Wang-Dey regression form
  // p = 1 - G(-eta), whose xi = 0 member is the cloglog link.
  s.models.push_back(ModelSpec::by_name("gev-mirror"));
  s.models.push_back(ModelSpec::by_name("stukel"));
  s.models.push_back(ModelSpec::by_name("czado"));
  return s;
}

Dataset generate(const ScenarioSpec& scenario, int replicate_index) {
  scenario.validate();
  Rng rng(Rng::split(scenario.seed, 0x5eedULL + replicate_index));

  const int n = scenario.n;
  Eigen::VectorXd beta = scenario.beta_true;
  if (scenario.beta_sd > 0.0)
    for (int j = 0; j < beta.size(); ++j)
      beta[j] = rng.normal(scenario.beta_true[j], scenario.beta_sd);

  Dataset d;
  d.covariate_names.push_back("intercept");
  if (scenario.scheme == CovariateScheme::binary_plus_normal) {
    d.covariate_names.push_back("x1");
    d.covariate_names.push_back("x2");
    d.X.resize(n, 3);
    const double sd2 = std::sqrt(3.0);  // N(0,3) read as variance 3
    for (int i = 0; i < n; ++i) {
      d.X(i, 0) = 1.0;
      d.X(i, 1) = rng.bernoulli(0.5);
      d.X(i, 2) = rng.normal(0.0, sd2);
    }
  } else {
    d.covariate_names.push_back("x1");
    d.X.resize(n, 2);
    for (int i = 0; i < n; ++i) {
      d.X(i, 0) = 1.0;
      d.X(i, 1) = rng.normal();
    }
  }

  d.y.resize(n);
  d.trials.resize(n);
  const Eigen::VectorXd eta = d.X * beta;
  for (int i = 0; i < n; ++i) {
    // GEV support violations clamp the probability to exactly 0 or 1.
    const double p = cdf(scenario.true_link, eta[i]);
    d.trials[i] = 1;
    d.y[i] = rng.bernoulli(p);
  }
  d.validate();
  return d;
}

namespace {

ReplicateRecord run_replicate(const ScenarioSpec& scenario, int rep) {
  ReplicateRecord rec;
  rec.replicate = rep;
  rec.seed = Rng::split(scenario.seed, 0x5eedULL + rep);
  try {
    const Dataset data = generate(scenario, rep);
    for (std::size_t m = 0; m < scenario.models.size(); ++m) {
      const ModelSpec& spec = scenario.models[m];
      ModelRecord mr;
      mr.model = spec.name;
      try {
        ChainConfig cfg = scenario.chain;
        cfg.seed = Rng::split(rec.seed, m + 1);
        const Chain chain = run_chain(spec, data, cfg);
        const DicResult dr = dic(chain, data, spec);
        const LpmlResult lr = lpml(chain, data, spec);
        mr.dic = dr.dic;
        mr.dbar = dr.dbar;
        mr.pd = dr.pd;
        mr.lpml = lr.lpml;
        for (int j = 1; j < data.k(); ++j)
          mr.effects[data.covariate_names[j]] =
              covariate_effect(chain, data, spec, data.covariate_names[j], 0.0, 1.0)
                  .effect;
        std::string shape;
        if (spec.sampled.r)
          shape = "r";
        else if (spec.sampled.xi)
          shape = "xi";
        else if (spec.sampled.alpha)
          shape = "alpha1";
        if (!shape.empty()) {
          const auto draws = chain.column(shape);
          mr.shape_median = posterior_median(draws);
          mr.shape_hpd = hpd_interval(draws, 0.95);
          if (shape == "r") {
            double below = 0.0;
            for (double v : draws) below += v < 1.0;
            mr.prob_shape_below_one = below / double(draws.size());
          }
        }
        mr.ok = true;
      } catch (const std::exception& e) {
        mr.ok = false;
        mr.error = e.what();
      }
      rec.models.push_back(std::move(mr));
    }
    rec.ok = true;
    for (const auto& m : rec.models) rec.ok = rec.ok && m.ok;
    if (!rec.ok) rec.error = "one or more model fits failed";
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  return rec;
}

}  // namespace

std::vector<ModelAggregate> aggregate_records(
    const std::vector<ReplicateRecord>& records,
    const std::vector<std::string>& model_names, int* failed) {
  std::vector<ModelAggregate> agg(model_names.size());
  for (std::size_t m = 0; m < model_names.size(); ++m)
    agg[m].model = model_names[m];

  int bad = 0;
  std::vector<std::vector<double>> dic_diffs(model_names.size());
  for (const auto& rec : records) {
    if (!rec.ok) {
      ++bad;
      continue;  // excluded from aggregates, counted
    }
    // winner: lowest DIC among this replicate's fits
    int best = -1;
    for (std::size_t m = 0; m < rec.models.size(); ++m)
      if (rec.models[m].ok &&
          (best < 0 || rec.models[m].dic < rec.models[best].dic))
        best = static_cast<int>(m);
    if (best >= 0) ++agg[best].wins;
    for (std::size_t m = 0; m < rec.models.size(); ++m) {
      const auto& mr = rec.models[m];
      if (!mr.ok) continue;
      auto& a = agg[m];
      ++a.fits;
      a.mean_dic += mr.dic;
      a.mean_lpml += mr.lpml;
      for (const auto& [k, v] : mr.effects) a.mean_effects[k] += v;
      if (rec.models.front().ok)
        dic_diffs[m].push_back(mr.dic - rec.models.front().dic);
    }
  }
  int total_ok = 0;
  for (const auto& rec : records) total_ok += rec.ok;
  for (std::size_t m = 0; m < agg.size(); ++m) {
    auto& a = agg[m];
    if (a.fits) {
      a.mean_dic /= a.fits;
      a.mean_lpml /= a.fits;
      for (auto& [k, v] : a.mean_effects) v /= a.fits;
    }
    a.win_share = total_ok ? double(a.wins) / double(total_ok) : 0.0;
    const auto& dd = dic_diffs[m];
    if (!dd.empty()) {
      const double mean = std::accumulate(dd.begin(), dd.end(), 0.0) / dd.size();
      a.mean_dic_minus_first = mean;
      if (dd.size() > 1) {
        double var = 0.0;
        for (double v : dd) var += (v - mean) * (v - mean);
        var /= double(dd.size() - 1);
        a.se_dic_minus_first = std::sqrt(var / double(dd.size()));
      }
    }
  }
  if (failed) *failed = bad;
  return agg;
}

StudyReport run_study(const ScenarioSpec& scenario) {
  scenario.validate();
  StudyReport report;
  report.scenario = scenario;
  report.records.resize(scenario.replicates);

  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      const int rep = next.fetch_add(1);
      if (rep >= scenario.replicates) break;
      report.records[rep] = run_replicate(scenario, rep);
    }
  };
  const int nthreads = std::max(1, std::min(scenario.threads, scenario.replicates));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<std::string> names;
  for (const auto& m : scenario.models) names.push_back(m.name);
  report.aggregates =
      aggregate_records(report.records, names, &report.failed_replicates);
  return report;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

nlohmann::json record_to_json(const ReplicateRecord& rec) {
  nlohmann::json j;
  j["replicate"] = rec.replicate;
  j["seed"] = rec.seed;
  j["ok"] = rec.ok;
  if (!rec.error.empty()) j["error"] = rec.error;
  nlohmann::json models = nlohmann::json::array();
  for (const auto& m : rec.models) {
    nlohmann::json mj;
    mj["model"] = m.model;
    mj["ok"] = m.ok;
    if (!m.error.empty()) mj["error"] = m.error;
    if (m.ok) {
      mj["dic"] = m.dic;
      mj["dbar"] = m.dbar;
      mj["pd"] = m.pd;
      mj["lpml"] = m.lpml;
      mj["effects"] = m.effects;
      if (m.shape_median) mj["shape_median"] = *m.shape_median;
      if (m.shape_hpd) mj["shape_hpd"] = {m.shape_hpd->first, m.shape_hpd->second};
      if (m.prob_shape_below_one) mj["p_r_below_1"] = *m.prob_shape_below_one;
    }
    models.push_back(mj);
  }
  j["models"] = models;
  return j;
}

}  // namespace

void write_study_report(const StudyReport& report, const std::string& directory) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(directory) / "replicates");

  for (const auto& rec : report.records) {
    char name[32];
    std::snprintf(name, sizeof name, "rep_%04d.json", rec.replicate);
    std::ofstream out(fs::path(directory) / "replicates" / name);
    out << record_to_json(rec).dump(2) << "\n";
  }

  {
    std::ofstream out(fs::path(directory) / "summary.csv");
    out << "model,fits,wins,win_share,mean_dic,mean_lpml";
    // union of effect names, in first-model order
    std::vector<std::string> effect_names;
    for (const auto& a : report.aggregates)
      for (const auto& [k, v] : a.mean_effects)
        if (std::find(effect_names.begin(), effect_names.end(), k) ==
            effect_names.end())
          effect_names.push_back(k);
    for (const auto& e : effect_names) out << ",effect_" << e;
    out << "\n";
    out.precision(10);
    for (const auto& a : report.aggregates) {
      out << a.model << "," << a.fits << "," << a.wins << "," << a.win_share
          << "," << a.mean_dic << "," << a.mean_lpml;
      for (const auto& e : effect_names) {
        const auto it = a.mean_effects.find(e);
        out << "," << (it == a.mean_effects.end() ? 0.0 : it->second);
      }
      out << "\n";
    }
  }

  {
    // Per-replicate DIC table (plot-ready, Fig.-5 shape) and pairwise
    // differences against the first model.
    std::ofstream out(fs::path(directory) / "dic_by_replicate.csv");
    out << "replicate";
    for (const auto& a : report.aggregates) out << ",dic_" << a.model;
    for (std::size_t m = 1; m < report.aggregates.size(); ++m)
      out << ",diff_" << report.aggregates[m].model << "_minus_"
          << report.aggregates.front().model;
    out << "\n";
    out.precision(10);
    for (const auto& rec : report.records) {
      if (!rec.ok) continue;
      out << rec.replicate;
      for (const auto& m : rec.models) out << "," << m.dic;
      for (std::size_t m = 1; m < rec.models.size(); ++m)
        out << "," << (rec.models[m].dic - rec.models.front().dic);
      out << "\n";
    }
  }

  {
    nlohmann::json j;
    j["scenario"] = scenario_to_json(report.scenario);
    j["failed_replicates"] = report.failed_replicates;
    nlohmann::json agg = nlohmann::json::array();
    for (const auto& a : report.aggregates)
      agg.push_back({{"model", a.model},
                     {"fits", a.fits},
                     {"wins", a.wins},
                     {"win_share", a.win_share},
                     {"mean_dic", a.mean_dic},
                     {"mean_lpml", a.mean_lpml},
                     {"mean_dic_minus_first", a.mean_dic_minus_first},
                     {"se_dic_minus_first", a.se_dic_minus_first}});
    j["aggregates"] = agg;
    std::ofstream out(fs::path(directory) / "aggregate.json");
    out << j.dump(2) << "\n";
  }
}

nlohmann::json scenario_to_json(const ScenarioSpec& s) {
  nlohmann::json j;
  j["name"] = s.name;
  nlohmann::json link;
  link["family"] = to_string(s.true_link.family);
  if (s.true_link.mirror) link["mirror"] = true;
  if (s.true_link.r) link["r"] = *s.true_link.r;
  if (s.true_link.nu) link["nu"] = *s.true_link.nu;
  if (s.true_link.p) link["p"] = *s.true_link.p;
  if (s.true_link.alpha1) link["alpha1"] = *s.true_link.alpha1;
  if (s.true_link.alpha2) link["alpha2"] = *s.true_link.alpha2;
  if (s.true_link.xi) link["xi"] = *s.true_link.xi;
  j["truth"] = link;
  j["n"] = s.n;
  j["covariates"] = s.scheme == CovariateScheme::binary_plus_normal
                        ? "binary+normal"
                        : "standard-normal";
  // "N(0,3)" is read as variance 3; flagged here since the source is ambiguous.
  j["x2_variance_note"] = "normal covariate uses variance 3";
  j["beta_true"] = std::vector<double>(s.beta_true.data(),
                                       s.beta_true.data() + s.beta_true.size());
  if (s.beta_sd > 0) j["beta_sd"] = s.beta_sd;
  j["replicates"] = s.replicates;
  j["seed"] = s.seed;
  j["threads"] = s.threads;
  j["sampler"] = {{"burnin", s.chain.n_burnin},
                  {"samples", s.chain.n_samples},
                  {"thin", s.chain.thin}};
  nlohmann::json models = nlohmann::json::array();
  for (const auto& m : s.models) models.push_back(m.name);
  j["models"] = models;
  return j;
}

ScenarioSpec scenario_from_json(const nlohmann::json& j) {
  ScenarioSpec s;
  if (j.contains("preset")) {
    const std::string preset = j["preset"].get<std::string>();
    const std::string truth = j.value("truth_family", std::string("logit"));
    if (preset == "study1")
      s = scenario_study1(link_family_from_string(truth), j.value("n", 2000),
                          j.value("replicates", 1));
    else if (preset == "study2")
      s = scenario_study2(j.value("xi", -0.3), j.value("n", 500),
                          j.value("replicates", 30));
    else if (preset == "study3")
      s = scenario_study3(link_family_from_string(truth),
                          j.value("replicates", 50));
    else
      throw std::invalid_argument("unknown preset: " + preset);
  }
  if (j.contains("name")) s.name = j["name"].get<std::string>();
  if (j.contains("truth")) s.true_link = link_spec_from_json(j["truth"]);
  if (j.contains("n")) s.n = j["n"].get<int>();
  if (j.contains("covariates")) {
    const std::string c = j["covariates"].get<std::string>();
    if (c == "binary+normal")
      s.scheme = CovariateScheme::binary_plus_normal;
    else if (c == "standard-normal")
      s.scheme = CovariateScheme::standard_normal;
    else
      throw std::invalid_argument("unknown covariate scheme: " + c);
  }
  if (j.contains("beta_true")) {
    const auto v = j["beta_true"].get<std::vector<double>>();
    s.beta_true = Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
  } else if (s.beta_true.size() == 0) {
    s.beta_true = s.scheme == CovariateScheme::binary_plus_normal
                      ? Eigen::VectorXd(Eigen::Vector3d(0.0, 1.0, 1.0))
                      : Eigen::VectorXd(Eigen::Vector2d(1.0, 1.0));
  }
  if (j.contains("beta_sd")) s.beta_sd = j["beta_sd"].get<double>();
  if (j.contains("replicates")) s.replicates = j["replicates"].get<int>();
  if (j.contains("models")) {
    s.models.clear();
    for (const auto& mj : j["models"]) {
      if (mj.is_string())
        s.models.push_back(ModelSpec::by_name(mj.get<std::string>()));
      else
        s.models.push_back(model_spec_from_json(mj));
    }
  }
  if (j.contains("sampler")) {
    const auto& c = j["sampler"];
    s.chain.n_burnin = c.value("burnin", s.chain.n_burnin);
    s.chain.n_samples = c.value("samples", s.chain.n_samples);
    s.chain.thin = c.value("thin", s.chain.thin);
  }
  if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("threads")) s.threads = j["threads"].get<int>();
  s.validate();
  return s;
}

}  // namespace flexlink
