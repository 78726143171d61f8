#pragma once

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flexlink/evaluation.hpp"
#include "flexlink/model.hpp"
#include "flexlink/sampler.hpp"

namespace flexlink {

enum class CovariateScheme {
  binary_plus_normal,  // x1 ~ Bernoulli(1/2), x2 ~ N(0, variance 3)
  standard_normal,     // single x ~ N(0,1)
};

// A simulation scenario: the true data generating link, design scheme,
// sample size, and the set of fitted models. `beta_sd > 0` redraws the true
// coefficients per replicate from N(beta_true, beta_sd^2) componentwise.
struct ScenarioSpec {
  std::string name = "scenario";
  LinkSpec true_link = LinkSpec::logit();
  int n = 500;
  CovariateScheme scheme = CovariateScheme::binary_plus_normal;
  Eigen::VectorXd beta_true;
  double beta_sd = 0.0;
  int replicates = 1;
  std::vector<ModelSpec> models;
  ChainConfig chain;
  std::uint64_t seed = 1;
  int threads = 1;

  void validate() const;
};

// Presets mirroring the paper's three studies at desk scale.
ScenarioSpec scenario_study1(LinkFamily truth, int n, int replicates = 1);
ScenarioSpec scenario_study2(double xi, int n = 500, int replicates = 30);
ScenarioSpec scenario_study3(LinkFamily truth, int replicates = 50);

// Bernoulli draws from the true link; covariates and (optionally) beta are
// redrawn each replicate; deterministic in (seed, replicate_index).
Dataset generate(const ScenarioSpec& scenario, int replicate_index);

struct ModelRecord {
  std::string model;
  bool ok = false;
  std::string error;
  double dic = 0.0, dbar = 0.0, pd = 0.0, lpml = 0.0;
  std::map<std::string, double> effects;        // covariate -> 0->1 effect
  std::optional<double> shape_median;           // r, xi or alpha1 as applicable
  std::optional<std::pair<double, double>> shape_hpd;
  std::optional<double> prob_shape_below_one;   // P(r < 1 | y) for power links
};

struct ReplicateRecord {
  int replicate = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::vector<ModelRecord> models;
};

struct ModelAggregate {
  std::string model;
  int fits = 0;
  int wins = 0;  // lowest DIC among the replicate's successful fits
  double win_share = 0.0;
  double mean_dic = 0.0, mean_lpml = 0.0;
  std::map<std::string, double> mean_effects;
  double mean_dic_minus_first = 0.0;  // vs. the first model in the list
  double se_dic_minus_first = 0.0;
};

struct StudyReport {
  ScenarioSpec scenario;
  std::vector<ReplicateRecord> records;
  std::vector<ModelAggregate> aggregates;
  int failed_replicates = 0;
};

// Pure fold over the per-replicate records; everything in the report is
// recomputable from them.
std::vector<ModelAggregate> aggregate_records(
    const std::vector<ReplicateRecord>& records,
    const std::vector<std::string>& model_names, int* failed = nullptr);

// Runs every replicate (work-stealing pool of scenario.threads workers, one
// RNG stream per replicate) and aggregates. Failed replicates are recorded
// and excluded from aggregates.
StudyReport run_study(const ScenarioSpec& scenario);

// Serialization: per-replicate JSON records plus aggregate CSV tables.
void write_study_report(const StudyReport& report, const std::string& directory);

nlohmann::json scenario_to_json(const ScenarioSpec& scenario);
ScenarioSpec scenario_from_json(const nlohmann::json& j);

}  // namespace flexlink
