#pragma once

#include <json.hpp>

#include <map>
#include <string>
#include <vector>

#include "flexlink/model.hpp"
#include "flexlink/sampler.hpp"

namespace flexlink {

// Shortest contiguous interval of sorted draws containing ceil(level * S)
// of them; ties broken toward the smaller lower endpoint.
std::pair<double, double> hpd_interval(std::vector<double> draws, double level);

double posterior_median(std::vector<double> draws);

// Effective sample size from the initial positive sequence of autocovariance
// pair sums.
double effective_sample_size(const std::vector<double>& draws);

// Monte Carlo standard error of the mean of a correlated chain.
double mc_standard_error(const std::vector<double>& draws);

struct DicResult {
  double dic = 0.0;
  double dbar = 0.0;   // posterior mean deviance
  double pd = 0.0;     // dbar - D(theta_bar)
  double d_at_mean = 0.0;
  long bad_draws = 0;  // draws with non-finite deviance, excluded
};

// Deviance information criterion with D = -2 log likelihood (same binomial
// kernel as the sampler, coefficients omitted). The plug-in theta_bar takes
// componentwise means with r, nu and tau2 averaged on the log scale.
DicResult dic(const Chain& chain, const Dataset& data, const ModelSpec& spec);

struct LpmlResult {
  double lpml = 0.0;
  std::vector<double> cpo;          // per observation
  std::vector<int> inf_draw_count;  // rows with infinite inverse likelihoods
};

// Conditional predictive ordinates by the harmonic-mean identity,
// CPO_i^{-1} = mean_s 1/f(y_i | theta_s), accumulated in log space.
LpmlResult lpml(const Chain& chain, const Dataset& data, const ModelSpec& spec);

struct EffectResult {
  std::string variable;
  double v0 = 0.0, v1 = 1.0;
  double effect = 0.0;                // mean over draws of p_s(v1) - p_s(v0)
  std::pair<double, double> hpd{0, 0};
  std::vector<double> draws;          // per-draw effects
};

// Average covariate effect on the probability scale: for each draw the
// success probability is averaged over the empirical distribution of the
// remaining covariates (and each row's own region effect); the effect is the
// difference between setting the covariate to v1 and to v0.
EffectResult covariate_effect(const Chain& chain, const Dataset& data,
                              const ModelSpec& spec, const std::string& variable,
                              double v0, double v1);

struct ParameterSummary {
  double median = 0.0;
  double mean = 0.0;
  std::pair<double, double> hpd{0, 0};
  double ess = 0.0;
};

struct FitReport {
  std::string model_name;
  std::map<std::string, ParameterSummary> parameters;  // keyed by column name
  DicResult dic;
  LpmlResult lpml;
  std::vector<EffectResult> effects;
  std::map<std::string, double> acceptance;
  std::vector<std::string> warnings;
  double hpd_level = 0.95;
};

// Full posterior report: per-parameter summaries, DIC, LPML and 0 -> 1
// effects for every non-intercept covariate.
FitReport make_fit_report(const Chain& chain, const Dataset& data,
                          const ModelSpec& spec, double hpd_level = 0.95,
                          bool with_effects = true);

nlohmann::json fit_report_to_json(const FitReport& report);

// Table-shaped summary: model, variable, median, hpd_lo, hpd_hi, dic, lpml.
void write_summary_csv(const FitReport& report, const std::string& path);

}  // namespace flexlink
