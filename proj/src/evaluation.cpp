#include "flexlink/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace flexlink {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::pair<double, double> hpd_interval(std::vector<double> draws, double level) {
  if (draws.size() < 2) throw std::invalid_argument("hpd_interval: need >= 2 draws");
  if (level <= 0.0 || level >= 1.0)
    throw std::invalid_argument("hpd_interval: level must be in (0,1)");
  std::sort(draws.begin(), draws.end());
  const std::size_t s = draws.size();
  const std::size_t h = std::min<std::size_t>(
      s, static_cast<std::size_t>(std::ceil(level * double(s))));
  std::size_t best = 0;
  double width = kInf;
  for (std::size_t i = 0; i + h <= s; ++i) {
    const double wd = draws[i + h - 1] - draws[i];
    if (wd < width) {  // strict: ties keep the smaller lower endpoint
      width = wd;
      best = i;
    }
  }
  return {draws[best], draws[best + h - 1]};
}

double posterior_median(std::vector<double> draws) {
  if (draws.empty()) throw std::invalid_argument("posterior_median: empty");
  std::sort(draws.begin(), draws.end());
  const std::size_t s = draws.size();
  if (s % 2) return draws[s / 2];
  return 0.5 * (draws[s / 2 - 1] + draws[s / 2]);
}

double effective_sample_size(const std::vector<double>& draws) {
  const std::size_t s = draws.size();
  if (s < 4) return double(s);
  const double mean = std::accumulate(draws.begin(), draws.end(), 0.0) / double(s);
  std::vector<double> c(draws.size());
  for (std::size_t i = 0; i < s; ++i) c[i] = draws[i] - mean;
  const auto gamma = [&](std::size_t lag) {
    double g = 0.0;
    for (std::size_t i = 0; i + lag < s; ++i) g += c[i] * c[i + lag];
    return g / double(s);
  };
  const double g0 = gamma(0);
  if (g0 <= 0.0) return double(s);  // constant chain
  // Geyer initial positive sequence over pair sums.
  double iact = 1.0;
  for (std::size_t m = 0;; ++m) {
    const std::size_t l1 = 2 * m + 1, l2 = 2 * m + 2;
    if (l2 >= s) break;
    const double pair = gamma(l1) + gamma(l2);
    if (pair <= 0.0) break;
    iact += 2.0 * pair / g0;
    if (l2 > 2000) break;
  }
  return std::max(1.0, double(s) / iact);
}

double mc_standard_error(const std::vector<double>& draws) {
  const std::size_t s = draws.size();
  if (s < 2) return 0.0;
  const double mean = std::accumulate(draws.begin(), draws.end(), 0.0) / double(s);
  double var = 0.0;
  for (double d : draws) var += (d - mean) * (d - mean);
  var /= double(s - 1);
  return std::sqrt(var / effective_sample_size(draws));
}

// ---------------------------------------------------------------------------

namespace {

// Plug-in state for DIC: componentwise means, log scale for the positive
// parameters r, nu, tau2.
ParamState posterior_mean_state(const Chain& chain, const ModelSpec& spec) {
  const auto& draws = chain.draws;
  const std::size_t s = draws.size();
  ParamState mean = draws.front();
  mean.beta = Eigen::VectorXd::Zero(draws.front().beta.size());
  if (draws.front().w.size()) mean.w = Eigen::VectorXd::Zero(draws.front().w.size());
  double lr = 0, lnu = 0, pp = 0, a1 = 0, a2 = 0, xx = 0, lt = 0;
  for (const auto& d : draws) {
    mean.beta += d.beta;
    if (mean.w.size()) mean.w += d.w;
    lr += std::log(d.r);
    lnu += std::log(d.nu);
    pp += d.p;
    a1 += d.alpha1;
    a2 += d.alpha2;
    xx += d.xi;
    lt += std::log(d.tau2);
  }
  const double inv = 1.0 / double(s);
  mean.beta *= inv;
  if (mean.w.size()) mean.w *= inv;
  mean.r = std::exp(lr * inv);
  mean.nu = std::exp(lnu * inv);
  mean.p = pp * inv;
  mean.alpha1 = a1 * inv;
  mean.alpha2 = a2 * inv;
  mean.xi = xx * inv;
  mean.tau2 = std::exp(lt * inv);
  if (!spec.sampled.p) mean.p = draws.front().p;
  return mean;
}

}  // namespace

DicResult dic(const Chain& chain, const Dataset& data, const ModelSpec& spec) {
  if (chain.draws.empty()) throw std::invalid_argument("dic: empty chain");
  DicResult out;
  double sum = 0.0;
  long used = 0;
  for (const auto& d : chain.draws) {
    const double dev = -2.0 * log_likelihood(d, data, spec);
    if (std::isfinite(dev)) {
      sum += dev;
      ++used;
    } else {
      ++out.bad_draws;
    }
  }
  if (used == 0) throw std::runtime_error("dic: no finite deviance draws");
  out.dbar = sum / double(used);
  out.d_at_mean = -2.0 * log_likelihood(posterior_mean_state(chain, spec), data, spec);
  out.pd = out.dbar - out.d_at_mean;
  out.dic = out.dbar + out.pd;
  return out;
}

LpmlResult lpml(const Chain& chain, const Dataset& data, const ModelSpec& spec) {
  if (chain.draws.empty()) throw std::invalid_argument("lpml: empty chain");
  const int n = data.n();
  const std::size_t s = chain.draws.size();

  // Streaming log-sum-exp of the negative per-row log likelihoods.
  std::vector<double> run_max(n, -kInf), run_sum(n, 0.0);
  LpmlResult out;
  out.inf_draw_count.assign(n, 0);

  for (const auto& d : chain.draws) {
    const LinkSpec link = d.link_at(spec);
    const Eigen::VectorXd eta = data.X * d.beta;
    const bool spatial = spec.spatial.enabled && data.has_regions();
    for (int i = 0; i < n; ++i) {
      double e = eta[i];
      if (spatial) e += d.w[data.region[i]];
      double ll = 0.0;
      if (data.y[i] > 0) ll += data.y[i] * log_cdf(link, e);
      if (data.y[i] < data.trials[i])
        ll += (data.trials[i] - data.y[i]) * log_sf(link, e);
      const double neg = -ll;  // log of the inverse likelihood
      if (!std::isfinite(neg) || neg == kInf) {
        ++out.inf_draw_count[i];
        run_max[i] = kInf;
        continue;
      }
      if (neg > run_max[i]) {
        run_sum[i] = run_sum[i] * std::exp(run_max[i] - neg) + 1.0;
        run_max[i] = neg;
      } else {
        run_sum[i] += std::exp(neg - run_max[i]);
      }
    }
  }

  out.cpo.resize(n);
  out.lpml = 0.0;
  for (int i = 0; i < n; ++i) {
    if (run_max[i] == kInf) {
      out.cpo[i] = 0.0;
      out.lpml = -kInf;
      continue;
    }
    // log CPO_i = log S - logsumexp of negative log likelihoods
    const double log_cpo = std::log(double(s)) - (run_max[i] + std::log(run_sum[i]));
    out.cpo[i] = std::exp(log_cpo);
    out.lpml += log_cpo;
  }
  return out;
}

EffectResult covariate_effect(const Chain& chain, const Dataset& data,
                              const ModelSpec& spec, const std::string& variable,
                              double v0, double v1) {
  if (chain.draws.empty()) throw std::invalid_argument("covariate_effect: empty chain");
  if (v0 == v1) throw std::invalid_argument("covariate_effect: v0 must differ from v1");
  const int col = data.covariate_index(variable);
  if (col < 0)
    throw std::invalid_argument("covariate_effect: unknown covariate '" + variable + "'");

  EffectResult out;
  out.variable = variable;
  out.v0 = v0;
  out.v1 = v1;
  out.draws.reserve(chain.draws.size());

  const bool spatial = spec.spatial.enabled && data.has_regions();
  const int n = data.n();
  for (const auto& d : chain.draws) {
    const LinkSpec link = d.link_at(spec);
    // Linear predictor with the target covariate zeroed out.
    Eigen::VectorXd base = data.X * d.beta;
    base -= data.X.col(col) * d.beta[col];
    double p0 = 0.0, p1 = 0.0;
    for (int i = 0; i < n; ++i) {
      double e = base[i];
      if (spatial) e += d.w[data.region[i]];
      p0 += cdf(link, e + d.beta[col] * v0);
      p1 += cdf(link, e + d.beta[col] * v1);
    }
    out.draws.push_back((p1 - p0) / double(n));
  }
  out.effect = std::accumulate(out.draws.begin(), out.draws.end(), 0.0) /
               double(out.draws.size());
  out.hpd = out.draws.size() >= 2 ? hpd_interval(out.draws, 0.95)
                                  : std::pair<double, double>{out.effect, out.effect};
  return out;
}

FitReport make_fit_report(const Chain& chain, const Dataset& data,
                          const ModelSpec& spec, double hpd_level,
                          bool with_effects) {
  FitReport report;
  report.model_name = spec.name;
  report.hpd_level = hpd_level;
  for (const auto& name : chain.column_names()) {
    const auto draws = chain.column(name);
    ParameterSummary s;
    s.median = posterior_median(draws);
    s.mean = std::accumulate(draws.begin(), draws.end(), 0.0) / double(draws.size());
    s.hpd = draws.size() >= 2 ? hpd_interval(draws, hpd_level)
                              : std::pair<double, double>{s.median, s.median};
    s.ess = effective_sample_size(draws);
    report.parameters[name] = s;
  }
  report.dic = dic(chain, data, spec);
  report.lpml = lpml(chain, data, spec);
  if (with_effects) {
    for (int j = 1; j < data.k(); ++j) {
      report.effects.push_back(covariate_effect(
          chain, data, spec, data.covariate_names[j], 0.0, 1.0));
      report.effects.back().draws.clear();  // not serialized
    }
  }
  for (const auto& [name, s] : chain.acceptance) report.acceptance[name] = s.rate();
  report.warnings = chain.warnings;
  return report;
}

nlohmann::json fit_report_to_json(const FitReport& report) {
  nlohmann::json j;
  j["model"] = report.model_name;
  j["hpd_level"] = report.hpd_level;
  nlohmann::json params;
  for (const auto& [name, s] : report.parameters)
    params[name] = {{"median", s.median},
                    {"mean", s.mean},
                    {"hpd_lo", s.hpd.first},
                    {"hpd_hi", s.hpd.second},
                    {"ess", s.ess}};
  j["parameters"] = params;
  j["dic"] = {{"dic", report.dic.dic},
              {"dbar", report.dic.dbar},
              {"pd", report.dic.pd},
              {"bad_draws", report.dic.bad_draws}};
  j["lpml"] = {{"lpml", report.lpml.lpml}};
  int flagged = 0;
  for (int c : report.lpml.inf_draw_count) flagged += c > 0;
  j["lpml"]["rows_with_infinite_inverse_likelihood"] = flagged;
  nlohmann::json effects = nlohmann::json::array();
  for (const auto& e : report.effects)
    effects.push_back({{"variable", e.variable},
                       {"v0", e.v0},
                       {"v1", e.v1},
                       {"effect", e.effect},
                       {"hpd_lo", e.hpd.first},
                       {"hpd_hi", e.hpd.second}});
  j["effects"] = effects;
  j["acceptance"] = report.acceptance;
  j["warnings"] = report.warnings;
  return j;
}

void write_summary_csv(const FitReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "model,variable,median,hpd_lo,hpd_hi,dic,lpml\n";
  out.precision(10);
  for (const auto& [name, s] : report.parameters)
    out << report.model_name << "," << name << "," << s.median << ","
        << s.hpd.first << "," << s.hpd.second << "," << report.dic.dic << ","
        << report.lpml.lpml << "\n";
}

}  // namespace flexlink
