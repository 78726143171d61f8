#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "flexlink/evaluation.hpp"
#include "flexlink/model.hpp"
#include "flexlink/rng.hpp"
#include "flexlink/sampler.hpp"
#include "flexlink/simulation.hpp"

using namespace flexlink;

namespace {

Dataset bernoulli_rows(const std::vector<double>& x, const std::vector<int>& y) {
  Dataset d;
  const int n = static_cast<int>(y.size());
  d.X.resize(n, 2);
  d.y.resize(n);
  d.trials.resize(n);
  d.covariate_names = {"intercept", "x1"};
  for (int i = 0; i < n; ++i) {
    d.X(i, 0) = 1.0;
    d.X(i, 1) = x[i];
    d.y[i] = y[i];
    d.trials[i] = 1;
  }
  return d;
}

Chain chain_of_states(const std::vector<ParamState>& draws,
                      const std::vector<std::string>& beta_names,
                      const std::vector<std::string>& shape_names = {}) {
  Chain c;
  c.draws = draws;
  c.beta_names = beta_names;
  c.shape_names = shape_names;
  return c;
}

ParamState beta_state(std::vector<double> beta) {
  ParamState s;
  s.beta = Eigen::Map<Eigen::VectorXd>(beta.data(), beta.size());
  return s;
}

}  // namespace

TEST_CASE("hpd interval") {
  std::vector<double> draws;
  for (int i = 1; i <= 100; ++i) draws.push_back(i);
  const auto [lo, hi] = hpd_interval(draws, 0.95);
  // all width-95 windows tie; the smallest lower endpoint wins
  CHECK(lo == 1.0);
  CHECK(hi == 95.0);

  const auto [l2, h2] = hpd_interval({3.0, 3.0, 3.0, 3.0}, 0.5);
  CHECK(l2 == 3.0);
  CHECK(h2 == 3.0);

  // symmetric normal draws give an interval roughly symmetric about 0
  Rng rng(5);
  std::vector<double> z;
  for (int i = 0; i < 60000; ++i) z.push_back(rng.normal());
  const auto [zl, zh] = hpd_interval(z, 0.95);
  CHECK(zl == doctest::Approx(-1.96).epsilon(0.04));
  CHECK(zh == doctest::Approx(1.96).epsilon(0.04));
  CHECK(std::fabs(zl + zh) < 0.08);

  CHECK_THROWS(hpd_interval({1.0}, 0.95));
  CHECK_THROWS(hpd_interval({1.0, 2.0}, 1.5));
}

TEST_CASE("posterior median") {
  CHECK(posterior_median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(posterior_median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK(posterior_median({7.0}) == 7.0);
}

TEST_CASE("dic hand values") {
  const ModelSpec spec = ModelSpec::by_name("logit");
  const Dataset one = bernoulli_rows({0.0}, {1});

  // identical draws: pd = 0, dic = D(theta)
  const auto c2 =
      chain_of_states({beta_state({0.0, 0.0}), beta_state({0.0, 0.0})},
                      {"intercept", "x1"});
  const auto r = dic(c2, one, spec);
  CHECK(r.pd == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.dic == doctest::Approx(-2.0 * std::log(0.5)).epsilon(1e-12));

  // one binomial row with y = 1 of N = 2 at eta = 0: kernel 2 log(1/2)
  Dataset bin = one;
  bin.trials[0] = 2;
  const auto rb = dic(c2, bin, spec);
  CHECK(rb.pd == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rb.dic == doctest::Approx(2.0 * (-2.0 * std::log(0.5))).epsilon(1e-12));

  // a genuine two-point chain: dbar is the mean deviance
  const auto cm =
      chain_of_states({beta_state({0.0, 0.0}), beta_state({1.0, 0.0})},
                      {"intercept", "x1"});
  const auto rm = dic(cm, one, spec);
  const double d0 = -2.0 * std::log(0.5);
  const double d1 = -2.0 * std::log(1.0 / (1.0 + std::exp(-1.0)));
  CHECK(rm.dbar == doctest::Approx(0.5 * (d0 + d1)).epsilon(1e-12));
}

TEST_CASE("dic: adding the binomial-coefficient constant cancels in differences") {
  Rng rng(6);
  std::vector<double> x;
  std::vector<int> y;
  Dataset d;
  const int n = 30;
  d.X.resize(n, 2);
  d.y.resize(n);
  d.trials.resize(n);
  d.covariate_names = {"intercept", "x1"};
  double logcoef = 0.0;
  for (int i = 0; i < n; ++i) {
    d.X(i, 0) = 1.0;
    d.X(i, 1) = rng.normal();
    d.trials[i] = 4;
    d.y[i] = rng.binomial(4, 0.45);
    logcoef += std::lgamma(5.0) - std::lgamma(d.y[i] + 1.0) -
               std::lgamma(4.0 - d.y[i] + 1.0);
  }
  const ModelSpec spec = ModelSpec::by_name("logit");
  ChainConfig cfg;
  cfg.n_burnin = 200;
  cfg.n_samples = 300;
  cfg.seed = 17;
  const Chain a = run_chain(spec, d, cfg);
  cfg.seed = 18;
  const Chain b = run_chain(spec, d, cfg);
  const double da = dic(a, d, spec).dic;
  const double db = dic(b, d, spec).dic;
  // the kernel omits the coefficient term; including it would shift both
  // DICs by the same -2 * logcoef, leaving differences (and pd) unchanged
  const double shifted_a = da - 2.0 * logcoef;
  const double shifted_b = db - 2.0 * logcoef;
  CHECK(shifted_a - shifted_b == doctest::Approx(da - db).epsilon(1e-12));
  CHECK(dic(a, d, spec).pd == doctest::Approx(dic(a, d, spec).pd));
}

TEST_CASE("lpml basics") {
  const ModelSpec spec = ModelSpec::by_name("logit");
  // single-draw chain: CPO_i is the draw's per-row likelihood exactly
  const Dataset d = bernoulli_rows({0.0, 1.0}, {1, 0});
  const auto c1 = chain_of_states({beta_state({0.0, 0.5})}, {"intercept", "x1"});
  const auto r = lpml(c1, d, spec);
  CHECK(r.cpo[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.cpo[1] == doctest::Approx(1.0 - 1.0 / (1.0 + std::exp(-0.5))).epsilon(1e-12));
  CHECK(r.lpml == doctest::Approx(std::log(r.cpo[0]) + std::log(r.cpo[1])).epsilon(1e-12));

  // duplicated rows get identical CPO values
  const Dataset dd = bernoulli_rows({0.7, 0.7}, {1, 1});
  const auto cm = chain_of_states(
      {beta_state({0.0, 0.1}), beta_state({0.3, -0.2}), beta_state({-0.4, 0.6})},
      {"intercept", "x1"});
  const auto rr = lpml(cm, dd, spec);
  CHECK(rr.cpo[0] == doctest::Approx(rr.cpo[1]).epsilon(1e-14));

  // harmonic-mean bound: CPO_i <= max_s f(y_i | theta_s)
  double fmax = 0.0;
  for (const auto& s : cm.draws) {
    const double eta = s.beta[0] + 0.7 * s.beta[1];
    fmax = std::max(fmax, 1.0 / (1.0 + std::exp(-eta)));
  }
  CHECK(rr.cpo[0] <= fmax + 1e-14);
}

TEST_CASE("lpml agrees with a grid-quadrature posterior on a tiny dataset") {
  const Dataset d = bernoulli_rows({-1.2, -0.4, 0.1, 0.6, 1.3, 2.0},
                                   {0, 1, 0, 1, 1, 1});
  ModelSpec spec = ModelSpec::by_name("logit");
  spec.beta_prior = NormalPrior{4.0};

  // 2-D grid over (beta0, beta1)
  const int g = 400;
  std::vector<double> lw;
  std::vector<std::array<double, 2>> pts;
  double lmax = -1e300;
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      const double b0 = -8.0 + 16.0 * (i + 0.5) / g;
      const double b1 = -8.0 + 16.0 * (j + 0.5) / g;
      double lp = -0.5 * (b0 * b0 + b1 * b1) / 4.0;
      for (int t = 0; t < d.n(); ++t) {
        const double eta = b0 + b1 * d.X(t, 1);
        const double logp = -std::log1p(std::exp(-eta));
        lp += d.y[t] ? logp : -std::log1p(std::exp(eta));
      }
      lw.push_back(lp);
      pts.push_back({b0, b1});
      lmax = std::max(lmax, lp);
    }
  double z = 0.0;
  for (double v : lw) z += std::exp(v - lmax);
  double lpml_exact = 0.0;
  for (int t = 0; t < d.n(); ++t) {
    double inv = 0.0;  // E[1/f_t]
    for (std::size_t q = 0; q < lw.size(); ++q) {
      const double eta = pts[q][0] + pts[q][1] * d.X(t, 1);
      const double logp = -std::log1p(std::exp(-eta));
      const double lf = d.y[t] ? logp : -std::log1p(std::exp(eta));
      inv += std::exp(lw[q] - lmax) * std::exp(-lf);
    }
    lpml_exact += -std::log(inv / z);
  }

  ChainConfig cfg;
  cfg.n_burnin = 3000;
  cfg.n_samples = 30000;
  cfg.seed = 1234;
  const Chain chain = run_chain(spec, d, cfg);
  const auto r = lpml(chain, d, spec);
  CHECK(r.lpml == doctest::Approx(lpml_exact).epsilon(0.02));
}

TEST_CASE("covariate effect") {
  const ModelSpec spec = ModelSpec::by_name("logit");
  {
    // identically-zero coefficient: the effect is exactly 0
    const Dataset d = bernoulli_rows({0.3, -0.8, 1.4}, {1, 0, 1});
    const auto c = chain_of_states(
        {beta_state({0.2, 0.0}), beta_state({-0.7, 0.0})}, {"intercept", "x1"});
    CHECK(covariate_effect(c, d, spec, "x1", 0.0, 1.0).effect == 0.0);
  }
  {
    // single draw, single row: eta(v0) = 0 and eta(v1) huge gives 1 - 0.5
    const Dataset d = bernoulli_rows({0.0}, {1});
    const auto c = chain_of_states({beta_state({0.0, 5e8})}, {"intercept", "x1"});
    CHECK(covariate_effect(c, d, spec, "x1", 0.0, 1.0).effect ==
          doctest::Approx(0.5).epsilon(1e-12));
  }
  {
    const Dataset d = bernoulli_rows({0.5, -0.5, 1.0, 0.0}, {1, 0, 1, 0});
    const auto c = chain_of_states(
        {beta_state({0.1, 0.7}), beta_state({-0.2, 0.4}), beta_state({0.3, 1.1})},
        {"intercept", "x1"});
    const auto fwd = covariate_effect(c, d, spec, "x1", 0.0, 1.0);
    const auto back = covariate_effect(c, d, spec, "x1", 1.0, 0.0);
    CHECK(fwd.effect == doctest::Approx(-back.effect).epsilon(1e-15));

    // invariant under relabeling of data rows
    Dataset perm = d;
    perm.X(0, 1) = d.X(3, 1);
    perm.X(3, 1) = d.X(0, 1);
    std::swap(perm.y[0], perm.y[3]);
    const auto fwd2 = covariate_effect(c, perm, spec, "x1", 0.0, 1.0);
    CHECK(fwd2.effect == doctest::Approx(fwd.effect).epsilon(1e-13));

    CHECK_THROWS(covariate_effect(c, d, spec, "nope", 0.0, 1.0));
    CHECK_THROWS(covariate_effect(c, d, spec, "x1", 1.0, 1.0));
  }
}

TEST_CASE("covariate effect is stable under thinning by two") {
  const ScenarioSpec sc = scenario_study1(LinkFamily::logit, 300);
  const Dataset d = generate(sc, 0);
  const ModelSpec spec = ModelSpec::by_name("logit");
  ChainConfig cfg;
  cfg.n_burnin = 500;
  cfg.n_samples = 2000;
  cfg.seed = 21;
  const Chain chain = run_chain(spec, d, cfg);
  Chain thinned = chain;
  thinned.draws.clear();
  for (std::size_t i = 0; i < chain.draws.size(); i += 2)
    thinned.draws.push_back(chain.draws[i]);
  const double full = covariate_effect(chain, d, spec, "x1", 0.0, 1.0).effect;
  const double half = covariate_effect(thinned, d, spec, "x1", 0.0, 1.0).effect;
  CHECK(std::fabs(full - half) < 0.01);
}

TEST_CASE("fit report and summary csv") {
  const ScenarioSpec sc = scenario_study1(LinkFamily::logit, 150);
  const Dataset d = generate(sc, 1);
  const ModelSpec spec = ModelSpec::by_name("splogit");
  ChainConfig cfg;
  cfg.n_burnin = 300;
  cfg.n_samples = 500;
  cfg.seed = 77;
  const Chain chain = run_chain(spec, d, cfg);
  const FitReport report = make_fit_report(chain, d, spec);

  CHECK(report.parameters.count("beta_intercept") == 1);
  CHECK(report.parameters.count("r") == 1);
  CHECK(report.effects.size() == 2);
  // lpml identity: sum of log CPO
  double s = 0.0;
  for (double c : report.lpml.cpo) s += std::log(c);
  CHECK(report.lpml.lpml == doctest::Approx(s).epsilon(1e-10));
  // pd identity
  CHECK(report.dic.pd ==
        doctest::Approx(report.dic.dbar - report.dic.d_at_mean).epsilon(1e-12));

  const auto j = fit_report_to_json(report);
  CHECK(j["model"] == "splogit");
  CHECK(j["parameters"].contains("r"));

  write_summary_csv(report, "/tmp/flexlink_summary.csv");
  std::ifstream in("/tmp/flexlink_summary.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "model,variable,median,hpd_lo,hpd_hi,dic,lpml");
}
