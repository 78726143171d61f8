#include "flexlink/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace flexlink {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

SampledShapes SampledShapes::defaults_for(LinkFamily family) {
  SampledShapes s;
  switch (family) {
    case LinkFamily::splogit:
    case LinkFamily::plogit:
    case LinkFamily::altersplogit:
      s.r = true;
      break;
    case LinkFamily::spt:
      s.r = true;
      s.nu = true;
      break;
    case LinkFamily::spep:
      s.r = true;
      s.p = true;
      break;
    case LinkFamily::stukel:
    case LinkFamily::czado:
      s.alpha = true;
      break;
    case LinkFamily::gev:
      s.xi = true;
      break;
    default:
      break;
  }
  return s;
}

ModelSpec ModelSpec::for_link(const LinkSpec& link, const std::string& name) {
  ModelSpec spec;
  spec.link = link;
  spec.link.validate();
  spec.sampled = SampledShapes::defaults_for(link.family);
  spec.name = name.empty() ? to_string(link.family) : name;
  return spec;
}

ModelSpec ModelSpec::by_name(const std::string& name) {
  if (name == "logit") return for_link(LinkSpec::logit());
  if (name == "cloglog") return for_link(LinkSpec::cloglog());
  if (name == "loglog") return for_link(LinkSpec::loglog());
  if (name == "splogit") return for_link(LinkSpec::splogit(1.0));
  if (name == "spt") return for_link(LinkSpec::spt(1.0, 8.0));
  if (name == "spep") return for_link(LinkSpec::spep(1.0, 1.5));
  if (name == "plogit") return for_link(LinkSpec::plogit(1.0));
  if (name == "altersplogit") return for_link(LinkSpec::altersplogit(1.0));
  if (name == "stukel") return for_link(LinkSpec::stukel(0.0, 0.0));
  if (name == "czado") return for_link(LinkSpec::czado(1.0, 1.0));
  if (name == "gev") return for_link(LinkSpec::gev(0.0));
  if (name == "gev-mirror")
    return for_link(LinkSpec::gev(0.0, /*mirror=*/true), "gev-mirror");
  throw std::invalid_argument("unknown model name: " + name);
}

void ModelSpec::validate() const {
  link.validate();
  const auto def = SampledShapes::defaults_for(link.family);
  auto check = [](bool sampled, bool applicable, const char* what) {
    if (sampled && !applicable)
      throw std::invalid_argument(std::string("ModelSpec: cannot sample ") + what +
                                  " for this link family");
  };
  check(sampled.r, def.r, "r");
  check(sampled.nu, def.nu, "nu");
  check(sampled.p, def.p, "p");
  check(sampled.alpha, def.alpha, "alpha");
  check(sampled.xi, def.xi, "xi");
  if (beta_prior && beta_prior->variance <= 0.0)
    throw std::invalid_argument("ModelSpec: beta prior variance must be positive");
  if (r_prior.shape <= 0.0 || r_prior.rate <= 0.0 || nu_prior.shape <= 0.0 ||
      nu_prior.rate <= 0.0)
    throw std::invalid_argument("ModelSpec: gamma priors need positive parameters");
  if (p_prior.lo >= p_prior.hi || xi_prior.lo >= xi_prior.hi)
    throw std::invalid_argument("ModelSpec: empty uniform prior support");
  if (spatial.enabled && spatial.graph.size() == 0)
    throw std::invalid_argument("ModelSpec: spatial model requires a graph");
}

LinkSpec ParamState::link_at(const ModelSpec& spec) const {
  LinkSpec link = spec.link;
  if (spec.sampled.r) link.r = r;
  if (spec.sampled.nu) link.nu = nu;
  if (spec.sampled.p) link.p = p;
  if (spec.sampled.alpha) {
    link.alpha1 = alpha1;
    link.alpha2 = alpha2;
  }
  if (spec.sampled.xi) link.xi = xi;
  return link;
}

double log_likelihood(const ParamState& state, const Dataset& data,
                      const ModelSpec& spec) {
  if (state.beta.size() != data.k())
    throw std::invalid_argument("log_likelihood: beta dimension mismatch");
  const bool spatial = spec.spatial.enabled && data.has_regions();
  if (spatial && state.w.size() != spec.spatial.graph.size())
    throw std::invalid_argument("log_likelihood: w dimension mismatch");

  const LinkSpec link = state.link_at(spec);
  link.validate();
  const Eigen::VectorXd eta = data.X * state.beta;
  double ll = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    double e = eta[i];
    if (spatial) e += state.w[data.region[i]];
    const int yi = data.y[i];
    const int ni = data.trials[i];
    if (yi > 0) ll += yi * log_cdf(link, e);
    if (yi < ni) ll += (ni - yi) * log_sf(link, e);
    if (!std::isfinite(ll)) return -kInf;
  }
  return ll;
}

double icar_quadform(const AdjacencyGraph& graph, const Eigen::VectorXd& w) {
  double q = 0.0;
  for (int i = 0; i < graph.size(); ++i)
    for (int j : graph.neighbors(i))
      if (j > i) {
        const double d = w[i] - w[j];
        q += d * d;
      }
  return q;
}

namespace {

double log_gamma_pdf(double x, const GammaPrior& g) {
  if (x <= 0.0) return -kInf;
  return g.shape * std::log(g.rate) - std::lgamma(g.shape) +
         (g.shape - 1.0) * std::log(x) - g.rate * x;
}

double log_uniform_pdf(double x, const UniformPrior& u) {
  if (x < u.lo || x > u.hi) return -kInf;
  return -std::log(u.hi - u.lo);
}

double log_normal_pdf(double x, double variance) {
  return -0.5 * std::log(2.0 * M_PI * variance) - 0.5 * x * x / variance;
}

double log_invgamma_pdf(double x, const InvGammaPrior& g) {
  if (x <= 0.0) return -kInf;
  return g.shape * std::log(g.rate) - std::lgamma(g.shape) -
         (g.shape + 1.0) * std::log(x) - g.rate / x;
}

}  // namespace

double log_prior(const ParamState& state, const ModelSpec& spec) {
  double lp = 0.0;
  if (spec.beta_prior)
    for (int j = 0; j < state.beta.size(); ++j)
      lp += log_normal_pdf(state.beta[j], spec.beta_prior->variance);
  if (spec.sampled.r) lp += log_gamma_pdf(state.r, spec.r_prior);
  if (spec.sampled.nu) lp += log_gamma_pdf(state.nu, spec.nu_prior);
  if (spec.sampled.p) lp += log_uniform_pdf(state.p, spec.p_prior);
  if (spec.sampled.alpha) {
    lp += log_normal_pdf(state.alpha1, spec.alpha_prior.variance);
    lp += log_normal_pdf(state.alpha2, spec.alpha_prior.variance);
  }
  if (spec.sampled.xi) lp += log_uniform_pdf(state.xi, spec.xi_prior);
  if (spec.spatial.enabled) {
    const auto& graph = spec.spatial.graph;
    const int rank = graph.size() - graph.component_count();
    lp += -0.5 * rank * std::log(state.tau2) -
          icar_quadform(graph, state.w) / (2.0 * state.tau2);
    lp += log_invgamma_pdf(state.tau2, spec.spatial.tau2_prior);
  }
  return lp;
}

double log_posterior(const ParamState& state, const Dataset& data,
                     const ModelSpec& spec) {
  const double lp = log_prior(state, spec);
  if (!std::isfinite(lp)) return -kInf;
  return lp + log_likelihood(state, data, spec);
}

// ---------------------------------------------------------------------------
// Linear feasibility via a dense phase-1 simplex with Bland's rule.
// System: a >= 0, M a = c with c >= 0 componentwise.

LinearFeasibility solve_feasibility(const Eigen::MatrixXd& M,
                                    const Eigen::VectorXd& c) {
  const int m = static_cast<int>(M.rows());
  const int n = static_cast<int>(M.cols());
  for (int i = 0; i < m; ++i)
    if (c[i] < 0.0)
      throw std::invalid_argument("solve_feasibility: c must be nonnegative");

  // Tableau [M | I | c]; artificial basis. Cost row holds reduced costs for
  // the phase-1 objective (minimize sum of artificials).
  Eigen::MatrixXd T(m, n + m + 1);
  T.leftCols(n) = M;
  T.block(0, n, m, m) = Eigen::MatrixXd::Identity(m, m);
  T.col(n + m) = c;

  Eigen::VectorXd cost = Eigen::VectorXd::Zero(n + m);
  for (int j = 0; j < n; ++j) cost[j] = -T.col(j).sum();
  double obj = -c.sum();  // negated phase-1 objective value

  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = n + i;

  const double tol = 1e-10 * std::max(1.0, M.cwiseAbs().maxCoeff());
  const int max_pivots = 50 * (n + m + 10);

  for (int pivot = 0; pivot < max_pivots; ++pivot) {
    // Bland: smallest index with negative reduced cost.
    int enter = -1;
    for (int j = 0; j < n + m; ++j)
      if (cost[j] < -tol) {
        enter = j;
        break;
      }
    if (enter < 0) break;

    int leave = -1;
    double best = kInf;
    for (int i = 0; i < m; ++i) {
      const double a = T(i, enter);
      if (a > tol) {
        const double ratio = T(i, n + m) / a;
        if (ratio < best - tol ||
            (ratio < best + tol && (leave < 0 || basis[i] < basis[leave]))) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) break;  // unbounded: cannot happen in phase 1

    const double piv = T(leave, enter);
    T.row(leave) /= piv;
    for (int i = 0; i < m; ++i)
      if (i != leave && std::fabs(T(i, enter)) > 0.0)
        T.row(i) -= T(i, enter) * T.row(leave);
    const double cf = cost[enter];
    if (std::fabs(cf) > 0.0) {
      cost -= cf * T.row(leave).head(n + m).transpose();
      obj -= cf * T(leave, n + m);
    }
    basis[leave] = enter;
  }

  LinearFeasibility out;
  const double feas_tol = 1e-7 * std::max(1.0, c.cwiseAbs().maxCoeff());
  out.feasible = (-obj) <= feas_tol;
  if (!out.feasible) {
    // Simplex multipliers y_i = 1 - reduced cost of artificial column i;
    // they certify y'M <= 0, y'c > 0.
    out.certificate.resize(m);
    for (int i = 0; i < m; ++i) out.certificate[i] = 1.0 - cost[n + i];
  }
  return out;
}

namespace {

// Rows of X* for the separation test: tau = +1 rows for observed failures,
// -1 for observed successes; a partial count contributes both.
Eigen::MatrixXd signed_design(const Dataset& data) {
  std::vector<Eigen::RowVectorXd> rows;
  rows.reserve(2 * data.n());
  for (int i = 0; i < data.n(); ++i) {
    if (data.y[i] < data.trials[i]) rows.push_back(data.X.row(i));
    if (data.y[i] > 0) rows.push_back(-data.X.row(i));
  }
  Eigen::MatrixXd xs(rows.size(), data.k());
  for (size_t i = 0; i < rows.size(); ++i) xs.row(i) = rows[i];
  return xs;
}

}  // namespace

ProprietyReport check_propriety(const Dataset& data, const ModelSpec& spec) {
  data.validate();
  ProprietyReport report;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(data.X);
  report.rank = static_cast<int>(qr.rank());
  report.full_rank = report.rank == data.k();

  // Overlap holds iff some nonzero nonnegative a satisfies a'X* = 0
  // (Farkas alternative of the separating system X* b <= -1).
  const Eigen::MatrixXd xs = signed_design(data);
  const int k = data.k();
  Eigen::MatrixXd M(k + 1, xs.rows());
  M.topRows(k) = xs.transpose();
  M.row(k).setOnes();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(k + 1);
  c[k] = 1.0;

  const LinearFeasibility lf = solve_feasibility(M, c);
  report.overlap = lf.feasible;
  if (!lf.feasible) {
    // Certificate (w, t), t > 0: b = w / t separates. Verify by
    // re-substitution before reporting.
    const double t = lf.certificate[k];
    if (t > 1e-12) {
      Eigen::VectorXd b = lf.certificate.head(k) / t;
      if (((xs * b).array() <= -1.0 + 1e-6).all()) report.witness = b;
    }
    if (!report.witness) {
      // Degenerate numerics: refine by scaling the certificate direction.
      Eigen::VectorXd dir = lf.certificate.head(k);
      const double worst = (xs * dir).maxCoeff();
      if (worst < -1e-12) report.witness = dir / (-worst);
    }
  }

  if (spec.link.family == LinkFamily::spt) {
    if (spec.sampled.nu) {
      // Gamma prior support is (0, inf): contains values <= k.
      report.nu_condition = false;
    } else {
      report.nu_condition = spec.link.dof() > data.k();
    }
  }
  return report;
}

ProprietyReport check_propriety(const Dataset& data) {
  return check_propriety(data, ModelSpec::for_link(LinkSpec::logit()));
}

}  // namespace flexlink
