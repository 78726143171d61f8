#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>

#include "flexlink/data.hpp"
#include "flexlink/link.hpp"

namespace flexlink {

struct NormalPrior {
  double variance = 1e4;
};

struct GammaPrior {
  double shape = 1.0;
  double rate = 1.0;
};

struct UniformPrior {
  double lo = 0.0;
  double hi = 1.0;
};

struct InvGammaPrior {
  double shape = 0.5;
  double rate = 0.05;
};

struct SpatialSpec {
  bool enabled = false;
  AdjacencyGraph graph;
  InvGammaPrior tau2_prior;  // weakly informative default
};

// Which shape parameters the sampler treats as unknown. Defaults follow the
// family: the power families sample r (spt also nu, spep also p), Stukel and
// Czado sample both alphas, gev samples xi.
struct SampledShapes {
  bool r = false;
  bool nu = false;
  bool p = false;
  bool alpha = false;
  bool xi = false;

  static SampledShapes defaults_for(LinkFamily family);
};

struct ModelSpec {
  std::string name;           // report label; defaults to the family name
  LinkSpec link;              // template; holds values for fixed shapes
  SampledShapes sampled;
  std::optional<NormalPrior> beta_prior = NormalPrior{};  // nullopt = flat
  GammaPrior r_prior{1.0, 1.0};      // exponential(1)
  GammaPrior nu_prior{8.0, 1.0};
  UniformPrior p_prior{1.0, 2.0};
  NormalPrior alpha_prior{100.0};
  UniformPrior xi_prior{-1.0, 1.0};
  SpatialSpec spatial;

  static ModelSpec for_link(const LinkSpec& link, const std::string& name = "");
  // Built-in comparator models by name: logit, cloglog, loglog, splogit,
  // spt, spep, plogit, altersplogit, stukel, czado, gev, gev-mirror.
  static ModelSpec by_name(const std::string& name);
  void validate() const;
};

// One posterior draw. w is empty unless spatial effects are enabled, in
// which case it has one entry per graph node and sums to zero.
struct ParamState {
  Eigen::VectorXd beta;
  double r = 1.0;
  double nu = 8.0;
  double p = 1.5;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double xi = 0.0;
  Eigen::VectorXd w;
  double tau2 = 1.0;

  // Materialize the link at this state's shape values.
  LinkSpec link_at(const ModelSpec& spec) const;
};

// Binomial log likelihood, Eq.-(5) kernel generalized to counts:
//   sum_i y_i log F(eta_i) + (N_i - y_i) log(1 - F(eta_i)),
// eta_i = x_i' beta + w_{region_i}. Binomial coefficients are omitted
// (constant in the parameters); DIC and LPML use the same kernel so model
// comparisons are internally consistent. Returns -inf when a row demands an
// impossible probability (GEV support).
double log_likelihood(const ParamState& state, const Dataset& data,
                      const ModelSpec& spec);

// Pairwise ICAR penalty sum over undirected edges of (w_i - w_j)^2. The
// ICAR log prior is -(K - C)/2 log tau2 - quadform / (2 tau2), with C the
// number of graph components.
double icar_quadform(const AdjacencyGraph& graph, const Eigen::VectorXd& w);

double log_prior(const ParamState& state, const ModelSpec& spec);
double log_posterior(const ParamState& state, const Dataset& data,
                     const ModelSpec& spec);

// Theorem-2 style propriety diagnostics for flat-beta-prior fits.
//   full_rank: design matrix has full column rank.
//   overlap:   no vector b with X* b <= -1 componentwise, where X* stacks
//              tau_i x_i' (tau = +1 for failures, -1 for successes; rows
//              with 0 < y < N contribute both signs).
// When overlap fails, `witness` holds a separating b (X* b <= -1 verified by
// re-substitution). For spt links, nu_condition reports whether the
// degrees-of-freedom support is confined to nu > k.
struct ProprietyReport {
  bool full_rank = false;
  bool overlap = false;
  std::optional<Eigen::VectorXd> witness;
  std::optional<bool> nu_condition;
  int rank = 0;

  bool ok() const { return full_rank && overlap; }
};

ProprietyReport check_propriety(const Dataset& data, const ModelSpec& spec);
ProprietyReport check_propriety(const Dataset& data);

// Feasibility of {a >= 0, M a = c} decided by a phase-1 simplex; used by the
// overlap test through Farkas duality. Exposed for testing.
struct LinearFeasibility {
  bool feasible = false;
  Eigen::VectorXd certificate;  // Farkas dual vector when infeasible
};
LinearFeasibility solve_feasibility(const Eigen::MatrixXd& M,
                                    const Eigen::VectorXd& c);

}  // namespace flexlink
