#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flexlink/model.hpp"
#include "flexlink/rng.hpp"

namespace flexlink {

// Thrown when a flat-beta-prior fit is requested on data that fail the
// Theorem-2 style propriety conditions.
struct propriety_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ChainConfig {
  int n_burnin = 2000;
  int n_samples = 4000;
  int thin = 1;  // applied after burn-in only
  std::uint64_t seed = 1;
  double adapt_target_beta = 0.234;
  double adapt_target_scalar = 0.44;
  std::optional<ParamState> init;

  void validate() const;
};

struct BlockStats {
  long proposals = 0;
  long accepts = 0;
  double rate() const { return proposals ? double(accepts) / proposals : 0.0; }
};

// Scalar random-walk Metropolis kernel with Robbins-Monro scale adaptation.
// Adaptation stops permanently once freeze() is called.
class ScalarRWKernel {
 public:
  explicit ScalarRWKernel(double target = 0.44, double init_scale = 0.5)
      : target_(target), log_scale_(std::log(init_scale)) {}

  double scale() const { return std::exp(log_scale_); }
  double propose(double x, Rng& rng) { return x + scale() * rng.normal(); }

  void record(bool accepted) {
    if (frozen_) return;
    ++steps_;
    const double gamma = std::pow(double(steps_), -0.6);
    log_scale_ += gamma * ((accepted ? 1.0 : 0.0) - target_);
  }

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

 private:
  double target_;
  double log_scale_;
  long steps_ = 0;
  bool frozen_ = false;
};

// Multivariate random-walk kernel: proposal x + s L z with L refreshed from
// the running sample covariance during adaptation and s tuned by
// Robbins-Monro toward the target acceptance rate.
class MvRWKernel {
 public:
  MvRWKernel(int dim, double target = 0.234)
      : dim_(dim),
        target_(target),
        log_scale_(std::log(2.38 / std::sqrt(double(std::max(dim, 1))))),
        chol_(0.1 * Eigen::MatrixXd::Identity(dim, dim)),
        mean_(Eigen::VectorXd::Zero(dim)),
        m2_(Eigen::MatrixXd::Zero(dim, dim)) {}

  double scale() const { return std::exp(log_scale_); }

  Eigen::VectorXd propose(const Eigen::VectorXd& x, Rng& rng) {
    Eigen::VectorXd z(dim_);
    for (int i = 0; i < dim_; ++i) z[i] = rng.normal();
    return x + scale() * (chol_ * z);
  }

  void record(bool accepted) {
    if (frozen_) return;
    ++steps_;
    const double gamma = std::pow(double(steps_), -0.6);
    log_scale_ += gamma * ((accepted ? 1.0 : 0.0) - target_);
  }

  // Feed the current state once per iteration during burn-in.
  void observe(const Eigen::VectorXd& x) {
    if (frozen_) return;
    ++count_;
    const Eigen::VectorXd delta = x - mean_;
    mean_ += delta / double(count_);
    m2_ += delta * (x - mean_).transpose();
    if (count_ >= 100 && count_ % 50 == 0) {
      Eigen::MatrixXd cov = m2_ / double(count_ - 1);
      cov.diagonal().array() += 1e-9;
      Eigen::LLT<Eigen::MatrixXd> llt(cov);
      if (llt.info() == Eigen::Success) chol_ = llt.matrixL();
    }
  }

  void freeze() { frozen_ = true; }

 private:
  int dim_;
  double target_;
  double log_scale_;
  Eigen::MatrixXd chol_;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd m2_;
  long steps_ = 0;
  long count_ = 0;
  bool frozen_ = false;
};

struct Chain {
  std::vector<ParamState> draws;  // post burn-in, thinned
  std::vector<std::string> beta_names;
  std::vector<std::string> shape_names;  // subset of r,nu,p,alpha1,alpha2,xi
  std::vector<std::string> w_names;      // region labels when spatial
  std::map<std::string, BlockStats> acceptance;  // post burn-in ledger
  std::map<std::string, double> scales_at_freeze;
  std::map<std::string, double> scales_final;
  std::vector<std::string> warnings;
  ChainConfig config;

  std::size_t size() const { return draws.size(); }
  // All scalar column names in CSV order.
  std::vector<std::string> column_names() const;
  // Column of draws for one scalar parameter name.
  std::vector<double> column(const std::string& name) const;
};

// Adaptive random-walk Metropolis-within-Gibbs targeting the Eq.-(5)
// posterior. Blocks: beta jointly (multivariate kernel), each sampled shape
// parameter in a scalar block (r and nu on the log scale, p and xi on a
// logit-of-range scale), per-node spatial effects followed by exact
// recentering, and a conjugate inverse-gamma draw for tau2. Proposal
// adaptation runs during burn-in only.
Chain run_chain(const ModelSpec& spec, const Dataset& data,
                const ChainConfig& cfg);

// IRLS fit under the link's symmetric special case; used for initialization.
Eigen::VectorXd irls_initial_beta(const Dataset& data, const LinkSpec& link);

// Mean of the ICAR full conditional for node k: average of its neighbors.
double icar_conditional_mean(const AdjacencyGraph& graph,
                             const Eigen::VectorXd& w, int k);

// Single spatial-node move against prior times region likelihood. Exact
// Gibbs draw from N(neighbor mean, tau2/m_k) when the region has no data
// rows; Metropolis otherwise. Does not recenter. Returns acceptance.
bool update_w_node(ParamState& state, int node, const Dataset& data,
                   const ModelSpec& spec, const std::vector<int>& rows,
                   ScalarRWKernel& kernel, Rng& rng);

// Conjugate inverse-gamma update for tau2 given w; the posterior parameters
// are shape + rank/2 and rate + quadform/2 with rank = K - #components.
std::pair<double, double> tau2_posterior(const ModelSpec& spec,
                                         const Eigen::VectorXd& w);
double update_tau2(const ParamState& state, const ModelSpec& spec, Rng& rng);

// Columnar CSV of all scalar parameters plus a JSON sidecar carrying config,
// acceptance rates, seed and the model document.
void write_chain(const Chain& chain, const ModelSpec& spec,
                 const std::string& directory,
                 const std::string& data_path = "");
struct LoadedChain {
  Chain chain;
  ModelSpec spec;
  std::string data_path;
};
LoadedChain read_chain(const std::string& directory);

}  // namespace flexlink
