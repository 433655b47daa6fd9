#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bsindy/dynamics.hpp"
#include "bsindy/neuronized.hpp"
#include "bsindy/random.hpp"

namespace bsindy {

/// Design and target together with the cached Gram quantities the sampler reuses.
struct RegressionProblem {
  Matrix D;
  Vector z;
  Matrix gram;  ///< D^T D
  Vector dtz;   ///< D^T z

  RegressionProblem(Matrix design, Vector target);
  Eigen::Index rows() const { return D.rows(); }
  Eigen::Index cols() const { return D.cols(); }
};

enum class AlphaUpdate { metropolis, relu_exact };
std::string to_string(AlphaUpdate update);
AlphaUpdate parse_alpha_update(const std::string& name);

/// Noise variance: either held at `value`, or learned under an InvGamma(a0, b0)
/// prior starting from `value`.
struct Sigma2Config {
  bool learn = false;
  double value = 1.0;
  double a0 = 1.0;
  double b0 = 1.0;

  bool operator==(const Sigma2Config&) const = default;
};

struct ChainConfig {
  PriorConfig prior;
  long iterations = 10000;
  double burn_in = 0.2;  ///< fraction of iterations marked as burn-in
  double rw_step = 0.5;
  double rescale_step = 1.0;  ///< log-scale step of the xi-preserving move; 0 disables it
  Sigma2Config sigma2;
  std::uint64_t seed = 0;
  AlphaUpdate alpha_update = AlphaUpdate::metropolis;

  void validate() const;
  long burn_in_index() const;  ///< floor(burn_in * iterations)

  bool operator==(const ChainConfig&) const = default;
};

/// Full sampler output. Rows are iterations; the burn-in rows are kept.
struct Chain {
  Matrix alpha;
  Matrix w;
  Matrix xi;  ///< T(alpha - alpha0) * w, element-wise
  Vector sigma2;
  std::vector<long> accepted;  ///< per-coordinate accepted alpha proposals
  long proposals = 0;          ///< alpha proposals per coordinate
  long burn_in_index = 0;
  std::uint64_t seed = 0;
  ChainConfig config;

  long size() const { return static_cast<long>(xi.rows()); }
  long coefficients() const { return static_cast<long>(xi.cols()); }
  /// xi rows from burn_in_index on.
  Matrix xi_post() const;
  Vector acceptance_rates() const;
};

/// T(alpha_j - alpha0) for every coordinate.
Vector activation_values(const PriorConfig& prior, const Vector& alpha);
Vector coefficients_from(const PriorConfig& prior, const Vector& alpha, const Vector& w);

struct GaussianMoments {
  Vector mean;
  Matrix cov;
};

/// Mean and covariance of w | z, alpha, sigma2:
///   cov  = sigma2 (D_a D^T D D_a + sigma2 / tau_w^2 I)^{-1}
///   mean = (D_a D^T D D_a + sigma2 / tau_w^2 I)^{-1} D_a D^T z,   D_a = diag(T(alpha - alpha0)).
GaussianMoments w_conditional_moments(const RegressionProblem& problem, const Vector& alpha, const PriorConfig& prior,
                                      double sigma2);

/// Exact draw of w | z, alpha, sigma2 through a Cholesky factor of the precision.
Vector sample_w_conditional(const RegressionProblem& problem, const Vector& alpha, const PriorConfig& prior,
                            double sigma2, Rng& rng);

/// -||D xi(alpha, w) - z||^2 / (2 sigma2).
double log_likelihood(const RegressionProblem& problem, const Vector& alpha, const Vector& w,
                      const PriorConfig& prior, double sigma2);

struct MhStep {
  Vector alpha;
  std::vector<bool> accepted;
};

/// One sweep of coordinate-wise Gaussian random-walk Metropolis on alpha, targeting
/// likelihood x prod N(alpha_j; 0, 1).
MhStep mh_alpha_step(const RegressionProblem& problem, const Vector& alpha, const Vector& w, const PriorConfig& prior,
                     double sigma2, double rw_step, Rng& rng);

struct RescaleStep {
  Vector alpha;
  Vector w;
  std::vector<bool> accepted;
};

/// Metropolis move along the ridge of constant xi: for every coordinate with
/// T(alpha_j - alpha0) != 0 it proposes T -> T e^s, w_j -> w_j e^{-s}, s ~ N(0, step^2),
/// and accepts against prior(alpha_j) prior(w_j) |T'(x) / T'(x')|. The likelihood is unchanged.
RescaleStep rescale_step(const Vector& alpha, const Vector& w, const PriorConfig& prior, double step, Rng& rng);

/// Full conditional of alpha_j under the ReLU activation: a mixture of N(0,1)
/// truncated to (-inf, alpha0] and N(slab_mean, slab_sd^2) truncated to (alpha0, inf).
struct ReluConditional {
  double log_weight_spike = 0.0;
  double log_weight_slab = 0.0;
  double slab_mean = 0.0;
  double slab_sd = 1.0;
  double alpha0 = 0.0;

  double spike_probability() const;
  double cdf(double x) const;
};

/// Conditional of coordinate j given the other alphas and w.
ReluConditional relu_alpha_conditional(const RegressionProblem& problem, const Vector& alpha, const Vector& w,
                                       const PriorConfig& prior, double sigma2, Eigen::Index j);

/// One sweep of exact Gibbs draws of each alpha_j from its ReLU full conditional.
Vector relu_exact_alpha_step(const RegressionProblem& problem, const Vector& alpha, const Vector& w,
                             const PriorConfig& prior, double sigma2, Rng& rng);

/// Draw from InvGamma(a0 + m/2, b0 + residual_ss/2).
double sample_sigma2(double residual_ss, long m, double a0, double b0, Rng& rng);

/// Standard normal truncated to [lower, inf).
double truncated_normal_lower(double lower, Rng& rng);
/// log(1 - Phi(x)), accurate in the far tail.
double log_normal_sf(double x);

/// Runs the neuronized-prior sampler: per iteration w | alpha, then alpha | w
/// (Metropolis or exact ReLU conditional), then the rescaling move (unless
/// rescale_step is 0), then sigma2 when it is learned.
/// Starts from alpha = alpha0 + 1, w = xi_ls / max(T(1), 1e-3).
Chain run_chain(const RegressionProblem& problem, const ChainConfig& cfg);
Chain run_chain(const Matrix& D, const Vector& z, const ChainConfig& cfg);

}  // namespace bsindy
