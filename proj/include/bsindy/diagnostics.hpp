#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bsindy/library.hpp"
#include "bsindy/mcmc.hpp"

namespace bsindy {

/// Two-segment convergence score (mu_A - mu_B) / sqrt(var_A/n_A + var_B/n_B) with
/// segment A the first floor(frac_a M) samples and B the last floor(frac_b M).
/// Throws NumericError when both segments have zero variance.
double geweke_score(std::span<const double> samples, double frac_a = 0.1, double frac_b = 0.5);

/// Empirical quantile with linear interpolation between order statistics
/// (position (n-1) q in the sorted sample).
double quantile(std::vector<double> values, double q);

/// Fraction of post-burn-in samples with |xi_j| > zero_tol.
Vector inclusion_probabilities(const Chain& chain, double zero_tol);

/// 0 for relu chains, 1e-3 * max_j |posterior mean_j| otherwise.
double default_zero_tolerance(const Chain& chain);

struct CoefficientSummary {
  double mean = 0.0;
  double std = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double inclusion = 0.0;
  std::optional<double> geweke;  ///< empty when undefined (e.g. identically zero)
};

struct FitReport {
  std::vector<CoefficientSummary> coefficients;
  std::vector<Eigen::Index> median_model;  ///< {j : inclusion_j > 0.5}
  double level = 0.9;
  double zero_tol = 0.0;
  long post_burn_in = 0;
  ChainConfig config;

  /// Posterior means, zeroed outside the median model.
  Vector median_model_means() const;
  bool geweke_all_below(double bound) const;  ///< over coefficients with a defined score
  bool geweke_retained_below(double bound) const;  ///< same, median-model coefficients only
};

/// Equal-tailed intervals, moments, inclusion and Geweke scores over post-burn-in samples.
FitReport summarize(const Chain& chain, double level = 0.9, std::optional<double> zero_tol = std::nullopt);

struct PredictiveEnsemble {
  Vector t;
  std::vector<Matrix> trajectories;  ///< retained draws, each m x n
  Matrix mean;
  Matrix lower;
  Matrix upper;
  double level = 0.9;
  long diverged = 0;
};

/// Pointwise mean and equal-tailed band over a set of m x n trajectories.
PredictiveEnsemble band_from_trajectories(Vector t, std::vector<Matrix> trajectories, double level, long diverged = 0);

/// Integrates x' = Theta(x)^T Xi for posterior draws of Xi. `chains[k]` holds the
/// samples for equation k; one post-burn-in iteration index is drawn per ensemble
/// member (without replacement when enough samples exist) and shared by all equations.
PredictiveEnsemble posterior_predictive(const std::vector<const Chain*>& chains, const BasisSpec& spec,
                                        const Vector& x0, const Vector& t, long n_draws, double level,
                                        std::uint64_t seed, const IntegratorOptions& options = {});

/// Same, from explicit coefficient draws (each p x n).
PredictiveEnsemble posterior_predictive(const std::vector<Matrix>& coefficient_draws, const BasisSpec& spec,
                                        const Vector& x0, const Vector& t, double level,
                                        const IntegratorOptions& options = {});

struct Autocorrelation {
  Matrix per_window;  ///< n_windows x window_len, R(tau) for tau = 0..window_len-1
  Vector mean;        ///< average over windows
  Vector spread;      ///< standard deviation over windows
};

/// Uncentered lag-product averages R(tau) = mean_t x_t x_{t+tau} over pairs inside each of
/// `n_windows` consecutive non-overlapping windows of `window_len` samples.
Autocorrelation windowed_autocorrelation(const Vector& series, Eigen::Index window_len, Eigen::Index n_windows);

/// Equal-width histogram of `values` over [lo, hi]; returns bin counts.
std::vector<long> histogram(std::span<const double> values, double lo, double hi, int bins);

/// Batch-means standard error of the mean.
double batch_means_se(std::span<const double> values, int batches = 50);

}  // namespace bsindy
