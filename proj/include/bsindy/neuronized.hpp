#pragma once

#include <cstdint>
#include <string>

#include "bsindy/dynamics.hpp"

namespace bsindy {

/// Activation T in xi = T(alpha - alpha0) * w.
struct Activation {
  enum class Kind { identity, horseshoe, relu };

  Kind kind = Kind::relu;
  /// Horseshoe approximation T(x) = exp(a sign(x) x^2 + b x + c).
  double a = 0.0, b = 0.0, c = 0.0;

  static Activation identity() { return {Kind::identity}; }
  static Activation relu() { return {Kind::relu}; }
  static Activation horseshoe(double a, double b, double c) { return {Kind::horseshoe, a, b, c}; }
  /// (0.37, 0.89, 0.08)
  static Activation horseshoe_fig1() { return horseshoe(0.37, 0.89, 0.08); }
  /// (0.5, 0.733, 0)
  static Activation horseshoe_appendix() { return horseshoe(0.5, 0.733, 0.0); }

  /// Accepts "identity" (alias "lasso"), "relu", "horseshoe-fig1" (alias "horseshoe"),
  /// "horseshoe-appendix".
  static Activation from_name(const std::string& name);
  /// Preset name when the coefficients match a preset, otherwise "horseshoe".
  std::string name() const;

  double operator()(double x) const;
  /// dT/dx; for relu the right derivative.
  double derivative(double x) const;
  /// x with T(x) = y for y in the image where T is strictly increasing (y > 0 for relu
  /// and horseshoe, any y for identity).
  double inverse(double y) const;

  bool operator==(const Activation&) const = default;
};

struct PriorConfig {
  Activation activation = Activation::relu();
  double alpha0 = 0.0;
  double tau_w = 1.0;

  void validate() const;  ///< tau_w > 0, alpha0 finite
  bool operator==(const PriorConfig&) const = default;
};

inline constexpr std::uint64_t kHyperparameterSeed = 20220401;
inline constexpr long kDefaultMcDraws = 100000;

/// `count` independent draws of T(alpha - alpha0) w, alpha ~ N(0,1), w ~ N(0, tau_w^2).
Vector prior_sample(const PriorConfig& cfg, std::uint64_t seed, long count);

/// Monte Carlo estimate of E[T^2(alpha - alpha0)], alpha ~ N(0,1).
double activation_second_moment(const Activation& act, double alpha0, long mc_draws, std::uint64_t seed);

/// Signal-to-noise slab scale tau_w = ||xi_ref||_2 / sqrt(p E[T^2(alpha - alpha0)]).
/// `alpha0` defaults to 0, where the expectation reduces to E[T^2(alpha)].
double select_tau_w(const Vector& xi_ref, long p, const Activation& act, long mc_draws = kDefaultMcDraws,
                    std::uint64_t seed = kHyperparameterSeed, double alpha0 = 0.0);

/// alpha0 such that P(alpha > alpha0) = eta, i.e. Phi^{-1}(1 - eta).
double alpha0_from_sparsity(double eta);

/// 1 - E[1 / (1 + T(alpha)^2 tau_w^2)] on a fixed sample of alpha.
double horseshoe_nonzero_fraction(const Activation& act, double tau_w, const Vector& alpha_sample);

/// Bisection in log tau_w over [1e-6, 1e6] so that horseshoe_nonzero_fraction hits
/// `target` to within 1e-3, reusing one alpha sample for every evaluation.
double tau_w_horseshoe_calibration(double target, const Activation& act, long mc_draws = kDefaultMcDraws,
                                   std::uint64_t seed = kHyperparameterSeed);

/// Standard normal CDF and quantile.
double normal_cdf(double x);
double normal_quantile(double p);

}  // namespace bsindy
