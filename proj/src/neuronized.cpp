#include "bsindy/neuronized.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>

#include "bsindy/errors.hpp"
#include "bsindy/random.hpp"

namespace bsindy {

Activation Activation::from_name(const std::string& name) {
  if (name == "identity" || name == "lasso") return identity();
  if (name == "relu") return relu();
  if (name == "horseshoe-fig1" || name == "horseshoe") return horseshoe_fig1();
  if (name == "horseshoe-appendix") return horseshoe_appendix();
  throw ConfigError("unknown activation '" + name +
                    "' (expected identity, relu, horseshoe-fig1, horseshoe-appendix or horseshoe with coefficients)");
}

std::string Activation::name() const {
  switch (kind) {
    case Kind::identity: return "identity";
    case Kind::relu: return "relu";
    case Kind::horseshoe:
      if (*this == horseshoe_fig1()) return "horseshoe-fig1";
      if (*this == horseshoe_appendix()) return "horseshoe-appendix";
      return "horseshoe";
  }
  return "unknown";
}

double Activation::operator()(double x) const {
  switch (kind) {
    case Kind::identity: return x;
    case Kind::relu: return x > 0.0 ? x : 0.0;
    case Kind::horseshoe: {
      const double s = (x > 0.0) - (x < 0.0);
      return std::exp(a * s * x * x + b * x + c);
    }
  }
  return 0.0;
}

double Activation::derivative(double x) const {
  switch (kind) {
    case Kind::identity: return 1.0;
    case Kind::relu: return x >= 0.0 ? 1.0 : 0.0;
    case Kind::horseshoe: return (*this)(x) * (2.0 * a * std::abs(x) + b);
  }
  return 0.0;
}

double Activation::inverse(double y) const {
  switch (kind) {
    case Kind::identity: return y;
    case Kind::relu:
      if (!(y > 0.0)) throw ConfigError("relu is only invertible on positive values");
      return y;
    case Kind::horseshoe: {
      if (!(y > 0.0)) throw ConfigError("horseshoe activation is only invertible on positive values");
      // a sign(x) x^2 + b x + c = log y, solved on the branch selected by the sign of x
      const double rhs = std::log(y) - c;
      if (a == 0.0) return rhs / b;
      if (rhs >= 0.0) return (-b + std::sqrt(b * b + 4.0 * a * rhs)) / (2.0 * a);
      return (b - std::sqrt(b * b - 4.0 * a * rhs)) / (2.0 * a);
    }
  }
  return 0.0;
}

void PriorConfig::validate() const {
  if (!(tau_w > 0.0) || !std::isfinite(tau_w)) throw ConfigError("tau_w must be positive and finite");
  if (!std::isfinite(alpha0)) throw ConfigError("alpha0 must be finite");
}

Vector prior_sample(const PriorConfig& cfg, std::uint64_t seed, long count) {
  cfg.validate();
  if (count < 1) throw ConfigError("prior_sample needs count >= 1");
  Rng rng(seed);
  Vector out(count);
  for (long i = 0; i < count; ++i) {
    const double alpha = rng.normal();
    const double w = cfg.tau_w * rng.normal();
    out(i) = cfg.activation(alpha - cfg.alpha0) * w;
  }
  return out;
}

double activation_second_moment(const Activation& act, double alpha0, long mc_draws, std::uint64_t seed) {
  if (mc_draws < 1) throw ConfigError("mc_draws must be >= 1");
  Rng rng(seed);
  double sum = 0.0;
  for (long i = 0; i < mc_draws; ++i) {
    const double v = act(rng.normal() - alpha0);
    sum += v * v;
  }
  return sum / static_cast<double>(mc_draws);
}

double select_tau_w(const Vector& xi_ref, long p, const Activation& act, long mc_draws, std::uint64_t seed,
                    double alpha0) {
  if (p < 1) throw ConfigError("select_tau_w needs p >= 1");
  if (mc_draws < 10000) throw ConfigError("select_tau_w needs at least 1e4 Monte Carlo draws");
  const double norm = xi_ref.norm();
  if (!(norm > 0.0)) throw ConfigError("reference coefficients are all zero; tau_w would be uninformative");
  const double moment = activation_second_moment(act, alpha0, mc_draws, seed);
  if (!(moment > 0.0)) throw NumericError("activation second moment estimate is zero");
  return norm / std::sqrt(static_cast<double>(p) * moment);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("normal quantile needs p in (0,1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(0.0, 1.0), p);
}

double alpha0_from_sparsity(double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("expected nonzero fraction must lie in (0,1)");
  return normal_quantile(1.0 - eta);
}

double horseshoe_nonzero_fraction(const Activation& act, double tau_w, const Vector& alpha_sample) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < alpha_sample.size(); ++i) {
    const double tt = act(alpha_sample(i)) * tau_w;
    sum += 1.0 / (1.0 + tt * tt);
  }
  return 1.0 - sum / static_cast<double>(alpha_sample.size());
}

double tau_w_horseshoe_calibration(double target, const Activation& act, long mc_draws, std::uint64_t seed) {
  if (!(target > 0.0 && target < 1.0)) throw ConfigError("calibration target must lie in (0,1)");
  if (mc_draws < 1) throw ConfigError("mc_draws must be >= 1");
  Rng rng(seed);
  Vector alpha(mc_draws);
  for (long i = 0; i < mc_draws; ++i) alpha(i) = rng.normal();

  double lo = std::log(1e-6), hi = std::log(1e6);
  const double f_lo = horseshoe_nonzero_fraction(act, std::exp(lo), alpha);
  const double f_hi = horseshoe_nonzero_fraction(act, std::exp(hi), alpha);
  if (target < f_lo - 1e-3 || target > f_hi + 1e-3) {
    throw NumericError("calibration target " + std::to_string(target) + " is outside the reachable range [" +
                       std::to_string(f_lo) + ", " + std::to_string(f_hi) + "]");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (horseshoe_nonzero_fraction(act, std::exp(mid), alpha) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double tau = std::exp(0.5 * (lo + hi));
  if (std::abs(horseshoe_nonzero_fraction(act, tau, alpha) - target) > 1e-3) {
    throw NumericError("calibration did not reach the target within 1e-3");
  }
  return tau;
}

}  // namespace bsindy
