#include "bsindy/mcmc.hpp"

#include <cmath>
#include <numbers>

#include "bsindy/errors.hpp"
#include "bsindy/sindy.hpp"

namespace bsindy {

RegressionProblem::RegressionProblem(Matrix design, Vector target) : D(std::move(design)), z(std::move(target)) {
  if (D.rows() != z.size()) {
    throw ConfigError("design has " + std::to_string(D.rows()) + " rows but target has " + std::to_string(z.size()));
  }
  if (!D.allFinite() || !z.allFinite()) throw ConfigError("regression data contain non-finite values");
  gram = D.transpose() * D;
  dtz = D.transpose() * z;
}

std::string to_string(AlphaUpdate update) {
  return update == AlphaUpdate::metropolis ? "metropolis" : "relu-exact";
}

AlphaUpdate parse_alpha_update(const std::string& name) {
  if (name == "metropolis") return AlphaUpdate::metropolis;
  if (name == "relu-exact") return AlphaUpdate::relu_exact;
  throw ConfigError("unknown alpha update '" + name + "' (expected metropolis or relu-exact)");
}

void ChainConfig::validate() const {
  prior.validate();
  if (iterations < 10) throw ConfigError("chain needs at least 10 iterations");
  if (!(burn_in >= 0.0 && burn_in < 1.0)) throw ConfigError("burn-in fraction must lie in [0,1)");
  if (!(rw_step > 0.0)) throw ConfigError("random-walk step must be positive");
  if (!(rescale_step >= 0.0)) throw ConfigError("rescale step must be >= 0");
  if (!(sigma2.value > 0.0) || !std::isfinite(sigma2.value)) throw ConfigError("sigma2 must be positive and finite");
  if (sigma2.learn && !(sigma2.a0 > 0.0 && sigma2.b0 > 0.0)) throw ConfigError("inverse-gamma a0 and b0 must be positive");
  if (alpha_update == AlphaUpdate::relu_exact && prior.activation.kind != Activation::Kind::relu) {
    throw ConfigError("the exact alpha update requires the relu activation");
  }
}

long ChainConfig::burn_in_index() const {
  return static_cast<long>(std::floor(burn_in * static_cast<double>(iterations)));
}

Matrix Chain::xi_post() const {
  const long start = std::min(burn_in_index, size());
  return xi.bottomRows(size() - start);
}

Vector Chain::acceptance_rates() const {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(accepted.size()));
  if (proposals == 0) return out;
  for (std::size_t j = 0; j < accepted.size(); ++j) {
    out(static_cast<Eigen::Index>(j)) = static_cast<double>(accepted[j]) / static_cast<double>(proposals);
  }
  return out;
}

Vector activation_values(const PriorConfig& prior, const Vector& alpha) {
  Vector t(alpha.size());
  for (Eigen::Index j = 0; j < alpha.size(); ++j) t(j) = prior.activation(alpha(j) - prior.alpha0);
  return t;
}

Vector coefficients_from(const PriorConfig& prior, const Vector& alpha, const Vector& w) {
  return activation_values(prior, alpha).cwiseProduct(w);
}

namespace {

void check_sizes(const RegressionProblem& problem, const Vector& alpha) {
  if (alpha.size() != problem.cols()) {
    throw ConfigError("alpha has " + std::to_string(alpha.size()) + " entries, design has " +
                      std::to_string(problem.cols()) + " columns");
  }
}

/// Precision (up to the 1/sigma2 factor) of w | alpha and its Cholesky factor.
struct WPrecision {
  Eigen::LLT<Matrix> llt;
  Vector rhs;
};

WPrecision factor_w_precision(const RegressionProblem& problem, const Vector& alpha, const PriorConfig& prior,
                              double sigma2) {
  check_sizes(problem, alpha);
  prior.validate();
  if (!(sigma2 > 0.0)) throw ConfigError("sigma2 must be positive");
  const Eigen::Index p = problem.cols();
  const Vector t = activation_values(prior, alpha);
  Matrix A = t.asDiagonal() * problem.gram * t.asDiagonal();
  A.diagonal().array() += sigma2 / (prior.tau_w * prior.tau_w);
  WPrecision out{Eigen::LLT<Matrix>(A), t.cwiseProduct(problem.dtz)};
  if (out.llt.info() != Eigen::Success) {
    const double jitter = 1e-10 * A.trace() / static_cast<double>(p);
    A.diagonal().array() += jitter;
    out.llt.compute(A);
    if (out.llt.info() != Eigen::Success) throw NumericError("w-conditional precision is not positive definite");
  }
  return out;
}

}  // namespace

GaussianMoments w_conditional_moments(const RegressionProblem& problem, const Vector& alpha, const PriorConfig& prior,
                                      double sigma2) {
  const WPrecision prec = factor_w_precision(problem, alpha, prior, sigma2);
  const Eigen::Index p = problem.cols();
  GaussianMoments out;
  out.mean = prec.llt.solve(prec.rhs);
  out.cov = sigma2 * prec.llt.solve(Matrix::Identity(p, p));
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  return out;
}

Vector sample_w_conditional(const RegressionProblem& problem, const Vector& alpha, const PriorConfig& prior,
                            double sigma2, Rng& rng) {
  const WPrecision prec = factor_w_precision(problem, alpha, prior, sigma2);
  const Eigen::Index p = problem.cols();
  Vector eps(p);
  for (Eigen::Index j = 0; j < p; ++j) eps(j) = rng.normal();
  // A = L L^T, so L^{-T} eps has covariance A^{-1}
  Vector noise = prec.llt.matrixU().solve(eps);
  return prec.llt.solve(prec.rhs) + std::sqrt(sigma2) * noise;
}

double log_likelihood(const RegressionProblem& problem, const Vector& alpha, const Vector& w,
                      const PriorConfig& prior, double sigma2) {
  check_sizes(problem, alpha);
  if (w.size() != alpha.size()) throw ConfigError("alpha and w differ in length");
  const Vector r = problem.D * coefficients_from(prior, alpha, w) - problem.z;
  return -r.squaredNorm() / (2.0 * sigma2);
}

MhStep mh_alpha_step(const RegressionProblem& problem, const Vector& alpha, const Vector& w, const PriorConfig& prior,
                     double sigma2, double rw_step, Rng& rng) {
  check_sizes(problem, alpha);
  if (!(rw_step > 0.0)) throw ConfigError("random-walk step must be positive");
  MhStep out{alpha, std::vector<bool>(static_cast<std::size_t>(alpha.size()), false)};
  Vector xi = coefficients_from(prior, alpha, w);
  Vector g = problem.gram * xi;  // D^T D xi, kept in sync with xi
  for (Eigen::Index j = 0; j < alpha.size(); ++j) {
    const double current = out.alpha(j);
    const double proposal = current + rw_step * rng.normal();
    const double delta = (prior.activation(proposal - prior.alpha0) - prior.activation(current - prior.alpha0)) * w(j);
    // change of ||z - D xi||^2 when xi_j moves by delta
    const double dssr = -2.0 * delta * (problem.dtz(j) - g(j)) + delta * delta * problem.gram(j, j);
    const double log_ratio = -dssr / (2.0 * sigma2) + 0.5 * (current * current - proposal * proposal);
    if (std::log(rng.uniform()) < log_ratio) {
      out.alpha(j) = proposal;
      out.accepted[static_cast<std::size_t>(j)] = true;
      if (delta != 0.0) {
        xi(j) += delta;
        g += delta * problem.gram.col(j);
      }
    }
  }
  return out;
}

RescaleStep rescale_step(const Vector& alpha, const Vector& w, const PriorConfig& prior, double step, Rng& rng) {
  if (alpha.size() != w.size()) throw ConfigError("alpha and w differ in length");
  if (!(step > 0.0)) throw ConfigError("rescale step must be positive");
  const Activation& act = prior.activation;
  const double inv_tau2 = 1.0 / (prior.tau_w * prior.tau_w);
  RescaleStep out{alpha, w, std::vector<bool>(static_cast<std::size_t>(alpha.size()), false)};
  for (Eigen::Index j = 0; j < alpha.size(); ++j) {
    const double x = alpha(j) - prior.alpha0;
    const double t = act(x);
    if (t == 0.0 || act.derivative(x) <= 0.0) continue;
    const double s = step * rng.normal();
    const double x_new = act.inverse(t * std::exp(s));
    const double a_new = prior.alpha0 + x_new;
    const double w_new = w(j) * std::exp(-s);
    const double d_new = act.derivative(x_new);
    if (!std::isfinite(a_new) || !std::isfinite(w_new) || !(d_new > 0.0)) continue;
    const double log_ratio = 0.5 * (alpha(j) * alpha(j) - a_new * a_new) +
                             0.5 * inv_tau2 * (w(j) * w(j) - w_new * w_new) +
                             std::log(act.derivative(x) / d_new);
    if (std::log(rng.uniform()) < log_ratio) {
      out.alpha(j) = a_new;
      out.w(j) = w_new;
      out.accepted[static_cast<std::size_t>(j)] = true;
    }
  }
  return out;
}

double log_normal_sf(double x) {
  if (x < 30.0) return std::log(0.5 * std::erfc(x / std::numbers::sqrt2));
  const double x2 = x * x;
  return -0.5 * x2 - std::log(x) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log1p(-1.0 / x2 + 3.0 / (x2 * x2));
}

double ReluConditional::spike_probability() const {
  const double hi = std::max(log_weight_spike, log_weight_slab);
  const double a = std::exp(log_weight_spike - hi);
  const double b = std::exp(log_weight_slab - hi);
  return a / (a + b);
}

double ReluConditional::cdf(double x) const {
  const double ps = spike_probability();
  const double spike_part = normal_cdf(std::min(x, alpha0)) / normal_cdf(alpha0);
  double slab_part = 0.0;
  if (x > alpha0) {
    const double lo = normal_cdf((alpha0 - slab_mean) / slab_sd);
    const double mass = std::exp(log_normal_sf((alpha0 - slab_mean) / slab_sd));
    slab_part = (normal_cdf((x - slab_mean) / slab_sd) - lo) / mass;
  }
  return ps * spike_part + (1.0 - ps) * slab_part;
}

namespace {

/// Conditional of alpha_j given c = D_j^T r_j, where r_j excludes coordinate j.
ReluConditional relu_conditional_from(double gjj, double c, double wj, double alpha0, double sigma2) {
  const double a = gjj * wj * wj;
  const double b = wj * c;
  const double precision = 1.0 + a / sigma2;
  const double mean = (a * alpha0 + b) / sigma2 / precision;
  ReluConditional out;
  out.alpha0 = alpha0;
  out.slab_mean = mean;
  out.slab_sd = 1.0 / std::sqrt(precision);
  out.log_weight_spike = std::log(normal_cdf(alpha0));
  out.log_weight_slab = 0.5 * precision * mean * mean - (a * alpha0 * alpha0 + 2.0 * alpha0 * b) / (2.0 * sigma2) -
                        0.5 * std::log(precision) + log_normal_sf((alpha0 - mean) * std::sqrt(precision));
  return out;
}

double draw_relu_conditional(const ReluConditional& cond, Rng& rng) {
  if (rng.uniform() < cond.spike_probability()) {
    return -truncated_normal_lower(-cond.alpha0, rng);
  }
  return cond.slab_mean + cond.slab_sd * truncated_normal_lower((cond.alpha0 - cond.slab_mean) / cond.slab_sd, rng);
}

void require_relu(const PriorConfig& prior) {
  if (prior.activation.kind != Activation::Kind::relu) {
    throw ConfigError("the exact alpha update requires the relu activation");
  }
}

}  // namespace

ReluConditional relu_alpha_conditional(const RegressionProblem& problem, const Vector& alpha, const Vector& w,
                                       const PriorConfig& prior, double sigma2, Eigen::Index j) {
  require_relu(prior);
  check_sizes(problem, alpha);
  const Vector xi = coefficients_from(prior, alpha, w);
  const double c = problem.dtz(j) - problem.gram.row(j).dot(xi) + problem.gram(j, j) * xi(j);
  return relu_conditional_from(problem.gram(j, j), c, w(j), prior.alpha0, sigma2);
}

Vector relu_exact_alpha_step(const RegressionProblem& problem, const Vector& alpha, const Vector& w,
                             const PriorConfig& prior, double sigma2, Rng& rng) {
  require_relu(prior);
  check_sizes(problem, alpha);
  Vector out = alpha;
  Vector xi = coefficients_from(prior, alpha, w);
  Vector g = problem.gram * xi;
  for (Eigen::Index j = 0; j < alpha.size(); ++j) {
    const double c = problem.dtz(j) - g(j) + problem.gram(j, j) * xi(j);
    const auto cond = relu_conditional_from(problem.gram(j, j), c, w(j), prior.alpha0, sigma2);
    out(j) = draw_relu_conditional(cond, rng);
    const double delta = prior.activation(out(j) - prior.alpha0) * w(j) - xi(j);
    if (delta != 0.0) {
      xi(j) += delta;
      g += delta * problem.gram.col(j);
    }
  }
  return out;
}

double truncated_normal_lower(double lower, Rng& rng) {
  if (lower < 0.45) {
    while (true) {
      const double x = rng.normal();
      if (x >= lower) return x;
    }
  }
  // exponential proposal with the optimal rate for the tail
  const double rate = 0.5 * (lower + std::sqrt(lower * lower + 4.0));
  while (true) {
    const double x = lower - std::log(rng.uniform()) / rate;
    const double d = x - rate;
    if (std::log(rng.uniform()) <= -0.5 * d * d) return x;
  }
}

double sample_sigma2(double residual_ss, long m, double a0, double b0, Rng& rng) {
  if (!(residual_ss >= 0.0)) throw ConfigError("residual sum of squares must be >= 0");
  if (!(a0 > 0.0 && b0 > 0.0)) throw ConfigError("inverse-gamma a0 and b0 must be positive");
  if (m < 0) throw ConfigError("sample count must be >= 0");
  const double shape = a0 + 0.5 * static_cast<double>(m);
  const double rate = b0 + 0.5 * residual_ss;
  return 1.0 / rng.gamma(shape, 1.0 / rate);
}

Chain run_chain(const RegressionProblem& problem, const ChainConfig& cfg) {
  cfg.validate();
  const Eigen::Index p = problem.cols();
  const long M = cfg.iterations;

  Chain chain;
  chain.config = cfg;
  chain.seed = cfg.seed;
  chain.burn_in_index = cfg.burn_in_index();
  chain.alpha.resize(M, p);
  chain.w.resize(M, p);
  chain.xi.resize(M, p);
  chain.sigma2.resize(M);
  chain.accepted.assign(static_cast<std::size_t>(p), 0);

  Rng rng(cfg.seed);
  // T(0) = 0 for the identity activation leaves w on its prior and traps alpha there.
  Vector alpha = Vector::Constant(p, cfg.prior.alpha0 + 1.0);
  const double scale = std::max(cfg.prior.activation(1.0), 1e-3);
  Vector w = least_squares(problem.D, problem.z) / scale;
  double sigma2 = cfg.sigma2.value;

  for (long it = 0; it < M; ++it) {
    try {
      w = sample_w_conditional(problem, alpha, cfg.prior, sigma2, rng);
      if (cfg.alpha_update == AlphaUpdate::metropolis) {
        MhStep step = mh_alpha_step(problem, alpha, w, cfg.prior, sigma2, cfg.rw_step, rng);
        alpha = std::move(step.alpha);
        for (std::size_t j = 0; j < step.accepted.size(); ++j) chain.accepted[j] += step.accepted[j] ? 1 : 0;
      } else {
        alpha = relu_exact_alpha_step(problem, alpha, w, cfg.prior, sigma2, rng);
        for (auto& a : chain.accepted) ++a;
      }
      ++chain.proposals;
      if (cfg.rescale_step > 0.0) {
        RescaleStep moved = rescale_step(alpha, w, cfg.prior, cfg.rescale_step, rng);
        alpha = std::move(moved.alpha);
        w = std::move(moved.w);
      }
      const Vector xi = coefficients_from(cfg.prior, alpha, w);
      if (cfg.sigma2.learn) {
        const double ssr = (problem.D * xi - problem.z).squaredNorm();
        sigma2 = sample_sigma2(ssr, static_cast<long>(problem.rows()), cfg.sigma2.a0, cfg.sigma2.b0, rng);
        if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw NumericError("sigma2 draw is not positive and finite");
      }
      chain.alpha.row(it) = alpha.transpose();
      chain.w.row(it) = w.transpose();
      chain.xi.row(it) = xi.transpose();
      chain.sigma2(it) = sigma2;
    } catch (const NumericError& e) {
      throw NumericError("iteration " + std::to_string(it) + ": " + e.what());
    }
  }
  return chain;
}

Chain run_chain(const Matrix& D, const Vector& z, const ChainConfig& cfg) {
  return run_chain(RegressionProblem(D, z), cfg);
}

}  // namespace bsindy
