#include "bsindy/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bsindy/errors.hpp"

namespace bsindy {

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

Moments moments(std::span<const double> x) {
  Moments m;
  const double n = static_cast<double>(x.size());
  m.mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - m.mean) * (v - m.mean);
  m.var = x.size() > 1 ? ss / (n - 1.0) : 0.0;
  return m;
}

std::vector<double> column(const Matrix& M, Eigen::Index j) {
  std::vector<double> out(static_cast<std::size_t>(M.rows()));
  for (Eigen::Index i = 0; i < M.rows(); ++i) out[static_cast<std::size_t>(i)] = M(i, j);
  return out;
}

}  // namespace

double geweke_score(std::span<const double> samples, double frac_a, double frac_b) {
  const auto M = samples.size();
  if (M < 20) throw ConfigError("Geweke score needs at least 20 samples, got " + std::to_string(M));
  if (!(frac_a > 0.0 && frac_b > 0.0 && frac_a + frac_b <= 1.0)) {
    throw ConfigError("Geweke fractions must be positive with frac_a + frac_b <= 1");
  }
  const auto n_a = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(frac_a * static_cast<double>(M))));
  const auto n_b = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(frac_b * static_cast<double>(M))));
  const Moments a = moments(samples.first(n_a));
  const Moments b = moments(samples.last(n_b));
  const double denom = a.var / static_cast<double>(n_a) + b.var / static_cast<double>(n_b);
  if (!(denom > 0.0)) throw NumericError("Geweke score undefined: both segments have zero variance");
  return (a.mean - b.mean) / std::sqrt(denom);
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ConfigError("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("quantile level must lie in [0,1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

Vector inclusion_probabilities(const Chain& chain, double zero_tol) {
  const Matrix post = chain.xi_post();
  if (post.rows() == 0) throw ConfigError("chain has no post-burn-in samples");
  Vector out(post.cols());
  for (Eigen::Index j = 0; j < post.cols(); ++j) {
    out(j) = static_cast<double>((post.col(j).array().abs() > zero_tol).count()) / static_cast<double>(post.rows());
  }
  return out;
}

double default_zero_tolerance(const Chain& chain) {
  if (chain.config.prior.activation.kind == Activation::Kind::relu) return 0.0;
  const Matrix post = chain.xi_post();
  if (post.rows() == 0) return 0.0;
  return 1e-3 * post.colwise().mean().cwiseAbs().maxCoeff();
}

Vector FitReport::median_model_means() const {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(coefficients.size()));
  for (auto j : median_model) out(j) = coefficients[static_cast<std::size_t>(j)].mean;
  return out;
}

bool FitReport::geweke_all_below(double bound) const {
  for (const auto& c : coefficients) {
    if (c.geweke && !(std::abs(*c.geweke) < bound)) return false;
  }
  return true;
}

bool FitReport::geweke_retained_below(double bound) const {
  for (auto j : median_model) {
    const auto& z = coefficients[static_cast<std::size_t>(j)].geweke;
    if (z && !(std::abs(*z) < bound)) return false;
  }
  return true;
}

FitReport summarize(const Chain& chain, double level, std::optional<double> zero_tol) {
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("credible level must lie in (0,1)");
  const Matrix post = chain.xi_post();
  if (post.rows() == 0) throw ConfigError("chain has no post-burn-in samples");

  FitReport rep;
  rep.level = level;
  rep.zero_tol = zero_tol.value_or(default_zero_tolerance(chain));
  rep.post_burn_in = static_cast<long>(post.rows());
  rep.config = chain.config;
  const Vector incl = inclusion_probabilities(chain, rep.zero_tol);
  const double tail = 0.5 * (1.0 - level);
  for (Eigen::Index j = 0; j < post.cols(); ++j) {
    const std::vector<double> col = column(post, j);
    const Moments mo = moments(col);
    CoefficientSummary s;
    s.mean = mo.mean;
    s.std = std::sqrt(mo.var);
    s.lower = quantile(col, tail);
    s.upper = quantile(col, 1.0 - tail);
    s.inclusion = incl(j);
    if (col.size() >= 20) {
      try {
        s.geweke = geweke_score(col);
      } catch (const NumericError&) {
        s.geweke.reset();
      }
    }
    rep.coefficients.push_back(s);
    if (s.inclusion > 0.5) rep.median_model.push_back(j);
  }
  return rep;
}

PredictiveEnsemble band_from_trajectories(Vector t, std::vector<Matrix> trajectories, double level, long diverged) {
  if (trajectories.empty()) throw NumericError("every predictive trajectory diverged");
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("band level must lie in (0,1)");
  PredictiveEnsemble ens;
  ens.t = std::move(t);
  ens.level = level;
  ens.diverged = diverged;
  const Eigen::Index m = trajectories.front().rows();
  const Eigen::Index n = trajectories.front().cols();
  ens.mean = Matrix::Zero(m, n);
  ens.lower.resize(m, n);
  ens.upper.resize(m, n);
  for (const auto& tr : trajectories) ens.mean += tr;
  ens.mean /= static_cast<double>(trajectories.size());
  const double tail = 0.5 * (1.0 - level);
  std::vector<double> vals(trajectories.size());
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index c = 0; c < n; ++c) {
      for (std::size_t k = 0; k < trajectories.size(); ++k) vals[k] = trajectories[k](i, c);
      ens.lower(i, c) = quantile(vals, tail);
      ens.upper(i, c) = quantile(vals, 1.0 - tail);
    }
  }
  ens.trajectories = std::move(trajectories);
  return ens;
}

PredictiveEnsemble posterior_predictive(const std::vector<Matrix>& coefficient_draws, const BasisSpec& spec,
                                        const Vector& x0, const Vector& t, double level,
                                        const IntegratorOptions& options) {
  std::vector<Matrix> kept;
  long diverged = 0;
  for (const auto& coef : coefficient_draws) {
    const SystemDef sys = make_system(spec, coef, "posterior-draw");
    try {
      kept.push_back(integrate(sys, x0, t, options).X);
    } catch (const DivergenceError&) {
      ++diverged;
    }
  }
  return band_from_trajectories(t, std::move(kept), level, diverged);
}

PredictiveEnsemble posterior_predictive(const std::vector<const Chain*>& chains, const BasisSpec& spec,
                                        const Vector& x0, const Vector& t, long n_draws, double level,
                                        std::uint64_t seed, const IntegratorOptions& options) {
  if (chains.empty()) throw ConfigError("posterior_predictive needs one chain per equation");
  if (n_draws < 1) throw ConfigError("n_draws must be >= 1");
  if (x0.size() != static_cast<Eigen::Index>(chains.size())) {
    throw ConfigError("initial state has " + std::to_string(x0.size()) + " components but " +
                      std::to_string(chains.size()) + " equation chains were given");
  }
  long available = -1;
  for (const Chain* c : chains) {
    if (c->coefficients() != static_cast<long>(spec.size())) {
      throw ConfigError("chain coefficient layout does not match the basis (" + std::to_string(c->coefficients()) +
                        " vs " + std::to_string(spec.size()) + ")");
    }
    const long post = c->size() - std::min(c->burn_in_index, c->size());
    available = available < 0 ? post : std::min(available, post);
  }
  if (available < 1) throw ConfigError("chains have no post-burn-in samples");

  Rng rng(seed);
  std::vector<long> picks;
  if (n_draws <= available) {
    std::vector<long> pool(static_cast<std::size_t>(available));
    std::iota(pool.begin(), pool.end(), 0L);
    for (long k = 0; k < n_draws; ++k) {
      const auto r = static_cast<long>(rng.uniform_index(static_cast<std::uint64_t>(available - k)));
      std::swap(pool[static_cast<std::size_t>(k)], pool[static_cast<std::size_t>(k + r)]);
      picks.push_back(pool[static_cast<std::size_t>(k)]);
    }
  } else {
    for (long k = 0; k < n_draws; ++k) picks.push_back(static_cast<long>(rng.uniform_index(static_cast<std::uint64_t>(available))));
  }

  std::vector<Matrix> draws;
  draws.reserve(picks.size());
  for (long k : picks) {
    Matrix coef(static_cast<Eigen::Index>(spec.size()), static_cast<Eigen::Index>(chains.size()));
    for (std::size_t e = 0; e < chains.size(); ++e) {
      const Chain& c = *chains[e];
      const long row = std::min(c.burn_in_index, c.size()) + k;
      coef.col(static_cast<Eigen::Index>(e)) = c.xi.row(row).transpose();
    }
    draws.push_back(std::move(coef));
  }
  return posterior_predictive(draws, spec, x0, t, level, options);
}

Autocorrelation windowed_autocorrelation(const Vector& series, Eigen::Index window_len, Eigen::Index n_windows) {
  if (window_len < 1 || n_windows < 1) throw ConfigError("window length and count must be >= 1");
  if (series.size() < window_len * n_windows) {
    throw ConfigError("series of length " + std::to_string(series.size()) + " is too short for " +
                      std::to_string(n_windows) + " windows of " + std::to_string(window_len) + " samples");
  }
  Autocorrelation out;
  out.per_window.resize(n_windows, window_len);
  for (Eigen::Index k = 0; k < n_windows; ++k) {
    const auto x = series.segment(k * window_len, window_len);
    for (Eigen::Index lag = 0; lag < window_len; ++lag) {
      const Eigen::Index pairs = window_len - lag;
      out.per_window(k, lag) = x.head(pairs).dot(x.tail(pairs)) / static_cast<double>(pairs);
    }
  }
  out.mean = out.per_window.colwise().mean().transpose();
  out.spread.resize(window_len);
  for (Eigen::Index lag = 0; lag < window_len; ++lag) {
    const auto col = out.per_window.col(lag).array();
    const double var = n_windows > 1 ? (col - out.mean(lag)).square().sum() / static_cast<double>(n_windows - 1) : 0.0;
    out.spread(lag) = std::sqrt(var);
  }
  return out;
}

std::vector<long> histogram(std::span<const double> values, double lo, double hi, int bins) {
  if (bins < 1) throw ConfigError("histogram needs at least one bin");
  std::vector<long> counts(static_cast<std::size_t>(bins), 0);
  if (!(hi > lo)) {
    counts[0] = static_cast<long>(values.size());
    return counts;
  }
  for (double v : values) {
    if (v < lo || v > hi) continue;
    auto b = static_cast<int>(std::floor((v - lo) / (hi - lo) * bins));
    counts[static_cast<std::size_t>(std::clamp(b, 0, bins - 1))]++;
  }
  return counts;
}

double batch_means_se(std::span<const double> values, int batches) {
  if (batches < 2) throw ConfigError("batch means need at least two batches");
  const auto size = values.size() / static_cast<std::size_t>(batches);
  if (size < 1) throw ConfigError("too few samples for batch means");
  std::vector<double> means;
  for (int b = 0; b < batches; ++b) {
    const auto seg = values.subspan(static_cast<std::size_t>(b) * size, size);
    means.push_back(std::accumulate(seg.begin(), seg.end(), 0.0) / static_cast<double>(size));
  }
  const Moments m = moments(means);
  return std::sqrt(m.var / static_cast<double>(batches));
}

}  // namespace bsindy
