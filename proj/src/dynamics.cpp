#include "bsindy/dynamics.hpp"

#include <cmath>
#include <limits>

#include "bsindy/errors.hpp"
#include "bsindy/random.hpp"

namespace bsindy {

Vector SystemDef::operator()(const Vector& x) const {
  Vector dx = rhs(x);
  if (dx.size() != dim) {
    throw ConfigError("system '" + name + "' returned " + std::to_string(dx.size()) +
                      " components, expected " + std::to_string(dim));
  }
  return dx;
}

SystemDef pendulum(double g, double length) {
  const double k = g / length;
  return {"pendulum", 2, [k](const Vector& x) {
            Vector dx(2);
            dx << x(1), -k * x(0);
            return dx;
          }};
}

SystemDef lorenz(double c1, double c2, double c3) {
  return {"lorenz", 3, [=](const Vector& x) {
            Vector dx(3);
            dx << c1 * (x(1) - x(0)), x(0) * (c2 - x(2)) - x(1), x(0) * x(1) - c3 * x(2);
            return dx;
          }};
}

void Trajectory::validate() const {
  if (t.size() != X.rows()) {
    throw ConfigError("trajectory has " + std::to_string(t.size()) + " times but " +
                      std::to_string(X.rows()) + " state rows");
  }
  for (Eigen::Index i = 1; i < t.size(); ++i) {
    if (!(t(i) > t(i - 1))) throw ConfigError("time grid is not strictly increasing at index " + std::to_string(i));
  }
  if (!t.allFinite() || !X.allFinite()) throw ConfigError("trajectory contains non-finite entries");
}

Vector uniform_grid(double t0, double t_end, double dt) {
  if (!(dt > 0.0) || !(t_end > t0)) throw ConfigError("uniform_grid needs dt > 0 and t_end > t0");
  const auto intervals = static_cast<Eigen::Index>(std::floor((t_end - t0) / dt + 0.5));
  Vector t(intervals + 1);
  for (Eigen::Index i = 0; i <= intervals; ++i) t(i) = t0 + static_cast<double>(i) * dt;
  return t;
}

Vector linspace(double t0, double t_end, Eigen::Index m) {
  if (m < 2 || !(t_end > t0)) throw ConfigError("linspace needs m >= 2 and t_end > t0");
  return Vector::LinSpaced(m, t0, t_end);
}

std::optional<double> uniform_step(const Vector& t, double rel_tol) {
  if (t.size() < 2) return std::nullopt;
  const double dt = (t(t.size() - 1) - t(0)) / static_cast<double>(t.size() - 1);
  // increments carry rounding error proportional to |t|, not to dt
  const double tol = rel_tol * std::abs(dt) + 4.0 * std::numeric_limits<double>::epsilon() * t.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 1; i < t.size(); ++i) {
    if (std::abs((t(i) - t(i - 1)) - dt) > tol) return std::nullopt;
  }
  return dt;
}

namespace {

bool out_of_bounds(const Vector& x, double bound) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x(i)) || std::abs(x(i)) > bound) return true;
  }
  return false;
}

}  // namespace

Trajectory integrate(const SystemDef& sys, const Vector& x0, const Vector& t, const IntegratorOptions& options) {
  if (x0.size() != sys.dim) {
    throw ConfigError("initial state has " + std::to_string(x0.size()) + " components, system '" + sys.name +
                      "' has " + std::to_string(sys.dim));
  }
  if (!x0.allFinite()) throw ConfigError("initial state is not finite");
  if (t.size() < 1) throw ConfigError("empty time grid");
  for (Eigen::Index i = 1; i < t.size(); ++i) {
    if (!(t(i) > t(i - 1))) throw ConfigError("time grid is not strictly increasing at index " + std::to_string(i));
  }
  if (options.substeps < 1) throw ConfigError("substeps must be >= 1");

  Trajectory traj;
  traj.t = t;
  traj.X.resize(t.size(), sys.dim);
  traj.X.row(0) = x0.transpose();

  Vector x = x0;
  for (Eigen::Index i = 1; i < t.size(); ++i) {
    const double h = (t(i) - t(i - 1)) / options.substeps;
    for (int s = 0; s < options.substeps; ++s) {
      const Vector k1 = sys(x);
      const Vector k2 = sys(x + 0.5 * h * k1);
      const Vector k3 = sys(x + 0.5 * h * k2);
      const Vector k4 = sys(x + h * k3);
      Vector next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (out_of_bounds(next, options.divergence_bound)) {
        const double last = t(i - 1) + s * h;
        throw DivergenceError("integration of '" + sys.name + "' diverged after t = " + std::to_string(last), last);
      }
      x = std::move(next);
    }
    traj.X.row(i) = x.transpose();
  }
  return traj;
}

std::string to_string(DerivativeMethod method) {
  switch (method) {
    case DerivativeMethod::analytic: return "analytic";
    case DerivativeMethod::forward_euler: return "forward-euler";
    case DerivativeMethod::central: return "central";
    case DerivativeMethod::smoothed_central: return "smoothed-central";
  }
  return "unknown";
}

DerivativeMethod parse_derivative_method(const std::string& name) {
  if (name == "analytic") return DerivativeMethod::analytic;
  if (name == "forward-euler") return DerivativeMethod::forward_euler;
  if (name == "central") return DerivativeMethod::central;
  if (name == "smoothed-central") return DerivativeMethod::smoothed_central;
  throw ConfigError("unknown derivative method '" + name +
                    "' (expected analytic, forward-euler, central or smoothed-central)");
}

DerivativeData analytic_derivative(const SystemDef& sys, const Trajectory& traj) {
  if (traj.X.cols() != sys.dim) throw ConfigError("trajectory dimension does not match system '" + sys.name + "'");
  DerivativeData out;
  out.t = traj.t;
  out.method = DerivativeMethod::analytic;
  out.z.resize(traj.X.rows(), sys.dim);
  for (Eigen::Index i = 0; i < traj.X.rows(); ++i) out.z.row(i) = sys(traj.X.row(i).transpose()).transpose();
  return out;
}

DerivativeData forward_euler_derivative(const Trajectory& traj) {
  const Eigen::Index m = traj.X.rows();
  if (m < 2) throw ConfigError("forward Euler differences need at least 2 samples");
  const auto dt = uniform_step(traj.t);
  if (!dt) {
    throw ConfigError("forward Euler differences need a uniform time grid; use the central method for non-uniform grids");
  }
  DerivativeData out;
  out.method = DerivativeMethod::forward_euler;
  out.t = traj.t.head(m - 1);
  out.z = (traj.X.bottomRows(m - 1) - traj.X.topRows(m - 1)) / *dt;
  return out;
}

DerivativeData central_derivative(const Trajectory& traj) {
  const Eigen::Index m = traj.X.rows();
  if (m < 3) throw ConfigError("central differences need at least 3 samples");
  traj.validate();
  const Vector& t = traj.t;
  DerivativeData out;
  out.method = DerivativeMethod::central;
  out.t = t;
  out.z.resize(m, traj.X.cols());
  for (Eigen::Index c = 0; c < traj.X.cols(); ++c) {
    const auto x = traj.X.col(c);
    for (Eigen::Index i = 1; i + 1 < m; ++i) {
      // three-point Lagrange derivative at the middle node
      const double h0 = t(i) - t(i - 1);
      const double h1 = t(i + 1) - t(i);
      out.z(i, c) = (-h1 / (h0 * (h0 + h1))) * x(i - 1) + ((h1 - h0) / (h0 * h1)) * x(i) +
                    (h0 / (h1 * (h0 + h1))) * x(i + 1);
    }
    {
      const double h0 = t(1) - t(0);
      const double h1 = t(2) - t(1);
      out.z(0, c) = (-(2 * h0 + h1) / (h0 * (h0 + h1))) * x(0) + ((h0 + h1) / (h0 * h1)) * x(1) -
                    (h0 / (h1 * (h0 + h1))) * x(2);
    }
    {
      const double h0 = t(m - 2) - t(m - 3);
      const double h1 = t(m - 1) - t(m - 2);
      out.z(m - 1, c) = (h1 / (h0 * (h0 + h1))) * x(m - 3) - ((h0 + h1) / (h0 * h1)) * x(m - 2) +
                        ((2 * h1 + h0) / (h1 * (h0 + h1))) * x(m - 1);
    }
  }
  return out;
}

Vector smoothed_gradient(const Vector& series, int window, double dt) {
  const Eigen::Index n = series.size();
  if (window < 1 || window % 2 == 0) throw ConfigError("smoothing window must be odd and >= 1, got " + std::to_string(window));
  if (window > n) throw ConfigError("smoothing window " + std::to_string(window) + " exceeds series length " + std::to_string(n));
  if (n < 3) throw ConfigError("gradient needs at least 3 samples");
  if (!(dt > 0.0)) throw ConfigError("gradient needs dt > 0");

  Vector smooth(n);
  const Eigen::Index half = window / 2;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index r = std::min({half, i, n - 1 - i});
    smooth(i) = series.segment(i - r, 2 * r + 1).mean();
  }

  Vector grad(n);
  for (Eigen::Index i = 1; i + 1 < n; ++i) grad(i) = (smooth(i + 1) - smooth(i - 1)) / (2.0 * dt);
  grad(0) = (-3.0 * smooth(0) + 4.0 * smooth(1) - smooth(2)) / (2.0 * dt);
  grad(n - 1) = (3.0 * smooth(n - 1) - 4.0 * smooth(n - 2) + smooth(n - 3)) / (2.0 * dt);
  return grad;
}

DerivativeData smoothed_central_derivative(const Trajectory& traj, int window) {
  const auto dt = uniform_step(traj.t);
  if (!dt) throw ConfigError("smoothed-central differences need a uniform time grid");
  DerivativeData out;
  out.method = DerivativeMethod::smoothed_central;
  out.t = traj.t;
  out.z.resize(traj.X.rows(), traj.X.cols());
  for (Eigen::Index c = 0; c < traj.X.cols(); ++c) out.z.col(c) = smoothed_gradient(traj.X.col(c), window, *dt);
  return out;
}

Matrix add_gaussian_noise(const Matrix& data, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw ConfigError("noise amplitude must be >= 0");
  Matrix out = data;
  if (sigma == 0.0) return out;
  Rng rng(seed);
  // column-major so that each equation's noise is one contiguous stream
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    for (Eigen::Index r = 0; r < out.rows(); ++r) out(r, c) += sigma * rng.normal();
  }
  return out;
}

DerivativeData add_gaussian_noise(const DerivativeData& data, double sigma, std::uint64_t seed) {
  DerivativeData out = data;
  out.z = add_gaussian_noise(data.z, sigma, seed);
  out.sigma_eta = sigma;
  return out;
}

}  // namespace bsindy
