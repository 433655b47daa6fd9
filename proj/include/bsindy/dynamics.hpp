#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace bsindy {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Autonomous vector field x' = f(x).
struct SystemDef {
  std::string name;
  int dim = 0;
  std::function<Vector(const Vector&)> rhs;

  /// Evaluates f and checks the output dimension.
  Vector operator()(const Vector& x) const;
};

/// Linear pendulum x1' = x2, x2' = -(g/L) x1.
SystemDef pendulum(double g = 9.81, double length = 1.0);
/// Lorenz system with the three classical coefficients.
SystemDef lorenz(double c1 = 10.0, double c2 = 28.0, double c3 = 2.667);

/// Time grid with states stored row-wise (m x n).
struct Trajectory {
  Vector t;
  Matrix X;
  std::optional<std::uint64_t> seed;

  /// Throws ConfigError unless t is strictly increasing, rows match and entries are finite.
  void validate() const;
};

/// t0, t0 + dt, ... up to and including t_end (within half a step).
Vector uniform_grid(double t0, double t_end, double dt);
/// m equally spaced points on [t0, t_end].
Vector linspace(double t0, double t_end, Eigen::Index m);
/// Returns the common step if the grid is uniform to `rel_tol`, otherwise nullopt.
std::optional<double> uniform_step(const Vector& t, double rel_tol = 1e-12);

struct IntegratorOptions {
  int substeps = 10;                 ///< RK4 steps per output interval
  double divergence_bound = 1e12;    ///< abort when any |x_i| exceeds this
};

/// Classical fixed-step RK4, reporting states at exactly the requested grid.
/// Throws DivergenceError carrying the last time at which the state was valid.
Trajectory integrate(const SystemDef& sys, const Vector& x0, const Vector& t,
                     const IntegratorOptions& options = {});

enum class DerivativeMethod { analytic, forward_euler, central, smoothed_central };

std::string to_string(DerivativeMethod method);
DerivativeMethod parse_derivative_method(const std::string& name);

/// Regression targets, one column per state equation.
struct DerivativeData {
  Vector t;  ///< time of each row (left endpoints for forward Euler)
  Matrix z;
  DerivativeMethod method = DerivativeMethod::analytic;
  double sigma_eta = 0.0;
};

/// z_j = f(x(t_j)).
DerivativeData analytic_derivative(const SystemDef& sys, const Trajectory& traj);
/// z_{l-1} = (x_l - x_{l-1}) / dt on a uniform grid; m - 1 rows.
DerivativeData forward_euler_derivative(const Trajectory& traj);
/// Second-order central differences on a possibly non-uniform grid; m rows.
DerivativeData central_derivative(const Trajectory& traj);
/// Moving-average smoothing followed by central differences, per column.
DerivativeData smoothed_central_derivative(const Trajectory& traj, int window);

/// Moving average over an odd `window` (truncated symmetrically at the ends), then
/// second-order differences: central inside, three-point one-sided at the boundaries.
Vector smoothed_gradient(const Vector& series, int window, double dt);

/// Adds i.i.d. N(0, sigma^2) noise element-wise.
Matrix add_gaussian_noise(const Matrix& data, double sigma, std::uint64_t seed);
DerivativeData add_gaussian_noise(const DerivativeData& data, double sigma, std::uint64_t seed);

}  // namespace bsindy
