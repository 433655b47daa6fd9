#include <doctest.h>

#include <cmath>

#include "bsindy/dynamics.hpp"
#include "bsindy/errors.hpp"

using namespace bsindy;

namespace {

Trajectory ramp(const Vector& t, const Vector& values) {
  Trajectory tr;
  tr.t = t;
  tr.X = values;
  return tr;
}

SystemDef zero_field(int n) {
  return {"zero", n, [n](const Vector&) { return Vector::Zero(n).eval(); }};
}

}  // namespace

TEST_CASE("zero vector field keeps the state") {
  Vector x0(1);
  x0 << 3.0;
  Vector t(3);
  t << 0, 1, 2;
  const auto tr = integrate(zero_field(1), x0, t);
  CHECK(tr.X.rows() == 3);
  for (int i = 0; i < 3; ++i) CHECK(tr.X(i, 0) == 3.0);
}

TEST_CASE("pendulum follows the closed-form cosine") {
  Vector x0(2);
  x0 << 1.0, 0.0;
  const Vector t = linspace(0.0, 4.0, 50);
  const auto tr = integrate(pendulum(), x0, t);
  double err = 0.0;
  for (Eigen::Index i = 0; i < t.size(); ++i) err = std::max(err, std::abs(tr.X(i, 0) - std::cos(std::sqrt(9.81) * t(i))));
  CHECK(err <= 1e-6);
}

TEST_CASE("pendulum energy drift stays below 1e-4") {
  Vector x0(2);
  x0 << 1.0, 0.0;
  const Vector t = linspace(0.0, 4.0, 50);
  const auto tr = integrate(pendulum(), x0, t);
  auto energy = [](const Eigen::RowVectorXd& x) { return 9.81 * x(0) * x(0) + x(1) * x(1); };
  const double e0 = energy(tr.X.row(0));
  for (Eigen::Index i = 0; i < t.size(); ++i) CHECK(std::abs(energy(tr.X.row(i)) - e0) / e0 <= 1e-4);
}

TEST_CASE("lorenz trajectory on the standard grid is bounded") {
  Vector x0(3);
  x0 << -8, 8, 27;
  const Vector t = uniform_grid(0.0, 100.0, 0.1);
  CHECK(t.size() == 1001);
  const auto tr = integrate(lorenz(), x0, t);
  CHECK(tr.X.rows() == 1001);
  CHECK(tr.X.allFinite());
  CHECK(tr.X.cwiseAbs().maxCoeff() < 100.0);
  CHECK(tr.t(1000) == doctest::Approx(100.0));
}

TEST_CASE("integration is invariant to splitting the grid") {
  Vector x0(3);
  x0 << -8, 8, 27;
  const Vector t = uniform_grid(0.0, 2.0, 0.01);
  const auto full = integrate(lorenz(), x0, t);
  const Vector t1 = t.head(101);
  const Vector t2 = t.tail(101);
  const auto a = integrate(lorenz(), x0, t1);
  const Vector mid = a.X.row(100).transpose();
  const auto b = integrate(lorenz(), mid, t2);
  CHECK((b.X.row(100) - full.X.row(200)).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("blow-up raises a divergence error with the last valid time") {
  SystemDef quad{"quadratic", 1, [](const Vector& x) { return (x.array() * x.array()).matrix().eval(); }};
  Vector x0(1);
  x0 << 1.0;
  const Vector t = linspace(0.0, 2.0, 21);
  try {
    integrate(quad, x0, t);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    // exact pole at t = 1; fixed-step RK4 can land one step on either side
    CHECK(e.last_valid_time() >= 0.8);
    CHECK(e.last_valid_time() <= 1.2);
  }
}

TEST_CASE("integrate rejects bad inputs") {
  Vector x0(1);
  x0 << std::nan("");
  CHECK_THROWS_AS(integrate(zero_field(1), x0, linspace(0, 1, 3)), ConfigError);
  Vector ok(2);
  ok << 1, 0;
  CHECK_THROWS_AS(integrate(zero_field(1), ok, linspace(0, 1, 3)), ConfigError);
  Vector t(3);
  t << 0, 2, 1;
  CHECK_THROWS_AS(integrate(pendulum(), ok, t), ConfigError);
  SystemDef bad{"bad", 2, [](const Vector&) { return Vector::Zero(3).eval(); }};
  CHECK_THROWS_AS(integrate(bad, ok, linspace(0, 1, 3)), ConfigError);
}

TEST_CASE("forward Euler of a linear ramp") {
  Vector t(3), x(3);
  t << 0, 1, 2;
  x << 0, 2, 4;
  const auto d = forward_euler_derivative(ramp(t, x));
  REQUIRE(d.z.rows() == 2);
  CHECK(d.z(0, 0) == 2.0);
  CHECK(d.z(1, 0) == 2.0);
  CHECK(d.t(0) == 0.0);
  CHECK(d.t(1) == 1.0);
  CHECK(d.method == DerivativeMethod::forward_euler);
}

TEST_CASE("forward Euler of a constant trajectory is zero") {
  const Vector t = linspace(0, 1, 11);
  const auto d = forward_euler_derivative(ramp(t, Vector::Constant(11, 4.2)));
  CHECK(d.z.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forward Euler rejects a non-uniform grid") {
  Vector t(3), x(3);
  t << 0, 1, 2.5;
  x << 0, 1, 2;
  CHECK_THROWS_AS(forward_euler_derivative(ramp(t, x)), ConfigError);
}

TEST_CASE("forward Euler error on lorenz is first order in the step") {
  Vector x0(3);
  x0 << -8, 8, 27;
  auto max_error = [&](double dt) {
    const auto tr = integrate(lorenz(), x0, uniform_grid(0.0, 2.0, dt));
    const auto fe = forward_euler_derivative(tr);
    double err = 0.0;
    for (Eigen::Index i = 0; i < fe.z.rows(); ++i) {
      const Vector f = lorenz()(tr.X.row(i).transpose());
      err = std::max(err, (fe.z.row(i).transpose() - f).cwiseAbs().maxCoeff());
    }
    return err;
  };
  const double e1 = max_error(0.01), e2 = max_error(0.005);
  CHECK(e1 / e2 > 1.7);
  CHECK(e1 / e2 < 2.3);
}

TEST_CASE("cumulative sum of forward Euler differences telescopes back to the states") {
  Vector x0(2);
  x0 << 1.0, 0.0;
  const auto tr = integrate(pendulum(), x0, uniform_grid(0.0, 4.0, 0.05));
  const auto fe = forward_euler_derivative(tr);
  const double dt = tr.t(1) - tr.t(0);
  Eigen::RowVectorXd x = tr.X.row(0);
  for (Eigen::Index i = 0; i < fe.z.rows(); ++i) {
    x += dt * fe.z.row(i);
    CHECK((x - tr.X.row(i + 1)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("central differences are exact on quadratics over a non-uniform grid") {
  Vector t(6);
  t << 0.0, 0.1, 0.35, 0.4, 0.9, 1.3;
  const Vector x = (t.array() * t.array() * 3.0 - t.array() + 2.0).matrix();
  const auto d = central_derivative(ramp(t, x));
  REQUIRE(d.z.rows() == 6);
  for (Eigen::Index i = 0; i < 6; ++i) CHECK(d.z(i, 0) == doctest::Approx(6.0 * t(i) - 1.0).epsilon(1e-10));
}

TEST_CASE("analytic derivative evaluates the vector field") {
  Vector x0(3);
  x0 << -8, 8, 27;
  const auto tr = integrate(lorenz(), x0, uniform_grid(0.0, 1.0, 0.1));
  const auto d = analytic_derivative(lorenz(), tr);
  CHECK(d.z.rows() == tr.X.rows());
  CHECK(d.z(0, 0) == doctest::Approx(160.0));
  CHECK(d.z(0, 1) == doctest::Approx(28.0 * -8 - 8 - (-8) * 27));
}

TEST_CASE("gaussian noise") {
  const Matrix zeros = Matrix::Zero(100000, 1);
  SUBCASE("sigma zero leaves data unchanged") {
    Matrix data = Matrix::Random(5, 3);
    CHECK(add_gaussian_noise(data, 0.0, 1) == data);
  }
  SUBCASE("unit sigma has unit sample std") {
    const Matrix n = add_gaussian_noise(zeros, 1.0, 2024);
    const double mean = n.mean();
    const double sd = std::sqrt((n.array() - mean).square().sum() / (n.size() - 1));
    CHECK(sd >= 0.99);
    CHECK(sd <= 1.01);
  }
  SUBCASE("same seed reproduces, other seed differs") {
    const Matrix a = add_gaussian_noise(zeros, 1.0, 5), b = add_gaussian_noise(zeros, 1.0, 5);
    const Matrix c = add_gaussian_noise(zeros, 1.0, 6);
    CHECK(a == b);
    CHECK(a != c);
  }
  SUBCASE("negative sigma is rejected") { CHECK_THROWS_AS(add_gaussian_noise(zeros, -1.0, 1), ConfigError); }
}

TEST_CASE("smoothed gradient") {
  const Vector t = linspace(0.0, 10.0, 101);
  SUBCASE("affine series gives the exact slope for every window") {
    const Vector x = (2.5 * t.array() - 1.0).matrix();
    for (int w : {1, 3, 7, 21}) {
      const Vector g = smoothed_gradient(x, w, 0.1);
      for (Eigen::Index i = 0; i < g.size(); ++i) CHECK(g(i) == doctest::Approx(2.5).epsilon(1e-10));
    }
  }
  SUBCASE("sine with no smoothing tracks the cosine") {
    const Vector s = Vector::LinSpaced(1001, 0.0, 10.0);
    const Vector g = smoothed_gradient(s.array().sin().matrix(), 1, 0.01);
    CHECK((g.array() - s.array().cos()).abs().maxCoeff() <= 1e-3);
  }
  SUBCASE("constant series gives zeros") { CHECK(smoothed_gradient(Vector::Constant(20, 3.0), 5, 0.1).norm() == 0.0); }
  SUBCASE("even or oversize windows are rejected") {
    CHECK_THROWS_AS(smoothed_gradient(t, 4, 0.1), ConfigError);
    CHECK_THROWS_AS(smoothed_gradient(t, 0, 0.1), ConfigError);
    CHECK_THROWS_AS(smoothed_gradient(t, 103, 0.1), ConfigError);
  }
}

TEST_CASE("grids") {
  CHECK(uniform_grid(0.0, 1.0, 0.25).size() == 5);
  CHECK(uniform_step(linspace(0.0, 4.0, 50)).has_value());
  Vector t(3);
  t << 0, 1, 3;
  CHECK_FALSE(uniform_step(t).has_value());
  CHECK(parse_derivative_method("smoothed-central") == DerivativeMethod::smoothed_central);
  CHECK(to_string(DerivativeMethod::forward_euler) == "forward-euler");
  CHECK_THROWS_AS(parse_derivative_method("spline"), ConfigError);
}

TEST_CASE("trajectory validation") {
  Trajectory tr;
  tr.t = linspace(0, 1, 3);
  tr.X = Matrix::Zero(2, 1);
  CHECK_THROWS_AS(tr.validate(), ConfigError);
  tr.X = Matrix::Zero(3, 1);
  CHECK_NOTHROW(tr.validate());
  tr.X(1, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(tr.validate(), ConfigError);
}
