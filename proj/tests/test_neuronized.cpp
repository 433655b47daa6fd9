#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bsindy/cli.hpp"
#include "bsindy/config.hpp"
#include "bsindy/errors.hpp"
#include "bsindy/neuronized.hpp"
#include "bsindy/random.hpp"
#include "bsindy/sindy.hpp"

using namespace bsindy;

TEST_CASE("activation values") {
  CHECK(Activation::relu()(-1.0) == 0.0);
  CHECK(Activation::relu()(2.5) == 2.5);
  CHECK(Activation::identity()(0.3) == 0.3);
  CHECK(Activation::horseshoe_fig1()(0.0) == doctest::Approx(1.0833).epsilon(1e-4));
  CHECK(Activation::horseshoe_appendix()(0.0) == 1.0);
  const double x = -1.3;
  CHECK(Activation::horseshoe_fig1()(x) == doctest::Approx(std::exp(-0.37 * x * x + 0.89 * x + 0.08)));
}

TEST_CASE("activation names") {
  CHECK(Activation::from_name("lasso") == Activation::identity());
  CHECK(Activation::from_name("horseshoe") == Activation::horseshoe_fig1());
  CHECK(Activation::from_name("horseshoe-appendix").name() == "horseshoe-appendix");
  CHECK(Activation::horseshoe(0.1, 0.2, 0.3).name() == "horseshoe");
  CHECK_THROWS_AS(Activation::from_name("tanh"), ConfigError);
}

TEST_CASE("horseshoe activation is strictly increasing on [-5, 5]") {
  for (const auto& act : {Activation::horseshoe_fig1(), Activation::horseshoe_appendix()}) {
    double prev = act(-5.0);
    for (int i = 1; i < 10000; ++i) {
      const double v = act(-5.0 + 10.0 * i / 9999.0);
      REQUIRE(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("activation inverse") {
  for (const auto& act : {Activation::identity(), Activation::relu(), Activation::horseshoe_fig1()}) {
    for (double x : {0.2, 0.9, 1.7}) CHECK(act.inverse(act(x)) == doctest::Approx(x).epsilon(1e-10));
  }
  CHECK_THROWS_AS(Activation::relu().inverse(0.0), ConfigError);
}

TEST_CASE("relu prior sample has Phi(alpha0) exact zeros") {
  const long n = 100000;
  for (double alpha0 : {0.0, 0.5, -0.7}) {
    const Vector s = prior_sample({Activation::relu(), alpha0, 1.0}, 42, n);
    const double zeros = static_cast<double>((s.array() == 0.0).count()) / n;
    const double p = normal_cdf(alpha0);
    CHECK(std::abs(zeros - p) <= 3.0 * std::sqrt(p * (1 - p) / n));
    if (alpha0 == 0.0) CHECK(std::abs(zeros - 0.5) <= 0.01);
  }
}

TEST_CASE("saturated spike gives all zeros") {
  const Vector s = prior_sample({Activation::relu(), 10.0, 1.0}, 1, 100000);
  CHECK(s.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lasso prior is symmetric and heavy peaked") {
  const Vector s = prior_sample({Activation::identity(), 0.0, 0.1}, 9, 100000);
  const double mean = s.mean();
  const double m2 = (s.array() - mean).square().mean();
  const double m4 = (s.array() - mean).pow(4).mean();
  CHECK(std::abs(mean) < 0.002);
  CHECK(m4 / (m2 * m2) > 3.0);
  const long positive = (s.array() > 0).count();
  CHECK(std::abs(positive - 50000) < 3 * std::sqrt(25000.0));
}

TEST_CASE("prior samples scale with tau_w under a shared seed") {
  for (const auto& act : {Activation::identity(), Activation::relu(), Activation::horseshoe_fig1()}) {
    Vector a = prior_sample({act, 0.3, 1.0}, 5, 2000);
    Vector b = prior_sample({act, 0.3, 2.5}, 5, 2000);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK((b - 2.5 * a).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + b.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("signal-to-noise tau_w") {
  Vector xi(4);
  xi << 1, -1, 1, 1;
  CHECK(select_tau_w(xi, 4, Activation::identity()) == doctest::Approx(1.0).epsilon(0.02));
  Vector one(1);
  one << 1.0;
  CHECK(select_tau_w(one, 1, Activation::relu()) == doctest::Approx(std::sqrt(2.0)).epsilon(0.02));
  Vector flipped = xi;
  flipped(0) = -1;
  flipped(2) = -1;
  CHECK(select_tau_w(flipped, 4, Activation::relu()) == select_tau_w(xi, 4, Activation::relu()));
  CHECK_THROWS_AS(select_tau_w(Vector::Zero(3), 3, Activation::relu()), ConfigError);
  CHECK_THROWS_AS(select_tau_w(xi, 4, Activation::relu(), 100), ConfigError);
  CHECK(activation_second_moment(Activation::relu(), 0.0, 100000, 1) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("lorenz slab scales from the least-squares reference") {
  const auto data = simulate_dataset(preset_config("lorenz_relu"));
  const Matrix D = build_design(data.X, lorenz_basis()).D;
  const double expected[] = {12.462, 24.791, 2.518};
  for (int k = 0; k < 3; ++k) {
    const double tau = select_tau_w(least_squares(D, data.Z.col(k)), 6, Activation::relu(), kDefaultMcDraws,
                                    kHyperparameterSeed, 0.5);
    CHECK(tau == doctest::Approx(expected[k]).epsilon(0.05));
  }
}

TEST_CASE("alpha0 from the expected nonzero fraction") {
  CHECK(alpha0_from_sparsity(0.5) == doctest::Approx(0.0).scale(1.0));
  CHECK(alpha0_from_sparsity(1.0 - normal_cdf(0.5)) == doctest::Approx(0.5));
  CHECK(alpha0_from_sparsity(0.9) == doctest::Approx(-1.2816).epsilon(1e-4));
  CHECK_THROWS_AS(alpha0_from_sparsity(0.0), ConfigError);
  CHECK_THROWS_AS(alpha0_from_sparsity(1.0), ConfigError);
}

TEST_CASE("horseshoe calibration") {
  const auto act = Activation::horseshoe_fig1();
  Rng rng(kHyperparameterSeed);
  Vector alpha(100000);
  for (auto& a : alpha) a = rng.normal();
  const double tau = tau_w_horseshoe_calibration(0.2, act);
  CHECK(std::abs(horseshoe_nonzero_fraction(act, tau, alpha) - 0.2) <= 1e-3);

  double prev = 0.0;
  for (double target : {0.05, 0.2, 0.5, 0.8, 0.95}) {
    const double t = tau_w_horseshoe_calibration(target, act, 20000, 3);
    CHECK(t > prev);
    prev = t;
  }
  CHECK(horseshoe_nonzero_fraction(act, 1e-8, alpha) < 1e-6);
  CHECK(horseshoe_nonzero_fraction(act, 1e8, alpha) > 1 - 1e-6);
  CHECK_THROWS_AS(tau_w_horseshoe_calibration(1.5, act), ConfigError);
}

TEST_CASE("normal quantile inverts the cdf") {
  for (double p : {1e-6, 0.025, 0.3, 0.5, 0.975}) CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-10));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-6));
}

TEST_CASE("prior config validation") {
  CHECK_THROWS_AS((PriorConfig{Activation::relu(), 0.0, 0.0}).validate(), ConfigError);
  CHECK_THROWS_AS((PriorConfig{Activation::relu(), std::nan(""), 1.0}).validate(), ConfigError);
  CHECK_THROWS_AS(prior_sample({}, 1, 0), ConfigError);
}
