#include <doctest.h>

#include <filesystem>

#include "bsindy/config.hpp"
#include "bsindy/csv.hpp"
#include "bsindy/errors.hpp"

using namespace bsindy;

namespace {

const std::string kMinimal = R"(name: tiny
system:
  preset: pendulum
  x0: [1, 0]
time:
  t_end: 4
  points: 50
fit:
  mode: stls
)";

std::string with_line(const std::string& base, const std::string& line) { return base + line + "\n"; }

}  // namespace

TEST_CASE("committed presets match the built-in presets") {
  const std::filesystem::path dir = std::filesystem::path(BSINDY_SOURCE_DIR) / "configs";
  for (const auto& name : preset_names()) {
    const auto path = dir / (name + ".cfg");
    REQUIRE(std::filesystem::exists(path));
    CHECK(load_config(path) == preset_config(name));
    CHECK(read_file(path) == serialize_config(preset_config(name)));
  }
  CHECK_THROWS_AS(preset_config("duffing"), ConfigError);
}

TEST_CASE("serialization round trips") {
  for (const auto& name : preset_names()) {
    const auto cfg = preset_config(name);
    const auto text = serialize_config(cfg);
    CHECK(parse_config(text) == cfg);
    CHECK(serialize_config(parse_config(text)) == text);
  }

  auto cfg = parse_config(kMinimal);
  cfg.basis = BasisSpec{{BasisTerm::constant(), BasisTerm::delay(0, 0.25), BasisTerm::input_derivative(1, 3),
                         BasisTerm::quartic_sine(1, 0), BasisTerm::cross(0, 1)},
                        {"q", "p"}};
  cfg.period = 2.0;
  cfg.normalize = true;
  cfg.fit = StlsSettings{0.05, 4};
  cfg.seed = 18446744073709551615ULL;
  CHECK(parse_config(serialize_config(cfg)) == cfg);

  auto bayes = preset_config("lorenz_relu");
  auto& b = std::get<BayesSettings>(bayes.fit);
  b.activation = Activation::horseshoe(0.3, 0.7, 0.01);
  b.tau_w = {TauWSetting::Kind::horseshoe_fraction, 0.2};
  b.alpha_update = AlphaUpdate::metropolis;
  b.alpha0.reset();
  b.sparsity = 0.3;
  b.zero_tol = 1e-4;
  CHECK(parse_config(serialize_config(bayes)) == bayes);
}

TEST_CASE("noise-variance prior settings round trip") {
  auto cfg = preset_config("ishigami_relu");
  auto& b = std::get<BayesSettings>(cfg.fit);
  b.sigma2 = {true, 0.01, 1.0, 1.0};  // initial sigma 0.1
  const auto back = parse_config(serialize_config(cfg));
  const auto& s = std::get<BayesSettings>(back.fit).sigma2;
  CHECK(s.learn);
  CHECK(s.value == 0.01);
  CHECK(s.a0 == 1.0);
  CHECK(s.b0 == 1.0);
}

TEST_CASE("defaults from a minimal file") {
  const auto cfg = parse_config(kMinimal);
  CHECK_FALSE(cfg.is_bayes());
  CHECK(std::get<StlsSettings>(cfg.fit).lambda == 0.1);
  CHECK(cfg.time.grid().size() == 50);
  CHECK(cfg.library() == pendulum_basis());
  CHECK(cfg.system.dim() == 2);
  CHECK(config_hash(cfg).size() == 16);
  CHECK(config_hash(cfg) == config_hash(parse_config(serialize_config(cfg))));
  auto other = cfg;
  other.seed = 5;
  CHECK(config_hash(other) != config_hash(cfg));
}

TEST_CASE("malformed files are rejected") {
  CHECK_THROWS_AS(parse_config(with_line(kMinimal, "colour: blue")), ConfigError);
  CHECK_THROWS_AS(parse_config("name: [unterminated"), ConfigError);
  CHECK_THROWS_AS(parse_config(with_line(kMinimal, "noise: loud")), ConfigError);
  CHECK_THROWS_AS(parse_config(with_line(kMinimal, "noise: -1")), ConfigError);
  CHECK_THROWS_AS(parse_config(with_line(kMinimal, "seed: -3")), ConfigError);
  CHECK_THROWS_AS(parse_config(with_line(kMinimal, "samples: 2.5")), ConfigError);
  CHECK_THROWS_AS(parse_config("system:\n  preset: pendulum\n  x0: [1, 0]\nfit:\n  mode: stls\n  stls:\n    lambda: 0.1\n    "
                               "speed: 3\n"),
                  ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/experiment.cfg"), IoError);
}

TEST_CASE("exactly one fit mode") {
  const std::string base = R"(system:
  preset: pendulum
  x0: [1, 0]
time:
  t_end: 4
  points: 50
)";
  CHECK_THROWS_AS(parse_config(base), ConfigError);
  CHECK_THROWS_AS(parse_config(base + "fit:\n  stls: {lambda: 0.1}\n  bayes: {iterations: 100}\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(base + "fit:\n  mode: stls\n  bayes: {iterations: 100}\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(base + "fit:\n  mode: ridge\n"), ConfigError);
  CHECK(parse_config(base + "fit:\n  bayes: {iterations: 100}\n").is_bayes());
}

TEST_CASE("semantic validation") {
  auto cfg = parse_config(kMinimal);
  auto expect_invalid = [](ExperimentConfig c) { CHECK_THROWS_AS(c.validate(), ConfigError); };

  auto c = cfg;
  c.time.dt = 0.1;  // both dt and points
  expect_invalid(c);
  c = cfg;
  c.system.x0 = {1, 0, 0};
  expect_invalid(c);
  c = cfg;
  c.derivative.window = 4;
  expect_invalid(c);
  c = cfg;
  c.fit = StlsSettings{0.1, 0};
  expect_invalid(c);

  BayesSettings b;
  b.sparsity = 0.3;  // alpha0 also set by default
  c = cfg;
  c.fit = b;
  expect_invalid(c);
  b.alpha0.reset();
  c.fit = b;
  CHECK_NOTHROW(c.validate());
  CHECK(b.resolved_alpha0() == doctest::Approx(normal_quantile(0.7)));

  b.activation = Activation::identity();
  b.alpha_update = AlphaUpdate::relu_exact;
  c.fit = b;
  expect_invalid(c);

  c = preset_config("lorenz_relu");
  c.normalize = true;
  expect_invalid(c);

  c = cfg;
  c.system.coefficients = {{1.0, 0.0}};
  expect_invalid(c);
}

TEST_CASE("custom systems") {
  const std::string text = R"(system:
  preset: custom
  x0: [1, 0]
  terms:
    terms:
      - {kind: monomial, powers: [1, 0]}
      - {kind: monomial, powers: [0, 1]}
  coefficients:
    - [0, -4]
    - [1, 0]
time:
  t_end: 1
  dt: 0.01
fit:
  mode: stls
)";
  const auto cfg = parse_config(text);
  CHECK(cfg.system.dim() == 2);
  Vector x(2);
  x << 2, 3;
  const Vector f = cfg.system.system()(x);
  CHECK(f(0) == 3.0);
  CHECK(f(1) == -8.0);
  CHECK(parse_config(serialize_config(cfg)) == cfg);
  CHECK_THROWS_AS(preset_config("ishigami_relu").system.system(), ConfigError);
}

TEST_CASE("basis text form") {
  const auto spec = ishigami_basis();
  CHECK(parse_basis(serialize_basis(spec)) == spec);
  CHECK_THROWS_AS(parse_basis("terms:\n  - {kind: spline}\n"), ConfigError);
}
