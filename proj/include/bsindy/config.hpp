#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bsindy/dynamics.hpp"
#include "bsindy/library.hpp"
#include "bsindy/mcmc.hpp"

namespace bsindy {

/// Data source. `pendulum` and `lorenz` integrate an ODE; `ishigami` draws
/// i.i.d. inputs on [-pi, pi]^3 and a scalar response; `custom` integrates
/// x' = Theta(x)^T C for the given term list and coefficient matrix.
struct SystemConfig {
  std::string preset = "lorenz";
  std::vector<double> params;  ///< preset parameters; empty means defaults
  std::vector<double> x0;
  BasisSpec terms;                          ///< custom only
  std::vector<std::vector<double>> coefficients;  ///< custom only, p rows x n columns

  int dim() const;
  SystemDef system() const;  ///< throws ConfigError for ishigami
  bool operator==(const SystemConfig&) const = default;
};

struct TimeConfig {
  double t0 = 0.0;
  double t_end = 1.0;
  std::optional<double> dt;
  std::optional<long> points;  ///< exactly one of dt / points

  Vector grid() const;
  bool operator==(const TimeConfig&) const = default;
};

struct DerivativeConfig {
  DerivativeMethod method = DerivativeMethod::forward_euler;
  int window = 5;  ///< smoothed-central only
  bool operator==(const DerivativeConfig&) const = default;
};

struct StlsSettings {
  double lambda = 0.1;
  int k_max = 10;
  bool operator==(const StlsSettings&) const = default;
};

/// How tau_w is chosen: the least-squares signal-to-noise rule, a fixed value,
/// or horseshoe calibration to a target nonzero fraction.
struct TauWSetting {
  enum class Kind { automatic, fixed, horseshoe_fraction };
  Kind kind = Kind::automatic;
  double value = 0.0;
  bool operator==(const TauWSetting&) const = default;
};

struct BayesSettings {
  Activation activation = Activation::relu();
  std::optional<double> alpha0 = 0.0;
  std::optional<double> sparsity;  ///< alpha0 = Phi^{-1}(1 - sparsity); exclusive with alpha0
  TauWSetting tau_w;
  long mc_draws = kDefaultMcDraws;
  long iterations = 10000;
  double burn_in = 0.2;
  double rw_step = 0.5;
  double rescale_step = 1.0;
  Sigma2Config sigma2;
  AlphaUpdate alpha_update = AlphaUpdate::metropolis;
  double level = 0.9;
  std::optional<double> zero_tol;

  double resolved_alpha0() const;
  bool operator==(const BayesSettings&) const = default;
};

struct PredictConfig {
  long draws = 100;
  double level = 0.9;
  bool operator==(const PredictConfig&) const = default;
};

struct ExperimentConfig {
  std::string name = "experiment";
  SystemConfig system;
  TimeConfig time;
  long samples = 5000;  ///< ishigami sample count
  double noise = 0.0;
  DerivativeConfig derivative;
  std::optional<BasisSpec> basis;  ///< empty means the preset library
  std::optional<double> period;    ///< reference period for delay terms
  bool normalize = false;
  std::variant<StlsSettings, BayesSettings> fit = StlsSettings{};
  PredictConfig predict;
  std::string output = "out";
  std::uint64_t seed = 0;

  bool is_bayes() const { return std::holds_alternative<BayesSettings>(fit); }
  BasisSpec library() const;
  void validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

/// Reads the YAML text form. Unknown keys are errors.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& cfg);
/// FNV-1a of the canonical text, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

/// Experiment presets: "pendulum_lasso", "lorenz_relu", "ishigami_relu".
ExperimentConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

/// Term descriptors shared with the chain sidecar files.
std::string serialize_basis(const BasisSpec& spec);
BasisSpec parse_basis(const std::string& text);

}  // namespace bsindy
