#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bsindy/config.hpp"
#include "bsindy/diagnostics.hpp"
#include "bsindy/sindy.hpp"

namespace bsindy {

inline constexpr const char* kToolVersion = "0.1.0";

/// States (clean) and regression targets (noisy) on their own time grids.
/// For the Ishigami benchmark the "time" column is the sample index.
struct Dataset {
  Vector t;
  Matrix X;
  std::vector<std::string> state_names;
  Vector tz;
  Matrix Z;
  std::vector<std::string> target_names;
};

/// Sub-seeds used by the pipeline, all derived from the top-level seed.
struct SeedPlan {
  std::uint64_t root = 0;
  std::uint64_t noise() const;
  std::uint64_t inputs() const;
  std::uint64_t tau_w(int equation) const;
  std::uint64_t chain(int equation) const;
  std::uint64_t predict() const;
};

Dataset simulate_dataset(const ExperimentConfig& cfg);
void save_dataset(const std::filesystem::path& dir, const Dataset& data);
Dataset load_dataset(const std::filesystem::path& dir);

struct EquationFit {
  int index = 0;  ///< 0-based column of the target matrix
  std::string name;
  std::optional<StlsResult> stls;
  std::optional<Chain> chain;
  std::optional<FitReport> report;
  double tau_w = 0.0;
  double alpha0 = 0.0;
};

struct FitOutcome {
  BasisSpec basis;
  Matrix D;  ///< design rows aligned with the targets (before any normalization)
  std::vector<EquationFit> equations;
};

/// Builds the design, aligns it with the target rows and fits the selected
/// equations (0-based; empty means all), `jobs` at a time.
FitOutcome fit_dataset(const ExperimentConfig& cfg, const Dataset& data, const std::vector<int>& equations = {},
                       int jobs = 1);

/// Posterior-predictive ensemble from one chain per state equation.
PredictiveEnsemble predict_from_chains(const ExperimentConfig& cfg, const BasisSpec& basis,
                                       const std::vector<const Chain*>& chains, const Vector& x0, const Vector& t,
                                       long draws, double level);

/// Command-line entry point. Returns 0 on success, 2 for configuration errors,
/// 3 for numerical failures and 4 for I/O errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bsindy
