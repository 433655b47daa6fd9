#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bsindy/dynamics.hpp"

namespace bsindy {

enum class TermKind {
  constant,
  monomial,          ///< prod_i x_i^{powers[i]}
  cross,             ///< x_var * x_var2
  sine,              ///< sin(x_var)
  sine_squared,      ///< sin(x_var)^2
  quartic_sine,      ///< x_var2^4 * sin(x_var)
  delay,             ///< x_var shifted back by fraction * period
  input_derivative,  ///< d x_var / dt after smoothing over `window` samples
};

std::string to_string(TermKind kind);
TermKind parse_term_kind(const std::string& name);

/// One library column. Only the fields relevant to `kind` are meaningful.
struct BasisTerm {
  TermKind kind = TermKind::constant;
  std::vector<int> powers;
  int var = 0;
  int var2 = 0;
  double fraction = 0.0;
  int window = 1;
  std::string label;  ///< empty means "render from the term"

  static BasisTerm constant();
  static BasisTerm monomial(std::vector<int> powers);
  static BasisTerm cross(int i, int j);
  static BasisTerm sine(int i);
  static BasisTerm sine_squared(int i);
  static BasisTerm quartic_sine(int power_var, int sine_var);
  static BasisTerm delay(int i, double fraction);
  static BasisTerm input_derivative(int i, int window = 1);

  /// True when the column at row r depends only on X(r, :).
  bool row_local() const { return kind != TermKind::delay && kind != TermKind::input_derivative; }
  /// Largest state index referenced, -1 for the constant.
  int max_var() const;

  bool operator==(const BasisTerm&) const = default;
};

/// Ordered list of library terms plus optional variable names (default x1..xn).
struct BasisSpec {
  std::vector<BasisTerm> terms;
  std::vector<std::string> var_names;

  std::size_t size() const { return terms.size(); }
  std::string variable_name(int i) const;
  std::string label(std::size_t j) const;
  std::vector<std::string> labels() const;
  /// Checks indices against the state dimension and label uniqueness.
  void validate(int n) const;

  bool operator==(const BasisSpec&) const = default;
};

/// [x1, x2, x1 x2, x1^2, x2^2] for the pendulum.
BasisSpec pendulum_basis();
/// [x1, x2, x3, x1x2, x1x3, x2x3] for the Lorenz system.
BasisSpec lorenz_basis();
/// Twelve-term library over (p1, p2, p3) for the Ishigami regression benchmark.
BasisSpec ishigami_basis();

/// Per-column statistics needed to undo normalize().
struct NormRecord {
  Eigen::Index original_cols = 0;
  std::vector<Eigen::Index> kept;        ///< original index of each normalized column
  std::optional<Eigen::Index> constant;  ///< original index of a dropped constant column
  Vector mean;                           ///< per kept column
  Vector std;                            ///< per kept column, sample (m-1) convention
  double target_mean = 0.0;
};

struct DesignMatrix {
  Matrix D;
  BasisSpec spec;                 ///< terms describing the columns of D
  std::optional<NormRecord> norm;
  Eigen::Index row_offset = 0;    ///< rows of X dropped from the front (delay history)
};

/// Evaluates every (row-local) term at one state.
Vector evaluate_terms(const BasisSpec& spec, const Vector& x);

/// Evaluates the library row-wise. Delay and derivative terms need a uniform `t`;
/// delay terms also need `period`. Rows without enough delay history are dropped
/// and reported through `row_offset`.
DesignMatrix build_design(const Matrix& X, const BasisSpec& spec, const std::optional<Vector>& t = std::nullopt,
                          std::optional<double> period = std::nullopt);

struct NormalizedProblem {
  DesignMatrix design;
  Vector z;
  NormRecord record;
};

/// De-means z and every column, divides columns by their sample standard deviation.
/// A constant term is dropped (it is identically zero after de-meaning).
NormalizedProblem normalize(const DesignMatrix& dm, const Vector& z);

/// Maps coefficients of the normalized problem back to the original columns.
/// The entry of a dropped constant column receives the reconstructed intercept.
Vector denormalize_coefficients(const Vector& xi_normalized, const NormRecord& record);

/// Intercept implied by the de-meaning: mean(z) - sum_j xi_j * mean_j over kept columns.
double intercept(const Vector& xi_original, const NormRecord& record);

/// Builds x' = Theta(x)^T C, where column k of `coefficients` (p x n) is equation k.
SystemDef make_system(const BasisSpec& spec, const Matrix& coefficients, std::string name = "identified");

}  // namespace bsindy
