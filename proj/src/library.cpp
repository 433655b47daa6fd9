#include "bsindy/library.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "bsindy/csv.hpp"
#include "bsindy/errors.hpp"

namespace bsindy {

std::string to_string(TermKind kind) {
  switch (kind) {
    case TermKind::constant: return "constant";
    case TermKind::monomial: return "monomial";
    case TermKind::cross: return "cross";
    case TermKind::sine: return "sine";
    case TermKind::sine_squared: return "sinesq";
    case TermKind::quartic_sine: return "quartic-sine";
    case TermKind::delay: return "delay";
    case TermKind::input_derivative: return "derivative";
  }
  return "unknown";
}

TermKind parse_term_kind(const std::string& name) {
  for (auto k : {TermKind::constant, TermKind::monomial, TermKind::cross, TermKind::sine, TermKind::sine_squared,
                 TermKind::quartic_sine, TermKind::delay, TermKind::input_derivative}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown basis term kind '" + name + "'");
}

BasisTerm BasisTerm::constant() { return {}; }

BasisTerm BasisTerm::monomial(std::vector<int> powers) {
  BasisTerm t;
  t.kind = TermKind::monomial;
  t.powers = std::move(powers);
  return t;
}

BasisTerm BasisTerm::cross(int i, int j) {
  BasisTerm t;
  t.kind = TermKind::cross;
  t.var = i;
  t.var2 = j;
  return t;
}

BasisTerm BasisTerm::sine(int i) {
  BasisTerm t;
  t.kind = TermKind::sine;
  t.var = i;
  return t;
}

BasisTerm BasisTerm::sine_squared(int i) {
  BasisTerm t;
  t.kind = TermKind::sine_squared;
  t.var = i;
  return t;
}

BasisTerm BasisTerm::quartic_sine(int power_var, int sine_var) {
  BasisTerm t;
  t.kind = TermKind::quartic_sine;
  t.var = sine_var;
  t.var2 = power_var;
  return t;
}

BasisTerm BasisTerm::delay(int i, double fraction) {
  BasisTerm t;
  t.kind = TermKind::delay;
  t.var = i;
  t.fraction = fraction;
  return t;
}

BasisTerm BasisTerm::input_derivative(int i, int window) {
  BasisTerm t;
  t.kind = TermKind::input_derivative;
  t.var = i;
  t.window = window;
  return t;
}

int BasisTerm::max_var() const {
  switch (kind) {
    case TermKind::constant: return -1;
    case TermKind::monomial: {
      int top = -1;
      for (std::size_t i = 0; i < powers.size(); ++i) {
        if (powers[i] != 0) top = static_cast<int>(i);
      }
      return top;
    }
    case TermKind::cross:
    case TermKind::quartic_sine: return std::max(var, var2);
    default: return var;
  }
}

std::string BasisSpec::variable_name(int i) const {
  if (i >= 0 && static_cast<std::size_t>(i) < var_names.size()) return var_names[static_cast<std::size_t>(i)];
  return "x" + std::to_string(i + 1);
}

std::string BasisSpec::label(std::size_t j) const {
  const BasisTerm& term = terms.at(j);
  if (!term.label.empty()) return term.label;
  switch (term.kind) {
    case TermKind::constant: return "1";
    case TermKind::monomial: {
      std::string out;
      for (std::size_t i = 0; i < term.powers.size(); ++i) {
        if (term.powers[i] == 0) continue;
        out += variable_name(static_cast<int>(i));
        if (term.powers[i] != 1) out += "^" + std::to_string(term.powers[i]);
      }
      return out.empty() ? "1" : out;
    }
    case TermKind::cross: return variable_name(term.var) + variable_name(term.var2);
    case TermKind::sine: return "sin(" + variable_name(term.var) + ")";
    case TermKind::sine_squared: return "sin(" + variable_name(term.var) + ")^2";
    case TermKind::quartic_sine: return variable_name(term.var2) + "^4sin(" + variable_name(term.var) + ")";
    case TermKind::delay: return variable_name(term.var) + "[-" + format_double(term.fraction) + "T]";
    case TermKind::input_derivative: return "d" + variable_name(term.var) + "/dt";
  }
  return "?";
}

std::vector<std::string> BasisSpec::labels() const {
  std::vector<std::string> out;
  out.reserve(terms.size());
  for (std::size_t j = 0; j < terms.size(); ++j) out.push_back(label(j));
  return out;
}

void BasisSpec::validate(int n) const {
  if (terms.empty()) throw ConfigError("basis has no terms");
  std::set<std::string> seen;
  for (std::size_t j = 0; j < terms.size(); ++j) {
    const BasisTerm& term = terms[j];
    const std::string name = label(j);
    for (int p : term.powers) {
      if (p < 0) throw ConfigError("term '" + name + "' has a negative degree");
    }
    if (term.kind != TermKind::monomial && term.kind != TermKind::constant) {
      const bool two_vars = term.kind == TermKind::cross || term.kind == TermKind::quartic_sine;
      if (term.var < 0 || (two_vars && term.var2 < 0)) {
        throw ConfigError("term '" + name + "' has a negative variable index");
      }
    }
    if (term.max_var() >= n) {
      throw ConfigError("term '" + name + "' references variable index " + std::to_string(term.max_var()) +
                        " but the state has " + std::to_string(n) + " components");
    }
    if (term.kind == TermKind::delay && !(term.fraction > 0.0 && term.fraction < 1.0)) {
      throw ConfigError("delay term '" + name + "' needs a fraction in (0,1)");
    }
    if (term.kind == TermKind::input_derivative && (term.window < 1 || term.window % 2 == 0)) {
      throw ConfigError("derivative term '" + name + "' needs an odd smoothing window >= 1");
    }
    if (!seen.insert(name).second) throw ConfigError("duplicate basis label '" + name + "'");
  }
}

BasisSpec pendulum_basis() {
  BasisSpec spec;
  spec.terms = {BasisTerm::monomial({1, 0}), BasisTerm::monomial({0, 1}), BasisTerm::monomial({1, 1}),
                BasisTerm::monomial({2, 0}), BasisTerm::monomial({0, 2})};
  return spec;
}

BasisSpec lorenz_basis() {
  BasisSpec spec;
  spec.terms = {BasisTerm::monomial({1, 0, 0}), BasisTerm::monomial({0, 1, 0}), BasisTerm::monomial({0, 0, 1}),
                BasisTerm::monomial({1, 1, 0}), BasisTerm::monomial({1, 0, 1}), BasisTerm::monomial({0, 1, 1})};
  return spec;
}

BasisSpec ishigami_basis() {
  BasisSpec spec;
  spec.var_names = {"p1", "p2", "p3"};
  spec.terms = {BasisTerm::monomial({1, 0, 0}), BasisTerm::monomial({0, 1, 0}), BasisTerm::monomial({0, 0, 1}),
                BasisTerm::monomial({2, 0, 0}), BasisTerm::monomial({1, 1, 0}), BasisTerm::monomial({1, 0, 1}),
                BasisTerm::monomial({0, 2, 0}), BasisTerm::monomial({0, 1, 1}), BasisTerm::monomial({0, 0, 2}),
                BasisTerm::sine(0),           BasisTerm::sine_squared(1),     BasisTerm::quartic_sine(2, 0)};
  return spec;
}

namespace {

double eval_local(const BasisTerm& term, const auto& x) {
  switch (term.kind) {
    case TermKind::constant: return 1.0;
    case TermKind::monomial: {
      double v = 1.0;
      for (std::size_t i = 0; i < term.powers.size(); ++i) {
        for (int k = 0; k < term.powers[i]; ++k) v *= x(static_cast<Eigen::Index>(i));
      }
      return v;
    }
    case TermKind::cross: return x(term.var) * x(term.var2);
    case TermKind::sine: return std::sin(x(term.var));
    case TermKind::sine_squared: {
      const double s = std::sin(x(term.var));
      return s * s;
    }
    case TermKind::quartic_sine: {
      const double q = x(term.var2) * x(term.var2);
      return q * q * std::sin(x(term.var));
    }
    default: break;
  }
  throw ConfigError("term kind '" + to_string(term.kind) + "' cannot be evaluated at a single state");
}

}  // namespace

Vector evaluate_terms(const BasisSpec& spec, const Vector& x) {
  Vector out(static_cast<Eigen::Index>(spec.size()));
  for (std::size_t j = 0; j < spec.size(); ++j) out(static_cast<Eigen::Index>(j)) = eval_local(spec.terms[j], x);
  return out;
}

DesignMatrix build_design(const Matrix& X, const BasisSpec& spec, const std::optional<Vector>& t,
                          std::optional<double> period) {
  const int n = static_cast<int>(X.cols());
  const Eigen::Index m = X.rows();
  spec.validate(n);
  if (m < 1) throw ConfigError("state matrix has no rows");

  bool needs_grid = false;
  std::vector<Eigen::Index> shifts(spec.size(), 0);
  for (const auto& term : spec.terms) needs_grid = needs_grid || !term.row_local();

  std::optional<double> dt;
  if (needs_grid) {
    if (!t) throw ConfigError("delay and derivative terms need the time grid");
    if (t->size() != m) throw ConfigError("time grid length does not match the state rows");
    dt = uniform_step(*t);
    if (!dt) throw ConfigError("delay and derivative terms need a uniform time grid");
  }

  Eigen::Index offset = 0;
  for (std::size_t j = 0; j < spec.size(); ++j) {
    const BasisTerm& term = spec.terms[j];
    if (term.kind != TermKind::delay) continue;
    if (!period) throw ConfigError("delay term '" + spec.label(j) + "' needs the period");
    if (!(*period > 0.0)) throw ConfigError("period must be positive");
    // std::lround rounds halves away from zero
    const auto k = static_cast<Eigen::Index>(std::lround(term.fraction * *period / *dt));
    if (k >= m) {
      throw ConfigError("delay of term '" + spec.label(j) + "' (" + std::to_string(k) + " samples) exceeds the record length");
    }
    shifts[j] = k;
    offset = std::max(offset, k);
  }

  DesignMatrix dm;
  dm.spec = spec;
  dm.row_offset = offset;
  const Eigen::Index rows = m - offset;
  dm.D.resize(rows, static_cast<Eigen::Index>(spec.size()));
  for (std::size_t j = 0; j < spec.size(); ++j) {
    const BasisTerm& term = spec.terms[j];
    auto col = dm.D.col(static_cast<Eigen::Index>(j));
    if (term.kind == TermKind::delay) {
      col = X.col(term.var).segment(offset - shifts[j], rows);
    } else if (term.kind == TermKind::input_derivative) {
      col = smoothed_gradient(X.col(term.var), term.window, *dt).tail(rows);
    } else {
      for (Eigen::Index r = 0; r < rows; ++r) col(r) = eval_local(term, X.row(r + offset));
    }
  }
  return dm;
}

NormalizedProblem normalize(const DesignMatrix& dm, const Vector& z) {
  const Eigen::Index m = dm.D.rows();
  if (z.size() != m) {
    throw ConfigError("target has " + std::to_string(z.size()) + " rows, design has " + std::to_string(m));
  }
  if (m < 2) throw ConfigError("normalization needs at least two rows");

  NormRecord rec;
  rec.original_cols = dm.D.cols();
  std::vector<double> means, stds;
  for (Eigen::Index j = 0; j < dm.D.cols(); ++j) {
    if (dm.spec.terms[static_cast<std::size_t>(j)].kind == TermKind::constant) {
      if (rec.constant) throw ConfigError("more than one constant column");
      rec.constant = j;
      continue;
    }
    const auto col = dm.D.col(j);
    const double mean = col.mean();
    const double sd = std::sqrt((col.array() - mean).square().sum() / static_cast<double>(m - 1));
    if (!(sd > 0.0)) {
      throw ConfigError("column '" + dm.spec.label(static_cast<std::size_t>(j)) +
                        "' has zero variance and cannot be normalized");
    }
    rec.kept.push_back(j);
    means.push_back(mean);
    stds.push_back(sd);
  }
  rec.mean = Eigen::Map<Vector>(means.data(), static_cast<Eigen::Index>(means.size()));
  rec.std = Eigen::Map<Vector>(stds.data(), static_cast<Eigen::Index>(stds.size()));
  rec.target_mean = z.mean();

  NormalizedProblem out;
  out.design.row_offset = dm.row_offset;
  out.design.D.resize(m, static_cast<Eigen::Index>(rec.kept.size()));
  for (std::size_t k = 0; k < rec.kept.size(); ++k) {
    const auto j = rec.kept[k];
    const auto kk = static_cast<Eigen::Index>(k);
    out.design.D.col(kk) = (dm.D.col(j).array() - rec.mean(kk)) / rec.std(kk);
    out.design.spec.terms.push_back(dm.spec.terms[static_cast<std::size_t>(j)]);
    out.design.spec.terms.back().label = dm.spec.label(static_cast<std::size_t>(j));
  }
  out.design.spec.var_names = dm.spec.var_names;
  out.z = z.array() - rec.target_mean;
  out.design.norm = rec;
  out.record = std::move(rec);
  return out;
}

Vector denormalize_coefficients(const Vector& xi_normalized, const NormRecord& record) {
  if (xi_normalized.size() != static_cast<Eigen::Index>(record.kept.size())) {
    throw ConfigError("coefficient vector has " + std::to_string(xi_normalized.size()) + " entries, record expects " +
                      std::to_string(record.kept.size()));
  }
  Vector out = Vector::Zero(record.original_cols);
  for (std::size_t k = 0; k < record.kept.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    out(record.kept[k]) = xi_normalized(kk) / record.std(kk);
  }
  if (record.constant) out(*record.constant) = intercept(out, record);
  return out;
}

double intercept(const Vector& xi_original, const NormRecord& record) {
  if (xi_original.size() != record.original_cols) throw ConfigError("coefficient length does not match the record");
  double c = record.target_mean;
  for (std::size_t k = 0; k < record.kept.size(); ++k) {
    c -= xi_original(record.kept[k]) * record.mean(static_cast<Eigen::Index>(k));
  }
  return c;
}

SystemDef make_system(const BasisSpec& spec, const Matrix& coefficients, std::string name) {
  if (coefficients.rows() != static_cast<Eigen::Index>(spec.size())) {
    throw ConfigError("coefficient matrix has " + std::to_string(coefficients.rows()) + " rows, basis has " +
                      std::to_string(spec.size()) + " terms");
  }
  for (std::size_t j = 0; j < spec.size(); ++j) {
    if (!spec.terms[j].row_local()) {
      throw ConfigError("term '" + spec.label(j) + "' cannot appear in an autonomous vector field");
    }
  }
  const int n = static_cast<int>(coefficients.cols());
  spec.validate(n);
  return {std::move(name), n, [spec, coefficients](const Vector& x) -> Vector {
            return coefficients.transpose() * evaluate_terms(spec, x);
          }};
}

}  // namespace bsindy
