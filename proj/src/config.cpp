#include "bsindy/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdio>
#include <set>

#include "bsindy/csv.hpp"
#include "bsindy/errors.hpp"
#include "bsindy/random.hpp"

namespace bsindy {

namespace {

const std::set<std::string> kPresets = {"pendulum", "lorenz", "ishigami", "custom"};

[[noreturn]] void fail(const std::string& what) { throw ConfigError("config: " + what); }

void check_keys(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
  if (!node.IsMap()) fail(where + " must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail("unknown key '" + key + "' in " + (where.empty() ? "top level" : where));
  }
}

double get_double(const YAML::Node& node, const std::string& where) {
  if (!node.IsScalar()) fail(where + " must be a number");
  try {
    return parse_double(node.Scalar());
  } catch (const std::exception&) {
    fail(where + ": '" + node.Scalar() + "' is not a number");
  }
}

long get_long(const YAML::Node& node, const std::string& where) {
  const double v = get_double(node, where);
  if (v != std::floor(v) || std::abs(v) > 9e15) fail(where + " must be an integer");
  return static_cast<long>(v);
}

std::string get_string(const YAML::Node& node, const std::string& where) {
  if (!node.IsScalar()) fail(where + " must be a string");
  return node.Scalar();
}

bool get_bool(const YAML::Node& node, const std::string& where) {
  const auto s = get_string(node, where);
  if (s == "true") return true;
  if (s == "false") return false;
  fail(where + " must be true or false");
}

std::vector<double> get_doubles(const YAML::Node& node, const std::string& where) {
  if (!node.IsSequence()) fail(where + " must be a list");
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i) out.push_back(get_double(node[i], where));
  return out;
}

template <class F>
void with(const YAML::Node& parent, const char* key, F&& f) {
  if (const auto n = parent[key]) f(n);
}

BasisTerm parse_term(const YAML::Node& node, const std::string& where) {
  check_keys(node, where, {"kind", "powers", "var", "var2", "fraction", "window", "label"});
  if (!node["kind"]) fail(where + ": missing kind");
  BasisTerm term;
  try {
    term.kind = parse_term_kind(get_string(node["kind"], where + ".kind"));
  } catch (const ConfigError& e) {
    fail(where + ": " + e.what());
  }
  with(node, "powers", [&](const YAML::Node& n) {
    for (double v : get_doubles(n, where + ".powers")) {
      if (v != std::floor(v)) fail(where + ".powers must be integers");
      term.powers.push_back(static_cast<int>(v));
    }
  });
  with(node, "var", [&](const YAML::Node& n) { term.var = static_cast<int>(get_long(n, where + ".var")); });
  with(node, "var2", [&](const YAML::Node& n) { term.var2 = static_cast<int>(get_long(n, where + ".var2")); });
  with(node, "fraction", [&](const YAML::Node& n) { term.fraction = get_double(n, where + ".fraction"); });
  with(node, "window", [&](const YAML::Node& n) { term.window = static_cast<int>(get_long(n, where + ".window")); });
  with(node, "label", [&](const YAML::Node& n) { term.label = get_string(n, where + ".label"); });
  // Fields a kind does not use are reset so that a serialize/parse round trip compares equal.
  const auto k = term.kind;
  if (k != TermKind::monomial) term.powers.clear();
  if (k == TermKind::constant || k == TermKind::monomial) term.var = 0;
  if (k != TermKind::cross && k != TermKind::quartic_sine) term.var2 = 0;
  if (k != TermKind::delay) term.fraction = 0.0;
  if (k != TermKind::input_derivative) term.window = 1;
  return term;
}

BasisSpec parse_basis_node(const YAML::Node& node, const std::string& where) {
  check_keys(node, where, {"names", "terms"});
  BasisSpec spec;
  with(node, "names", [&](const YAML::Node& n) {
    if (!n.IsSequence()) fail(where + ".names must be a list");
    for (std::size_t i = 0; i < n.size(); ++i) spec.var_names.push_back(get_string(n[i], where + ".names"));
  });
  if (!node["terms"] || !node["terms"].IsSequence()) fail(where + ".terms must be a list");
  const auto terms = node["terms"];
  for (std::size_t i = 0; i < terms.size(); ++i) {
    spec.terms.push_back(parse_term(terms[i], where + ".terms[" + std::to_string(i) + "]"));
  }
  return spec;
}

// Numbers go out through format_double so they parse back to the same bits.
void emit_number(YAML::Emitter& e, double v) { e << format_double(v); }

void emit_numbers(YAML::Emitter& e, const std::vector<double>& values) {
  e << YAML::Flow << YAML::BeginSeq;
  for (double v : values) emit_number(e, v);
  e << YAML::EndSeq;
}

void emit_term(YAML::Emitter& e, const BasisTerm& t) {
  e << YAML::Flow << YAML::BeginMap;
  e << YAML::Key << "kind" << YAML::Value << to_string(t.kind);
  switch (t.kind) {
    case TermKind::constant: break;
    case TermKind::monomial:
      e << YAML::Key << "powers" << YAML::Value << YAML::Flow << YAML::BeginSeq;
      for (int p : t.powers) e << p;
      e << YAML::EndSeq;
      break;
    case TermKind::cross:
    case TermKind::quartic_sine:
      e << YAML::Key << "var" << YAML::Value << t.var << YAML::Key << "var2" << YAML::Value << t.var2;
      break;
    case TermKind::sine:
    case TermKind::sine_squared: e << YAML::Key << "var" << YAML::Value << t.var; break;
    case TermKind::delay:
      e << YAML::Key << "var" << YAML::Value << t.var << YAML::Key << "fraction" << YAML::Value;
      emit_number(e, t.fraction);
      break;
    case TermKind::input_derivative:
      e << YAML::Key << "var" << YAML::Value << t.var << YAML::Key << "window" << YAML::Value << t.window;
      break;
  }
  if (!t.label.empty()) e << YAML::Key << "label" << YAML::Value << YAML::DoubleQuoted << t.label;
  e << YAML::EndMap;
}

void emit_basis(YAML::Emitter& e, const BasisSpec& spec) {
  e << YAML::BeginMap;
  if (!spec.var_names.empty()) {
    e << YAML::Key << "names" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (const auto& n : spec.var_names) e << YAML::DoubleQuoted << n;
    e << YAML::EndSeq;
  }
  e << YAML::Key << "terms" << YAML::Value << YAML::BeginSeq;
  for (const auto& t : spec.terms) emit_term(e, t);
  e << YAML::EndSeq << YAML::EndMap;
}

YAML::Node load_yaml(const std::string& text) {
  try {
    return YAML::Load(text);
  } catch (const YAML::Exception& e) {
    fail(std::string("parse error: ") + e.what());
  }
}

SystemConfig parse_system(const YAML::Node& node) {
  check_keys(node, "system", {"preset", "params", "x0", "terms", "coefficients"});
  SystemConfig s;
  if (!node["preset"]) fail("system.preset is required");
  s.preset = get_string(node["preset"], "system.preset");
  with(node, "params", [&](const YAML::Node& n) { s.params = get_doubles(n, "system.params"); });
  with(node, "x0", [&](const YAML::Node& n) { s.x0 = get_doubles(n, "system.x0"); });
  with(node, "terms", [&](const YAML::Node& n) { s.terms = parse_basis_node(n, "system.terms"); });
  with(node, "coefficients", [&](const YAML::Node& n) {
    if (!n.IsSequence()) fail("system.coefficients must be a list of rows");
    for (std::size_t i = 0; i < n.size(); ++i) s.coefficients.push_back(get_doubles(n[i], "system.coefficients"));
  });
  return s;
}

TimeConfig parse_time(const YAML::Node& node) {
  check_keys(node, "time", {"t0", "t_end", "dt", "points"});
  TimeConfig t;
  with(node, "t0", [&](const YAML::Node& n) { t.t0 = get_double(n, "time.t0"); });
  with(node, "t_end", [&](const YAML::Node& n) { t.t_end = get_double(n, "time.t_end"); });
  with(node, "dt", [&](const YAML::Node& n) { t.dt = get_double(n, "time.dt"); });
  with(node, "points", [&](const YAML::Node& n) { t.points = get_long(n, "time.points"); });
  return t;
}

BayesSettings parse_bayes(const YAML::Node& node) {
  check_keys(node, "fit.bayes",
             {"activation", "alpha0", "sparsity", "tau_w", "mc_draws", "iterations", "burn_in", "rw_step",
              "rescale_step", "sigma2", "alpha_update", "level", "zero_tol"});
  BayesSettings b;
  with(node, "activation", [&](const YAML::Node& n) {
    if (n.IsScalar()) {
      b.activation = Activation::from_name(get_string(n, "fit.bayes.activation"));
    } else {
      check_keys(n, "fit.bayes.activation", {"horseshoe"});
      const auto abc = get_doubles(n["horseshoe"], "fit.bayes.activation.horseshoe");
      if (abc.size() != 3) fail("fit.bayes.activation.horseshoe needs [a, b, c]");
      b.activation = Activation::horseshoe(abc[0], abc[1], abc[2]);
    }
  });
  if (node["sparsity"]) {
    b.alpha0.reset();
    b.sparsity = get_double(node["sparsity"], "fit.bayes.sparsity");
  }
  with(node, "alpha0", [&](const YAML::Node& n) { b.alpha0 = get_double(n, "fit.bayes.alpha0"); });
  with(node, "tau_w", [&](const YAML::Node& n) {
    if (n.IsScalar() && n.Scalar() == "auto") {
      b.tau_w = {TauWSetting::Kind::automatic, 0.0};
    } else if (n.IsScalar()) {
      b.tau_w = {TauWSetting::Kind::fixed, get_double(n, "fit.bayes.tau_w")};
    } else {
      check_keys(n, "fit.bayes.tau_w", {"horseshoe_fraction"});
      b.tau_w = {TauWSetting::Kind::horseshoe_fraction,
                 get_double(n["horseshoe_fraction"], "fit.bayes.tau_w.horseshoe_fraction")};
    }
  });
  with(node, "mc_draws", [&](const YAML::Node& n) { b.mc_draws = get_long(n, "fit.bayes.mc_draws"); });
  with(node, "iterations", [&](const YAML::Node& n) { b.iterations = get_long(n, "fit.bayes.iterations"); });
  with(node, "burn_in", [&](const YAML::Node& n) { b.burn_in = get_double(n, "fit.bayes.burn_in"); });
  with(node, "rw_step", [&](const YAML::Node& n) { b.rw_step = get_double(n, "fit.bayes.rw_step"); });
  with(node, "rescale_step", [&](const YAML::Node& n) { b.rescale_step = get_double(n, "fit.bayes.rescale_step"); });
  with(node, "sigma2", [&](const YAML::Node& n) {
    check_keys(n, "fit.bayes.sigma2", {"learn", "value", "a0", "b0"});
    with(n, "learn", [&](const YAML::Node& v) { b.sigma2.learn = get_bool(v, "fit.bayes.sigma2.learn"); });
    with(n, "value", [&](const YAML::Node& v) { b.sigma2.value = get_double(v, "fit.bayes.sigma2.value"); });
    with(n, "a0", [&](const YAML::Node& v) { b.sigma2.a0 = get_double(v, "fit.bayes.sigma2.a0"); });
    with(n, "b0", [&](const YAML::Node& v) { b.sigma2.b0 = get_double(v, "fit.bayes.sigma2.b0"); });
  });
  with(node, "alpha_update", [&](const YAML::Node& n) {
    b.alpha_update = parse_alpha_update(get_string(n, "fit.bayes.alpha_update"));
  });
  with(node, "level", [&](const YAML::Node& n) { b.level = get_double(n, "fit.bayes.level"); });
  with(node, "zero_tol", [&](const YAML::Node& n) { b.zero_tol = get_double(n, "fit.bayes.zero_tol"); });
  return b;
}

std::variant<StlsSettings, BayesSettings> parse_fit(const YAML::Node& node) {
  check_keys(node, "fit", {"mode", "stls", "bayes"});
  if (node["stls"] && node["bayes"]) fail("fit: exactly one of stls / bayes may be given");
  std::string mode;
  if (node["mode"]) {
    mode = get_string(node["mode"], "fit.mode");
  } else if (node["stls"]) {
    mode = "stls";
  } else if (node["bayes"]) {
    mode = "bayes";
  } else {
    fail("fit: one of stls / bayes is required");
  }
  if (mode == "stls") {
    if (node["bayes"]) fail("fit.mode is stls but a bayes section is present");
    StlsSettings s;
    if (const auto n = node["stls"]) {
      check_keys(n, "fit.stls", {"lambda", "k_max"});
      with(n, "lambda", [&](const YAML::Node& v) { s.lambda = get_double(v, "fit.stls.lambda"); });
      with(n, "k_max", [&](const YAML::Node& v) { s.k_max = static_cast<int>(get_long(v, "fit.stls.k_max")); });
    }
    return s;
  }
  if (mode == "bayes") {
    if (node["stls"]) fail("fit.mode is bayes but an stls section is present");
    return node["bayes"] ? parse_bayes(node["bayes"]) : BayesSettings{};
  }
  fail("fit.mode must be stls or bayes, got '" + mode + "'");
}

}  // namespace

int SystemConfig::dim() const {
  if (preset == "pendulum") return 2;
  if (preset == "lorenz" || preset == "ishigami") return 3;
  if (!coefficients.empty()) return static_cast<int>(coefficients.front().size());
  return static_cast<int>(x0.size());
}

SystemDef SystemConfig::system() const {
  if (preset == "pendulum") return params.empty() ? pendulum() : pendulum(params.at(0), params.at(1));
  if (preset == "lorenz") return params.empty() ? lorenz() : lorenz(params.at(0), params.at(1), params.at(2));
  if (preset == "custom") {
    Matrix C(static_cast<Eigen::Index>(coefficients.size()), dim());
    for (std::size_t i = 0; i < coefficients.size(); ++i) {
      for (std::size_t k = 0; k < coefficients[i].size(); ++k) C(i, k) = coefficients[i][k];
    }
    return make_system(terms, C, "custom");
  }
  fail("system '" + preset + "' is not an ODE");
}

Vector TimeConfig::grid() const {
  if (dt) return uniform_grid(t0, t_end, *dt);
  return linspace(t0, t_end, static_cast<Eigen::Index>(points.value_or(2)));
}

double BayesSettings::resolved_alpha0() const {
  return sparsity ? alpha0_from_sparsity(*sparsity) : alpha0.value_or(0.0);
}

BasisSpec ExperimentConfig::library() const {
  if (basis) return *basis;
  if (system.preset == "pendulum") return pendulum_basis();
  if (system.preset == "lorenz") return lorenz_basis();
  if (system.preset == "ishigami") return ishigami_basis();
  return system.terms;
}

void ExperimentConfig::validate() const {
  if (name.empty()) fail("name must not be empty");
  if (!kPresets.count(system.preset)) fail("system.preset '" + system.preset + "' is unknown");
  const auto& p = system.params;
  if (system.preset == "pendulum" && !p.empty() && p.size() != 2) fail("pendulum params are [g, L]");
  if (system.preset == "lorenz" && !p.empty() && p.size() != 3) fail("lorenz params are [c1, c2, c3]");
  if (system.preset == "ishigami" && !p.empty() && p.size() != 3) fail("ishigami params are [a, b, c]");
  for (double v : p) {
    if (!std::isfinite(v)) fail("system.params must be finite");
  }
  const bool ode = system.preset != "ishigami";
  if (system.preset == "custom") {
    if (system.terms.terms.empty()) fail("custom system needs terms");
    if (system.coefficients.size() != system.terms.size()) fail("custom coefficients need one row per term");
    for (const auto& row : system.coefficients) {
      if (row.size() != static_cast<std::size_t>(system.dim())) fail("custom coefficient rows differ in length");
    }
    system.terms.validate(system.dim());
  } else if (!system.terms.terms.empty() || !system.coefficients.empty()) {
    fail("system.terms / system.coefficients are only valid for the custom preset");
  }
  if (ode) {
    if (system.x0.size() != static_cast<std::size_t>(system.dim())) {
      fail("system.x0 needs " + std::to_string(system.dim()) + " entries");
    }
    if (time.dt.has_value() == time.points.has_value()) fail("time: give exactly one of dt / points");
    if (!(time.t_end > time.t0)) fail("time.t_end must exceed time.t0");
    if (time.dt && !(*time.dt > 0.0)) fail("time.dt must be positive");
    if (time.points && *time.points < 2) fail("time.points must be at least 2");
  } else if (samples < 2) {
    fail("samples must be at least 2");
  }
  if (!(noise >= 0.0) || !std::isfinite(noise)) fail("noise must be a finite non-negative number");
  if (derivative.window < 1 || derivative.window % 2 == 0) fail("derivative.window must be odd and positive");
  library().validate(system.dim());
  if (period && !(*period > 0.0)) fail("period must be positive");
  if (normalize && is_bayes()) fail("normalize is supported for stls fits only");
  if (const auto* s = std::get_if<StlsSettings>(&fit)) {
    if (!(s->lambda >= 0.0)) fail("fit.stls.lambda must be non-negative");
    if (s->k_max < 1) fail("fit.stls.k_max must be at least 1");
  } else {
    const auto& b = std::get<BayesSettings>(fit);
    if (b.alpha0.has_value() == b.sparsity.has_value()) fail("fit.bayes: give exactly one of alpha0 / sparsity");
    if (b.sparsity && !(*b.sparsity > 0.0 && *b.sparsity < 1.0)) fail("fit.bayes.sparsity must lie in (0, 1)");
    if (b.alpha0 && !std::isfinite(*b.alpha0)) fail("fit.bayes.alpha0 must be finite");
    if (b.tau_w.kind == TauWSetting::Kind::fixed && !(b.tau_w.value > 0.0)) fail("fit.bayes.tau_w must be positive");
    if (b.tau_w.kind == TauWSetting::Kind::horseshoe_fraction) {
      if (b.activation.kind != Activation::Kind::horseshoe) fail("horseshoe_fraction needs a horseshoe activation");
      if (!(b.tau_w.value > 0.0 && b.tau_w.value < 1.0)) fail("horseshoe_fraction must lie in (0, 1)");
    }
    if (b.mc_draws < 10000) fail("fit.bayes.mc_draws must be at least 10000");
    if (b.alpha_update == AlphaUpdate::relu_exact && b.activation.kind != Activation::Kind::relu) {
      fail("alpha_update relu-exact needs the relu activation");
    }
    if (!(b.level > 0.0 && b.level < 1.0)) fail("fit.bayes.level must lie in (0, 1)");
    if (b.zero_tol && !(*b.zero_tol >= 0.0)) fail("fit.bayes.zero_tol must be non-negative");
    ChainConfig probe;
    probe.prior = {b.activation, b.resolved_alpha0(), 1.0};
    probe.iterations = b.iterations;
    probe.burn_in = b.burn_in;
    probe.rw_step = b.rw_step;
    probe.rescale_step = b.rescale_step;
    probe.sigma2 = b.sigma2;
    probe.alpha_update = b.alpha_update;
    try {
      probe.validate();
    } catch (const ConfigError& e) {
      fail(std::string("fit.bayes: ") + e.what());
    }
  }
  if (predict.draws < 1) fail("predict.draws must be at least 1");
  if (!(predict.level > 0.0 && predict.level < 1.0)) fail("predict.level must lie in (0, 1)");
  if (output.empty()) fail("output must not be empty");
}

ExperimentConfig parse_config(const std::string& text) {
  const YAML::Node root = load_yaml(text);
  if (!root.IsMap()) fail("top level must be a mapping");
  check_keys(root, "",
             {"name", "system", "time", "samples", "noise", "derivative", "basis", "period", "normalize", "fit",
              "predict", "output", "seed"});
  ExperimentConfig cfg;
  with(root, "name", [&](const YAML::Node& n) { cfg.name = get_string(n, "name"); });
  if (!root["system"]) fail("system section is required");
  cfg.system = parse_system(root["system"]);
  with(root, "time", [&](const YAML::Node& n) { cfg.time = parse_time(n); });
  with(root, "samples", [&](const YAML::Node& n) { cfg.samples = get_long(n, "samples"); });
  with(root, "noise", [&](const YAML::Node& n) { cfg.noise = get_double(n, "noise"); });
  with(root, "derivative", [&](const YAML::Node& n) {
    check_keys(n, "derivative", {"method", "window"});
    with(n, "method", [&](const YAML::Node& v) {
      try {
        cfg.derivative.method = parse_derivative_method(get_string(v, "derivative.method"));
      } catch (const ConfigError& e) {
        fail(e.what());
      }
    });
    with(n, "window", [&](const YAML::Node& v) {
      cfg.derivative.window = static_cast<int>(get_long(v, "derivative.window"));
    });
  });
  with(root, "basis", [&](const YAML::Node& n) { cfg.basis = parse_basis_node(n, "basis"); });
  with(root, "period", [&](const YAML::Node& n) { cfg.period = get_double(n, "period"); });
  with(root, "normalize", [&](const YAML::Node& n) { cfg.normalize = get_bool(n, "normalize"); });
  if (!root["fit"]) fail("fit section is required");
  cfg.fit = parse_fit(root["fit"]);
  with(root, "predict", [&](const YAML::Node& n) {
    check_keys(n, "predict", {"draws", "level"});
    with(n, "draws", [&](const YAML::Node& v) { cfg.predict.draws = get_long(v, "predict.draws"); });
    with(n, "level", [&](const YAML::Node& v) { cfg.predict.level = get_double(v, "predict.level"); });
  });
  with(root, "output", [&](const YAML::Node& n) { cfg.output = get_string(n, "output"); });
  with(root, "seed", [&](const YAML::Node& n) {
    const auto s = get_string(n, "seed");
    if (s.empty() || s.front() == '-') fail("seed must be a non-negative integer");
    try {
      std::size_t used = 0;
      cfg.seed = std::stoull(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      fail("seed must be a non-negative integer");
    }
  });
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("config file not found: " + path.string());
  return parse_config(read_file(path));
}

std::string serialize_config(const ExperimentConfig& cfg) {
  using YAML::Key, YAML::Value;
  YAML::Emitter e;
  e << YAML::BeginMap;
  e << Key << "name" << Value << YAML::DoubleQuoted << cfg.name;
  e << Key << "system" << Value << YAML::BeginMap;
  e << Key << "preset" << Value << cfg.system.preset;
  if (!cfg.system.params.empty()) {
    e << Key << "params" << Value;
    emit_numbers(e, cfg.system.params);
  }
  if (!cfg.system.x0.empty()) {
    e << Key << "x0" << Value;
    emit_numbers(e, cfg.system.x0);
  }
  if (cfg.system.preset == "custom") {
    e << Key << "terms" << Value;
    emit_basis(e, cfg.system.terms);
    e << Key << "coefficients" << Value << YAML::BeginSeq;
    for (const auto& row : cfg.system.coefficients) emit_numbers(e, row);
    e << YAML::EndSeq;
  }
  e << YAML::EndMap;
  e << Key << "samples" << Value << cfg.samples;
  {
    e << Key << "time" << Value << YAML::BeginMap;
    e << Key << "t0" << Value;
    emit_number(e, cfg.time.t0);
    e << Key << "t_end" << Value;
    emit_number(e, cfg.time.t_end);
    if (cfg.time.dt) {
      e << Key << "dt" << Value;
      emit_number(e, *cfg.time.dt);
    }
    if (cfg.time.points) e << Key << "points" << Value << *cfg.time.points;
    e << YAML::EndMap;
  }
  e << Key << "noise" << Value;
  emit_number(e, cfg.noise);
  e << Key << "derivative" << Value << YAML::BeginMap;
  e << Key << "method" << Value << to_string(cfg.derivative.method);
  e << Key << "window" << Value << cfg.derivative.window;
  e << YAML::EndMap;
  if (cfg.basis) {
    e << Key << "basis" << Value;
    emit_basis(e, *cfg.basis);
  }
  if (cfg.period) {
    e << Key << "period" << Value;
    emit_number(e, *cfg.period);
  }
  e << Key << "normalize" << Value << (cfg.normalize ? "true" : "false");
  e << Key << "fit" << Value << YAML::BeginMap;
  if (const auto* s = std::get_if<StlsSettings>(&cfg.fit)) {
    e << Key << "mode" << Value << "stls";
    e << Key << "stls" << Value << YAML::BeginMap << Key << "lambda" << Value;
    emit_number(e, s->lambda);
    e << Key << "k_max" << Value << s->k_max << YAML::EndMap;
  } else {
    const auto& b = std::get<BayesSettings>(cfg.fit);
    e << Key << "mode" << Value << "bayes";
    e << Key << "bayes" << Value << YAML::BeginMap;
    e << Key << "activation" << Value;
    const auto act_name = b.activation.name();
    if (act_name == "horseshoe") {
      e << YAML::BeginMap << Key << "horseshoe" << Value;
      emit_numbers(e, {b.activation.a, b.activation.b, b.activation.c});
      e << YAML::EndMap;
    } else {
      e << act_name;
    }
    if (b.alpha0) {
      e << Key << "alpha0" << Value;
      emit_number(e, *b.alpha0);
    }
    if (b.sparsity) {
      e << Key << "sparsity" << Value;
      emit_number(e, *b.sparsity);
    }
    e << Key << "tau_w" << Value;
    switch (b.tau_w.kind) {
      case TauWSetting::Kind::automatic: e << "auto"; break;
      case TauWSetting::Kind::fixed: emit_number(e, b.tau_w.value); break;
      case TauWSetting::Kind::horseshoe_fraction:
        e << YAML::BeginMap << Key << "horseshoe_fraction" << Value;
        emit_number(e, b.tau_w.value);
        e << YAML::EndMap;
        break;
    }
    e << Key << "mc_draws" << Value << b.mc_draws;
    e << Key << "iterations" << Value << b.iterations;
    e << Key << "burn_in" << Value;
    emit_number(e, b.burn_in);
    e << Key << "rw_step" << Value;
    emit_number(e, b.rw_step);
    e << Key << "rescale_step" << Value;
    emit_number(e, b.rescale_step);
    e << Key << "sigma2" << Value << YAML::BeginMap;
    e << Key << "learn" << Value << (b.sigma2.learn ? "true" : "false");
    e << Key << "value" << Value;
    emit_number(e, b.sigma2.value);
    e << Key << "a0" << Value;
    emit_number(e, b.sigma2.a0);
    e << Key << "b0" << Value;
    emit_number(e, b.sigma2.b0);
    e << YAML::EndMap;
    e << Key << "alpha_update" << Value << to_string(b.alpha_update);
    e << Key << "level" << Value;
    emit_number(e, b.level);
    if (b.zero_tol) {
      e << Key << "zero_tol" << Value;
      emit_number(e, *b.zero_tol);
    }
    e << YAML::EndMap;
  }
  e << YAML::EndMap;
  e << Key << "predict" << Value << YAML::BeginMap;
  e << Key << "draws" << Value << cfg.predict.draws;
  e << Key << "level" << Value;
  emit_number(e, cfg.predict.level);
  e << YAML::EndMap;
  e << Key << "output" << Value << YAML::DoubleQuoted << cfg.output;
  e << Key << "seed" << Value << cfg.seed;
  e << YAML::EndMap;
  if (!e.good()) throw ConfigError(std::string("config: emitter error: ") + e.GetLastError());
  return std::string(e.c_str()) + "\n";
}

std::string config_hash(const ExperimentConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(serialize_config(cfg))));
  return buf;
}

std::string serialize_basis(const BasisSpec& spec) {
  YAML::Emitter e;
  emit_basis(e, spec);
  return std::string(e.c_str()) + "\n";
}

BasisSpec parse_basis(const std::string& text) { return parse_basis_node(load_yaml(text), "basis"); }

std::vector<std::string> preset_names() { return {"pendulum_lasso", "lorenz_relu", "ishigami_relu"}; }

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig cfg;
  cfg.name = name;
  cfg.seed = 1;
  cfg.derivative.method = DerivativeMethod::analytic;
  BayesSettings b;
  if (name == "pendulum_lasso") {
    cfg.system = {"pendulum", {9.81, 1.0}, {1.0, 0.0}, {}, {}};
    cfg.time = {0.0, 4.0, std::nullopt, 50};
    cfg.noise = 0.01;
    b.activation = Activation::identity();
    b.alpha0 = 0.0;
    b.burn_in = 0.2;
    b.sigma2 = {false, 1e-4, 1.0, 1.0};
    b.alpha_update = AlphaUpdate::metropolis;
    cfg.predict = {200, 0.9};
    cfg.output = "out/pendulum";
  } else if (name == "lorenz_relu") {
    cfg.system = {"lorenz", {10.0, 28.0, 2.667}, {-8.0, 8.0, 27.0}, {}, {}};
    cfg.time = {0.0, 100.0, 0.1, std::nullopt};
    cfg.noise = 1.0;
    b.activation = Activation::relu();
    b.alpha0 = 0.5;
    b.burn_in = 0.3;
    b.sigma2 = {true, 1.0, 1.0, 1.0};
    b.alpha_update = AlphaUpdate::relu_exact;
    cfg.predict = {100, 0.9};
    cfg.output = "out/lorenz";
  } else if (name == "ishigami_relu") {
    cfg.system = {"ishigami", {1.0, 7.0, 0.1}, {}, {}, {}};
    cfg.samples = 5000;
    cfg.noise = 0.1;
    b.activation = Activation::relu();
    b.alpha0 = 0.5;
    b.burn_in = 0.2;
    b.sigma2 = {true, 1.0, 1.0, 1.0};
    b.alpha_update = AlphaUpdate::relu_exact;
    cfg.output = "out/ishigami";
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  b.iterations = 10000;
  cfg.fit = b;
  cfg.validate();
  return cfg;
}

}  // namespace bsindy
