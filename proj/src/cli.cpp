#include "bsindy/cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cctype>
#include <cmath>
#include <exception>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "bsindy/csv.hpp"
#include "bsindy/errors.hpp"
#include "bsindy/persist.hpp"
#include "bsindy/random.hpp"

namespace bsindy {

namespace fs = std::filesystem;

std::uint64_t SeedPlan::noise() const { return derive_seed(root, "noise", 0); }
std::uint64_t SeedPlan::inputs() const { return derive_seed(root, "inputs", 0); }
// Hyperparameters use the fixed documented seed so tau_w does not move with the run seed.
std::uint64_t SeedPlan::tau_w(int) const { return kHyperparameterSeed; }
std::uint64_t SeedPlan::chain(int equation) const { return derive_seed(root, "chain", equation); }
std::uint64_t SeedPlan::predict() const { return derive_seed(root, "predict", 0); }

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string s = "[";
  for (std::size_t i = 0; i < items.size(); ++i) s += (i ? ", " : "") + items[i];
  return s + "]";
}

std::vector<std::string> state_names_for(const ExperimentConfig& cfg) {
  const BasisSpec basis = cfg.library();
  std::vector<std::string> names;
  for (int i = 0; i < cfg.system.dim(); ++i) names.push_back(basis.variable_name(i));
  return names;
}

Dataset simulate_ishigami(const ExperimentConfig& cfg) {
  const SeedPlan seeds{cfg.seed};
  const auto& p = cfg.system.params;
  const double a = p.empty() ? 1.0 : p[0], b = p.empty() ? 7.0 : p[1], c = p.empty() ? 0.1 : p[2];
  const Eigen::Index m = cfg.samples;
  Rng rng(seeds.inputs());
  Dataset d;
  d.X.resize(m, 3);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index k = 0; k < 3; ++k) d.X(i, k) = std::numbers::pi * (2.0 * rng.uniform() - 1.0);
  }
  Matrix y(m, 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double s1 = std::sin(d.X(i, 0)), s2 = std::sin(d.X(i, 1));
    y(i, 0) = a * s1 + b * s2 * s2 + c * std::pow(d.X(i, 2), 4) * s1;
  }
  d.t = Vector::LinSpaced(m, 0.0, static_cast<double>(m - 1));
  d.tz = d.t;
  d.Z = add_gaussian_noise(y, cfg.noise, seeds.noise());
  d.state_names = state_names_for(cfg);
  d.target_names = {"y"};
  return d;
}

// Index k0 with tz(k) == t(k0 + k) for every k inside both grids.
Eigen::Index target_offset(const Vector& t, const Vector& tz) {
  if (tz.size() == 0) throw ConfigError("data: derivative table is empty");
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)); };
  Eigen::Index k0 = -1;
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    if (close(t(i), tz(0))) {
      k0 = i;
      break;
    }
  }
  if (k0 < 0) throw ConfigError("data: derivative times do not lie on the trajectory grid");
  for (Eigen::Index k = 0; k < tz.size() && k0 + k < t.size(); ++k) {
    if (!close(t(k0 + k), tz(k))) throw ConfigError("data: derivative times do not follow the trajectory grid");
  }
  return k0;
}

EquationFit fit_one(const ExperimentConfig& cfg, const Matrix& D, const Vector& z, const DesignMatrix& dm, int k,
                    const std::string& name) {
  EquationFit fit;
  fit.index = k;
  fit.name = name;
  const SeedPlan seeds{cfg.seed};
  if (const auto* s = std::get_if<StlsSettings>(&cfg.fit)) {
    if (cfg.normalize) {
      DesignMatrix aligned = dm;
      aligned.D = D;
      const auto np = normalize(aligned, z);
      StlsResult r = stls(np.design.D, np.z, s->lambda, s->k_max);
      r.xi = denormalize_coefficients(r.xi, np.record);
      r.support.clear();
      for (Eigen::Index j = 0; j < r.xi.size(); ++j) {
        if (r.xi(j) != 0.0) r.support.push_back(j);
      }
      fit.stls = r;
    } else {
      fit.stls = stls(D, z, s->lambda, s->k_max);
    }
    return fit;
  }
  const auto& b = std::get<BayesSettings>(cfg.fit);
  fit.alpha0 = b.resolved_alpha0();
  switch (b.tau_w.kind) {
    case TauWSetting::Kind::automatic:
      fit.tau_w = select_tau_w(least_squares(D, z), D.cols(), b.activation, b.mc_draws, seeds.tau_w(k), fit.alpha0);
      break;
    case TauWSetting::Kind::fixed: fit.tau_w = b.tau_w.value; break;
    case TauWSetting::Kind::horseshoe_fraction:
      fit.tau_w = tau_w_horseshoe_calibration(b.tau_w.value, b.activation, b.mc_draws, seeds.tau_w(k));
      break;
  }
  ChainConfig cc;
  cc.prior = {b.activation, fit.alpha0, fit.tau_w};
  cc.iterations = b.iterations;
  cc.burn_in = b.burn_in;
  cc.rw_step = b.rw_step;
  cc.rescale_step = b.rescale_step;
  cc.sigma2 = b.sigma2;
  cc.seed = seeds.chain(k);
  cc.alpha_update = b.alpha_update;
  fit.chain = run_chain(D, z, cc);
  fit.report = summarize(*fit.chain, b.level, b.zero_tol);
  return fit;
}

}  // namespace

Dataset simulate_dataset(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.system.preset == "ishigami") return simulate_ishigami(cfg);
  const SystemDef sys = cfg.system.system();
  const Vector x0 = Eigen::Map<const Vector>(cfg.system.x0.data(), static_cast<Eigen::Index>(cfg.system.x0.size()));
  const Trajectory traj = integrate(sys, x0, cfg.time.grid());
  DerivativeData dd;
  switch (cfg.derivative.method) {
    case DerivativeMethod::analytic: dd = analytic_derivative(sys, traj); break;
    case DerivativeMethod::forward_euler: dd = forward_euler_derivative(traj); break;
    case DerivativeMethod::central: dd = central_derivative(traj); break;
    case DerivativeMethod::smoothed_central: dd = smoothed_central_derivative(traj, cfg.derivative.window); break;
  }
  dd = add_gaussian_noise(dd, cfg.noise, SeedPlan{cfg.seed}.noise());
  Dataset d;
  d.t = traj.t;
  d.X = traj.X;
  d.tz = dd.t;
  d.Z = dd.z;
  d.state_names = state_names_for(cfg);
  for (const auto& n : d.state_names) d.target_names.push_back("d" + n);
  return d;
}

void save_dataset(const fs::path& dir, const Dataset& data) {
  Table traj;
  traj.header = {"t"};
  traj.header.insert(traj.header.end(), data.state_names.begin(), data.state_names.end());
  traj.data.resize(data.X.rows(), data.X.cols() + 1);
  traj.data << data.t, data.X;
  Table der;
  der.header = {"t"};
  der.header.insert(der.header.end(), data.target_names.begin(), data.target_names.end());
  der.data.resize(data.Z.rows(), data.Z.cols() + 1);
  der.data << data.tz, data.Z;
  write_csv(dir / "trajectory.csv", traj);
  write_csv(dir / "derivatives.csv", der);
}

Dataset load_dataset(const fs::path& dir) {
  const auto read = [](const fs::path& p) {
    if (!fs::exists(p)) throw IoError("data file not found: " + p.string());
    try {
      return read_csv(p);
    } catch (const ConfigError& e) {
      throw IoError("cannot read " + p.string() + ": " + e.what());
    }
  };
  const Table traj = read(dir / "trajectory.csv");
  const Table der = read(dir / "derivatives.csv");
  for (const Table* t : {&traj, &der}) {
    if (t->header.empty() || t->header.front() != "t") throw IoError("data tables must start with a 't' column");
  }
  Dataset d;
  d.t = traj.data.col(0);
  d.X = traj.data.rightCols(traj.data.cols() - 1);
  d.state_names.assign(traj.header.begin() + 1, traj.header.end());
  d.tz = der.data.col(0);
  d.Z = der.data.rightCols(der.data.cols() - 1);
  d.target_names.assign(der.header.begin() + 1, der.header.end());
  return d;
}

FitOutcome fit_dataset(const ExperimentConfig& cfg, const Dataset& data, const std::vector<int>& equations, int jobs) {
  cfg.validate();
  FitOutcome out;
  out.basis = cfg.library();
  const auto expected = state_names_for(cfg);
  if (data.state_names != expected) {
    throw ConfigError("data columns " + join(data.state_names) + " do not match the basis variables " +
                      join(expected));
  }
  if (data.Z.cols() < 1) throw ConfigError("data: no target columns");
  const DesignMatrix dm = build_design(data.X, out.basis, data.t, cfg.period);
  const Eigen::Index k0 = target_offset(data.t, data.tz);
  const Eigen::Index begin = std::max(dm.row_offset, k0);
  const Eigen::Index end = std::min<Eigen::Index>(data.X.rows(), k0 + data.tz.size());
  if (end - begin < 2) throw ConfigError("data: fewer than two rows remain after aligning states and targets");
  out.D = dm.D.middleRows(begin - dm.row_offset, end - begin);

  std::vector<int> selected = equations;
  if (selected.empty()) {
    for (int k = 0; k < data.Z.cols(); ++k) selected.push_back(k);
  }
  for (int k : selected) {
    if (k < 0 || k >= data.Z.cols()) {
      throw ConfigError("equation " + std::to_string(k + 1) + " out of range; targets are " +
                        join(data.target_names));
    }
  }
  out.equations.resize(selected.size());
  std::vector<std::exception_ptr> errors(selected.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < selected.size(); i = next++) {
      try {
        const int k = selected[i];
        const Vector z = data.Z.col(k).segment(begin - k0, end - begin);
        out.equations[i] = fit_one(cfg, out.D, z, dm, k, data.target_names[static_cast<std::size_t>(k)]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(selected.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

PredictiveEnsemble predict_from_chains(const ExperimentConfig& cfg, const BasisSpec& basis,
                                       const std::vector<const Chain*>& chains, const Vector& x0, const Vector& t,
                                       long draws, double level) {
  return posterior_predictive(chains, basis, x0, t, draws, level, SeedPlan{cfg.seed}.predict());
}

namespace {

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  int jobs = 1;
};

struct SimulateOptions {
  std::string preset;
  std::optional<double> dt, T, noise;
  std::optional<long> points, samples;
  std::vector<double> x0, params;
  std::string derivative;
  std::optional<int> window;
};

struct FitOptions {
  std::string preset, data, mode, activation, alpha_update, tau_w;
  std::optional<double> lambda, alpha0, burn_in;
  std::optional<int> k_max;
  std::optional<long> iterations;
  std::vector<int> equations;
};

struct DiagnoseOptions {
  std::string chain;
  int bins = 40;
};

struct PredictOptions {
  std::string run;
  std::optional<long> draws, points;
  std::optional<double> level, t_end, dt;
  std::vector<double> x0;
};

ExperimentConfig preset_by_system(const std::string& name) {
  if (name == "pendulum") return preset_config("pendulum_lasso");
  if (name == "lorenz") return preset_config("lorenz_relu");
  if (name == "ishigami") return preset_config("ishigami_relu");
  return preset_config(name);
}

// Config file first, otherwise the preset; command-line values override both.
ExperimentConfig base_config(const GlobalOptions& g, const std::string& preset) {
  if (!preset.empty() && !g.config.empty()) throw ConfigError("--preset and --config are exclusive");
  ExperimentConfig cfg;
  if (!g.config.empty()) {
    cfg = load_config(g.config);
  } else if (!preset.empty()) {
    cfg = preset_by_system(preset);
    // Without a config file the data recipe is the plain finite-difference one.
    cfg.derivative.method = DerivativeMethod::forward_euler;
  } else {
    throw ConfigError("give --config or --preset");
  }
  if (g.seed) cfg.seed = *g.seed;
  if (!g.out.empty()) cfg.output = g.out;
  return cfg;
}

Json meta_json(const std::string& command, const ExperimentConfig& cfg) {
  return Json{{"tool", "bsindy"},
              {"version", kToolVersion},
              {"command", command},
              {"seed", cfg.seed},
              {"config_hash", config_hash(cfg)},
              {"system", cfg.system.preset},
              {"params", cfg.system.params},
              {"noise", cfg.noise},
              {"derivative", to_string(cfg.derivative.method)}};
}

std::string file_label(const std::string& label) {
  std::string s;
  for (char c : label) s += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return s;
}

int cmd_simulate(const GlobalOptions& g, const SimulateOptions& o, std::ostream& out) {
  ExperimentConfig cfg = base_config(g, o.preset);
  if (o.dt) {
    cfg.time.dt = *o.dt;
    cfg.time.points.reset();
  }
  if (o.points) {
    cfg.time.points = *o.points;
    cfg.time.dt.reset();
  }
  if (o.T) cfg.time.t_end = cfg.time.t0 + *o.T;
  if (o.noise) cfg.noise = *o.noise;
  if (o.samples) cfg.samples = *o.samples;
  if (!o.x0.empty()) cfg.system.x0 = o.x0;
  if (!o.params.empty()) cfg.system.params = o.params;
  if (!o.derivative.empty()) cfg.derivative.method = parse_derivative_method(o.derivative);
  if (o.window) cfg.derivative.window = *o.window;
  cfg.validate();

  const Dataset data = simulate_dataset(cfg);
  const fs::path dir = cfg.output;
  save_dataset(dir, data);
  Json meta = meta_json("simulate", cfg);
  meta["rows"] = data.X.rows();
  meta["derivative_rows"] = data.Z.rows();
  meta["noise_seed"] = SeedPlan{cfg.seed}.noise();
  write_json(dir / "meta.json", meta);
  write_file_atomic(dir / "config.cfg", serialize_config(cfg));
  out << "wrote " << data.X.rows() << " trajectory rows and " << data.Z.rows() << " derivative rows to "
      << dir.string() << "\n";
  return 0;
}

int cmd_fit(const GlobalOptions& g, const FitOptions& o, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg = base_config(g, o.preset);
  if (!o.mode.empty()) {
    if (o.mode == "stls" && cfg.is_bayes()) cfg.fit = StlsSettings{};
    else if (o.mode == "bayes" && !cfg.is_bayes()) cfg.fit = BayesSettings{};
    else if (o.mode != "stls" && o.mode != "bayes") throw ConfigError("--mode must be stls or bayes");
  }
  if (auto* s = std::get_if<StlsSettings>(&cfg.fit)) {
    if (o.lambda) s->lambda = *o.lambda;
    if (o.k_max) s->k_max = *o.k_max;
    if (!o.activation.empty() || !o.alpha_update.empty() || o.alpha0 || o.iterations || o.burn_in ||
        !o.tau_w.empty()) {
      throw ConfigError("sampler flags need --mode bayes");
    }
  } else {
    auto& b = std::get<BayesSettings>(cfg.fit);
    if (o.lambda || o.k_max) throw ConfigError("--lambda / --k-max need --mode stls");
    if (!o.activation.empty()) b.activation = Activation::from_name(o.activation);
    if (!o.alpha_update.empty()) b.alpha_update = parse_alpha_update(o.alpha_update);
    if (o.alpha0) {
      b.alpha0 = *o.alpha0;
      b.sparsity.reset();
    }
    if (o.iterations) b.iterations = *o.iterations;
    if (o.burn_in) b.burn_in = *o.burn_in;
    if (!o.tau_w.empty()) {
      b.tau_w = o.tau_w == "auto" ? TauWSetting{} : TauWSetting{TauWSetting::Kind::fixed, parse_double(o.tau_w)};
    }
  }
  cfg.validate();

  const Dataset data = o.data.empty() ? simulate_dataset(cfg) : load_dataset(o.data);
  std::vector<int> eqs;
  for (int e : o.equations) eqs.push_back(e - 1);
  const FitOutcome fit = fit_dataset(cfg, data, eqs, g.jobs);

  const fs::path dir = cfg.output;
  const auto labels = fit.basis.labels();
  Json summary{{"mode", cfg.is_bayes() ? "bayes" : "stls"}, {"labels", labels}, {"equations", Json::array()}};
  for (const auto& eq : fit.equations) {
    const fs::path eq_dir = dir / ("eq" + std::to_string(eq.index + 1));
    Json entry{{"equation", eq.name}, {"index", eq.index + 1}};
    if (eq.stls) {
      entry["stls"] = stls_json(*eq.stls, labels);
      write_json(eq_dir / "stls.json", entry["stls"]);
      out << eq.name << ": support";
      for (auto j : eq.stls->support) out << " " << labels[static_cast<std::size_t>(j)];
      out << "\n";
    } else {
      entry["tau_w"] = eq.tau_w;
      entry["alpha0"] = eq.alpha0;
      entry["report"] = report_json(*eq.report, labels);
      write_chain(eq_dir, "chain", *eq.chain, fit.basis, eq.name);
      write_json(eq_dir / "report.json", entry["report"]);
      out << eq.name << ": median model";
      for (auto j : eq.report->median_model) out << " " << labels[static_cast<std::size_t>(j)];
      out << "\n";
      if (!eq.report->geweke_retained_below(2.0)) {
        err << "warning: " << eq.name << " has a retained coefficient with |Z| >= 2\n";
      }
    }
    summary["equations"].push_back(entry);
  }
  write_json(dir / "fit.json", summary);
  Json meta = meta_json("fit", cfg);
  meta["rows"] = fit.D.rows();
  meta["data"] = o.data.empty() ? "simulated" : "file";
  write_json(dir / "meta.json", meta);
  write_file_atomic(dir / "config.cfg", serialize_config(cfg));
  return 0;
}

int cmd_diagnose(const GlobalOptions& g, const DiagnoseOptions& o, std::ostream& out, std::ostream& err) {
  fs::path path = o.chain;
  if (fs::is_directory(path)) path /= "chain";
  StoredChain stored = read_chain(path);
  std::vector<std::string> warnings = stored.warnings;
  Chain& chain = stored.chain;
  if (chain.burn_in_index >= chain.size()) {
    warnings.push_back("no samples after burn-in; scores computed over the available burn-in rows");
    chain.burn_in_index = 0;
  }
  if (chain.size() == 0) throw NumericError("chain holds no samples");
  if (chain.size() - chain.burn_in_index < 20) warnings.push_back("fewer than 20 samples; Geweke scores undefined");
  const FitReport rep = summarize(chain, 0.9);
  const auto labels = stored.basis.labels();

  const fs::path dir = g.out.empty() ? path.parent_path() / "diagnostics" : fs::path(g.out);
  Json geweke = Json::array();
  for (std::size_t j = 0; j < labels.size(); ++j) {
    const auto& c = rep.coefficients[j];
    geweke.push_back({{"label", labels[j]},
                      {"z", c.geweke ? Json(*c.geweke) : Json(nullptr)},
                      {"inclusion", c.inclusion},
                      {"retained", c.inclusion > 0.5}});
  }
  const bool retained_ok = rep.geweke_retained_below(2.0);
  Json acceptance = Json::array();
  const Vector acc = chain.acceptance_rates();
  for (Eigen::Index j = 0; j < acc.size(); ++j) acceptance.push_back(acc(j));
  Json diag{{"equation", stored.equation},
            {"rows", chain.size()},
            {"burn_in_index", chain.burn_in_index},
            {"geweke", geweke},
            {"all_retained_below_2", retained_ok},
            {"all_below_2", rep.geweke_all_below(2.0)},
            {"acceptance", acceptance},
            {"report", report_json(rep, labels)},
            {"warnings", warnings}};
  write_json(dir / "diagnostics.json", diag);
  const Matrix post = chain.xi_post();
  for (std::size_t j = 0; j < labels.size(); ++j) {
    const Vector col = post.col(static_cast<Eigen::Index>(j));
    write_csv(dir / "hist" / (file_label(labels[j]) + ".csv"),
              histogram_table(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())), o.bins));
  }
  for (const auto& w : warnings) err << "warning: " << w << "\n";
  out << stored.equation << ": " << (retained_ok ? "all retained |Z| < 2" : "retained coefficient with |Z| >= 2")
      << "\n";
  return 0;
}

int cmd_predict(const GlobalOptions& g, const PredictOptions& o, std::ostream& out, std::ostream& err) {
  const fs::path run_dir = o.run;
  ExperimentConfig cfg = load_config(run_dir / "config.cfg");
  if (g.seed) cfg.seed = *g.seed;
  if (!cfg.is_bayes()) throw ConfigError("predict needs the output of a bayes fit");
  if (cfg.system.preset == "ishigami") throw ConfigError("predict needs a dynamical system");
  const int n = cfg.system.dim();
  std::vector<StoredChain> stored;
  for (int k = 0; k < n; ++k) {
    stored.push_back(read_chain(run_dir / ("eq" + std::to_string(k + 1)) / "chain"));
    for (const auto& w : stored.back().warnings) err << "warning: " << w << "\n";
  }
  std::vector<const Chain*> chains;
  for (const auto& s : stored) {
    if (s.basis != stored.front().basis) throw ConfigError("chains were fitted with different libraries");
    chains.push_back(&s.chain);
  }
  TimeConfig time = cfg.time;
  if (o.t_end) time.t_end = *o.t_end;
  if (o.dt) {
    time.dt = *o.dt;
    time.points.reset();
  }
  if (o.points) {
    time.points = *o.points;
    time.dt.reset();
  }
  std::vector<double> x0 = o.x0.empty() ? cfg.system.x0 : o.x0;
  if (static_cast<int>(x0.size()) != n) throw ConfigError("--x0 needs " + std::to_string(n) + " values");
  const long draws = o.draws.value_or(cfg.predict.draws);
  const double level = o.level.value_or(cfg.predict.level);
  if (draws < 1) throw ConfigError("--draws must be at least 1");
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("--level must lie in (0, 1)");
  const Vector x0v = Eigen::Map<const Vector>(x0.data(), n);
  const PredictiveEnsemble ens =
      predict_from_chains(cfg, stored.front().basis, chains, x0v, time.grid(), draws, level);

  const fs::path dir = g.out.empty() ? run_dir / "predict" : fs::path(g.out);
  const auto names = state_names_for(cfg);
  for (int k = 0; k < n; ++k) write_csv(dir / ("band_" + names[static_cast<std::size_t>(k)] + ".csv"), band_table(ens, k));
  write_json(dir / "predict.json", Json{{"draws", draws},
                                        {"retained", ens.trajectories.size()},
                                        {"diverged", ens.diverged},
                                        {"level", level},
                                        {"x0", x0},
                                        {"seed", SeedPlan{cfg.seed}.predict()}});
  out << "ensemble of " << ens.trajectories.size() << " trajectories (" << ens.diverged << " diverged) written to "
      << dir.string() << "\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse identification of nonlinear dynamics: STLS and neuronized-prior MCMC", "bsindy"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config, "Experiment config file");
  app.add_option("--seed", g.seed, "Top-level seed (overrides the config)");
  app.add_option("--out", g.out, "Output directory (overrides the config)");
  app.add_option("--jobs", g.jobs, "Equations fitted concurrently")->check(CLI::PositiveNumber);

  SimulateOptions so;
  auto* sim = app.add_subcommand("simulate", "Generate a trajectory and noisy derivative targets");
  sim->add_option("--preset", so.preset, "pendulum | lorenz | ishigami or a full preset name");
  sim->add_option("--dt", so.dt, "Sampling step");
  sim->add_option("--points", so.points, "Number of equally spaced samples (instead of --dt)");
  sim->add_option("--T", so.T, "Duration");
  sim->add_option("--noise", so.noise, "Derivative noise standard deviation");
  sim->add_option("--samples", so.samples, "Ishigami sample count");
  sim->add_option("--x0", so.x0, "Initial state")->delimiter(',');
  sim->add_option("--params", so.params, "System parameters")->delimiter(',');
  sim->add_option("--derivative", so.derivative, "analytic | forward-euler | central | smoothed-central");
  sim->add_option("--window", so.window, "Smoothing window (odd)");

  FitOptions fo;
  auto* fit = app.add_subcommand("fit", "Fit each equation by STLS or the neuronized-prior sampler");
  fit->add_option("--preset", fo.preset, "Preset used when no --config is given");
  fit->add_option("--data", fo.data, "Directory holding trajectory.csv and derivatives.csv (default: simulate)");
  fit->add_option("--mode", fo.mode, "stls | bayes");
  fit->add_option("--lambda", fo.lambda, "STLS threshold");
  fit->add_option("--k-max", fo.k_max, "STLS iteration cap");
  fit->add_option("--equations", fo.equations, "1-based equations to fit")->delimiter(',');
  fit->add_option("--activation", fo.activation, "identity | lasso | relu | horseshoe-fig1 | horseshoe-appendix");
  fit->add_option("--alpha0", fo.alpha0, "Activation shift");
  fit->add_option("--tau-w", fo.tau_w, "auto or a positive value");
  fit->add_option("--iterations", fo.iterations, "MCMC iterations");
  fit->add_option("--burn-in", fo.burn_in, "Burn-in fraction");
  fit->add_option("--alpha-update", fo.alpha_update, "metropolis | relu-exact");

  DiagnoseOptions dopt;
  auto* diag = app.add_subcommand("diagnose", "Geweke table, acceptance rates and histograms for a chain");
  diag->add_option("--chain", dopt.chain, "Chain CSV, sidecar, stem or equation directory")->required();
  diag->add_option("--bins", dopt.bins, "Histogram bins")->check(CLI::PositiveNumber);

  PredictOptions po;
  auto* pred = app.add_subcommand("predict", "Posterior-predictive band from a bayes fit");
  pred->add_option("--run", po.run, "Output directory of a bayes fit")->required();
  pred->add_option("--draws", po.draws, "Number of posterior draws");
  pred->add_option("--level", po.level, "Band level");
  pred->add_option("--x0", po.x0, "Initial state")->delimiter(',');
  pred->add_option("--t-end", po.t_end, "Final time");
  pred->add_option("--dt", po.dt, "Output step");
  pred->add_option("--points", po.points, "Number of output points (instead of --dt)");

  const std::string globals =
      "Global options (accepted before or after the command):\n"
      "  --config TEXT   Experiment config file\n"
      "  --seed UINT     Top-level seed (overrides the config)\n"
      "  --out TEXT      Output directory (overrides the config)\n"
      "  --jobs INT      Equations fitted concurrently";
  for (auto* sub : {sim, fit, diag, pred}) sub->footer(globals);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(g, so, out);
    if (fit->parsed()) return cmd_fit(g, fo, out, err);
    if (diag->parsed()) return cmd_diagnose(g, dopt, out, err);
    if (pred->parsed()) return cmd_predict(g, po, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}

}  // namespace bsindy
