#include "bsindy/persist.hpp"

#include <algorithm>
#include <cmath>

#include "bsindy/config.hpp"
#include "bsindy/errors.hpp"

namespace bsindy {

namespace fs = std::filesystem;

namespace {

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number_or_null(v(i)));
  return out;
}

[[noreturn]] void corrupt(const fs::path& path, const std::string& what) {
  throw IoError("chain file " + path.string() + ": " + what);
}

std::vector<std::string> chain_header(const std::vector<std::string>& labels) {
  std::vector<std::string> h{"iter"};
  for (const char* block : {"alpha", "w", "xi"}) {
    for (const auto& l : labels) h.push_back(std::string(block) + "[" + l + "]");
  }
  h.push_back("sigma2");
  return h;
}

}  // namespace

Table chain_table(const Chain& chain, const std::vector<std::string>& labels) {
  const Eigen::Index p = chain.xi.cols();
  if (static_cast<Eigen::Index>(labels.size()) != p) throw ConfigError("chain_table: label count mismatch");
  Table t;
  t.header = chain_header(labels);
  t.data.resize(chain.xi.rows(), 3 * p + 2);
  for (Eigen::Index r = 0; r < chain.xi.rows(); ++r) t.data(r, 0) = static_cast<double>(r);
  t.data.middleCols(1, p) = chain.alpha;
  t.data.middleCols(1 + p, p) = chain.w;
  t.data.middleCols(1 + 2 * p, p) = chain.xi;
  t.data.col(3 * p + 1) = chain.sigma2;
  return t;
}

Json chain_config_json(const ChainConfig& cfg) {
  const auto& act = cfg.prior.activation;
  return Json{{"activation", {{"name", act.name()}, {"a", act.a}, {"b", act.b}, {"c", act.c}}},
              {"alpha0", cfg.prior.alpha0},
              {"tau_w", cfg.prior.tau_w},
              {"iterations", cfg.iterations},
              {"burn_in", cfg.burn_in},
              {"rw_step", cfg.rw_step},
              {"rescale_step", cfg.rescale_step},
              {"sigma2",
               {{"learn", cfg.sigma2.learn}, {"value", cfg.sigma2.value}, {"a0", cfg.sigma2.a0}, {"b0", cfg.sigma2.b0}}},
              {"seed", cfg.seed},
              {"alpha_update", to_string(cfg.alpha_update)}};
}

ChainConfig chain_config_from_json(const Json& j) {
  ChainConfig cfg;
  const auto& a = j.at("activation");
  const auto name = a.at("name").get<std::string>();
  cfg.prior.activation = name == "horseshoe"
                             ? Activation::horseshoe(a.at("a").get<double>(), a.at("b").get<double>(),
                                                     a.at("c").get<double>())
                             : Activation::from_name(name);
  cfg.prior.alpha0 = j.at("alpha0").get<double>();
  cfg.prior.tau_w = j.at("tau_w").get<double>();
  cfg.iterations = j.at("iterations").get<long>();
  cfg.burn_in = j.at("burn_in").get<double>();
  cfg.rw_step = j.at("rw_step").get<double>();
  cfg.rescale_step = j.at("rescale_step").get<double>();
  const auto& s = j.at("sigma2");
  cfg.sigma2 = {s.at("learn").get<bool>(), s.at("value").get<double>(), s.at("a0").get<double>(),
                s.at("b0").get<double>()};
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.alpha_update = parse_alpha_update(j.at("alpha_update").get<std::string>());
  return cfg;
}

void write_json(const fs::path& path, const Json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

Json read_json(const fs::path& path) {
  const auto text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw IoError("cannot parse " + path.string() + ": " + e.what());
  }
}

void write_chain(const fs::path& dir, const std::string& stem, const Chain& chain, const BasisSpec& basis,
                 const std::string& equation) {
  const auto labels = basis.labels();
  Json geweke = Json::array();
  const Matrix post = chain.xi_post();
  for (Eigen::Index j = 0; j < post.cols(); ++j) {
    Json z = nullptr;
    if (post.rows() >= 20) {
      const Vector col = post.col(j);
      try {
        z = number_or_null(geweke_score(std::span<const double>(col.data(), static_cast<std::size_t>(col.size()))));
      } catch (const NumericError&) {
      }
    }
    geweke.push_back(z);
  }
  Json side{{"format", "bsindy-chain"},
            {"version", kChainFormatVersion},
            {"equation", equation},
            {"labels", labels},
            {"basis", serialize_basis(basis)},
            {"rows", chain.size()},
            {"burn_in_index", chain.burn_in_index},
            {"seed", chain.seed},
            {"proposals", chain.proposals},
            {"accepted", chain.accepted},
            {"acceptance", vector_json(chain.acceptance_rates())},
            {"geweke", geweke},
            {"config", chain_config_json(chain.config)}};
  write_csv(dir / (stem + ".csv"), chain_table(chain, labels));
  write_json(dir / (stem + ".json"), side);
}

StoredChain read_chain(const fs::path& path) {
  fs::path stem = path;
  if (stem.extension() == ".csv" || stem.extension() == ".json") stem.replace_extension();
  const fs::path csv = fs::path(stem).concat(".csv");
  const fs::path side_path = fs::path(stem).concat(".json");
  if (!fs::exists(csv)) throw IoError("chain file not found: " + csv.string());
  if (!fs::exists(side_path)) throw IoError("chain sidecar not found: " + side_path.string());

  const Json side = read_json(side_path);
  StoredChain out;
  std::vector<std::string> labels;
  long rows = 0;
  try {
    if (side.at("format").get<std::string>() != "bsindy-chain") corrupt(side_path, "not a chain sidecar");
    if (side.at("version").get<int>() != kChainFormatVersion) corrupt(side_path, "unsupported format version");
    labels = side.at("labels").get<std::vector<std::string>>();
    out.equation = side.at("equation").get<std::string>();
    out.basis = parse_basis(side.at("basis").get<std::string>());
    rows = side.at("rows").get<long>();
    out.chain.burn_in_index = side.at("burn_in_index").get<long>();
    out.chain.seed = side.at("seed").get<std::uint64_t>();
    out.chain.proposals = side.at("proposals").get<long>();
    out.chain.accepted = side.at("accepted").get<std::vector<long>>();
    out.chain.config = chain_config_from_json(side.at("config"));
  } catch (const Json::exception& e) {
    corrupt(side_path, e.what());
  } catch (const ConfigError& e) {
    corrupt(side_path, e.what());
  }
  if (out.basis.labels() != labels) corrupt(side_path, "labels do not match the basis");

  Table t;
  try {
    t = read_csv(csv);
  } catch (const ConfigError& e) {
    corrupt(csv, e.what());
  }
  const auto p = static_cast<Eigen::Index>(labels.size());
  if (t.header != chain_header(labels)) corrupt(csv, "columns do not match the sidecar labels");
  if (static_cast<Eigen::Index>(out.chain.accepted.size()) != p) corrupt(side_path, "accepted has wrong length");
  const Eigen::Index n = t.data.rows();
  if (n > rows) corrupt(csv, "holds more rows than the sidecar records");
  if (n < rows) {
    out.warnings.push_back("chain holds " + std::to_string(n) + " of " + std::to_string(rows) +
                           " recorded rows (truncated)");
  }
  for (Eigen::Index r = 0; r < n; ++r) {
    if (t.data(r, 0) != static_cast<double>(r)) corrupt(csv, "iteration column out of sequence");
  }
  out.chain.alpha = t.data.middleCols(1, p);
  out.chain.w = t.data.middleCols(1 + p, p);
  out.chain.xi = t.data.middleCols(1 + 2 * p, p);
  out.chain.sigma2 = t.data.col(3 * p + 1);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Vector xi = coefficients_from(out.chain.config.prior, out.chain.alpha.row(r).transpose(),
                                        out.chain.w.row(r).transpose());
    const Vector stored = out.chain.xi.row(r).transpose();
    if ((xi - stored).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + stored.cwiseAbs().maxCoeff())) {
      corrupt(csv, "xi column inconsistent with alpha and w at iteration " + std::to_string(r));
    }
  }
  return out;
}

Json report_json(const FitReport& report, const std::vector<std::string>& labels) {
  Json coefs = Json::array();
  for (std::size_t j = 0; j < report.coefficients.size(); ++j) {
    const auto& c = report.coefficients[j];
    coefs.push_back({{"label", labels.at(j)},
                     {"mean", c.mean},
                     {"std", c.std},
                     {"lower", c.lower},
                     {"upper", c.upper},
                     {"inclusion", c.inclusion},
                     {"geweke", c.geweke ? number_or_null(*c.geweke) : Json(nullptr)}});
  }
  Json median = Json::array();
  for (auto j : report.median_model) median.push_back(labels.at(static_cast<std::size_t>(j)));
  return Json{{"level", report.level},
              {"zero_tol", report.zero_tol},
              {"post_burn_in", report.post_burn_in},
              {"median_model", median},
              {"median_model_means", vector_json(report.median_model_means())},
              {"geweke_all_below_2", report.geweke_all_below(2.0)},
              {"geweke_retained_below_2", report.geweke_retained_below(2.0)},
              {"coefficients", coefs},
              {"config", chain_config_json(report.config)}};
}

Json stls_json(const StlsResult& result, const std::vector<std::string>& labels) {
  Json support = Json::array();
  for (auto j : result.support) support.push_back(labels.at(static_cast<std::size_t>(j)));
  Json coefs = Json::object();
  for (std::size_t j = 0; j < labels.size(); ++j) coefs[labels[j]] = result.xi(static_cast<Eigen::Index>(j));
  return Json{{"lambda", result.lambda},
              {"iterations", result.iterations},
              {"converged", result.converged},
              {"support", support},
              {"coefficients", coefs}};
}

Table band_table(const PredictiveEnsemble& ens, Eigen::Index var) {
  Table t;
  t.header = {"t", "mean", "lower", "upper"};
  t.data.resize(ens.t.size(), 4);
  t.data.col(0) = ens.t;
  t.data.col(1) = ens.mean.col(var);
  t.data.col(2) = ens.lower.col(var);
  t.data.col(3) = ens.upper.col(var);
  return t;
}

Table histogram_table(std::span<const double> values, int bins) {
  double lo = 0.0, hi = 0.0;
  if (!values.empty()) {
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    lo = *mn;
    hi = *mx;
  }
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const auto counts = histogram(values, lo, hi, bins);
  Table t;
  t.header = {"lo", "hi", "count"};
  t.data.resize(bins, 3);
  const double width = (hi - lo) / bins;
  for (int b = 0; b < bins; ++b) {
    t.data(b, 0) = lo + b * width;
    t.data(b, 1) = b + 1 == bins ? hi : lo + (b + 1) * width;
    t.data(b, 2) = static_cast<double>(counts[static_cast<std::size_t>(b)]);
  }
  return t;
}

}  // namespace bsindy
