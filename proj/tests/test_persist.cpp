#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "bsindy/csv.hpp"
#include "bsindy/errors.hpp"
#include "bsindy/persist.hpp"

using namespace bsindy;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("bsindy_persist_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

Chain small_chain() {
  Rng rng(3);
  Matrix D(25, 5);
  for (Eigen::Index i = 0; i < D.size(); ++i) D.data()[i] = rng.normal();
  Vector truth(5);
  truth << 1.0, 0, -2.0, 0, 0;
  Vector z = D * truth;
  for (auto& v : z) v += 0.1 * rng.normal();
  ChainConfig cfg;
  cfg.prior = {Activation::relu(), 0.5, 1.3};
  cfg.iterations = 200;
  cfg.seed = 77;
  cfg.sigma2 = {true, 0.5, 1.0, 1.0};
  return run_chain(D, z, cfg);
}

void replace_in_file(const fs::path& p, const std::string& from, const std::string& to) {
  std::string text = read_file(p);
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  text.replace(pos, from.size(), to);
  write_file_atomic(p, text);
}

}  // namespace

TEST_CASE("chain round trip is exact") {
  TempDir dir;
  const Chain chain = small_chain();
  const auto basis = pendulum_basis();
  write_chain(dir.path, "chain", chain, basis, "dx1");
  for (const auto& p : {dir.path / "chain.csv", dir.path / "chain.json", dir.path / "chain"}) {
    const auto stored = read_chain(p);
    CHECK(stored.equation == "dx1");
    CHECK(stored.basis == basis);
    CHECK(stored.warnings.empty());
    CHECK(stored.chain.xi == chain.xi);
    CHECK(stored.chain.alpha == chain.alpha);
    CHECK(stored.chain.w == chain.w);
    CHECK(stored.chain.sigma2 == chain.sigma2);
    CHECK(stored.chain.accepted == chain.accepted);
    CHECK(stored.chain.burn_in_index == chain.burn_in_index);
    CHECK(stored.chain.config == chain.config);
  }
  const Json side = read_json(dir.path / "chain.json");
  CHECK(side.at("version") == kChainFormatVersion);
  CHECK(side.at("labels").size() == 5);
}

TEST_CASE("chain configuration json round trip") {
  ChainConfig cfg;
  cfg.prior = {Activation::horseshoe(0.2, 0.4, -0.1), -0.3, 4.0};
  cfg.alpha_update = AlphaUpdate::metropolis;
  cfg.seed = 123456789012345ULL;
  cfg.rescale_step = 0.0;
  CHECK(chain_config_from_json(chain_config_json(cfg)) == cfg);
}

TEST_CASE("corrupt or mismatched chain files are rejected") {
  TempDir dir;
  const Chain chain = small_chain();
  auto fresh = [&]() { write_chain(dir.path, "c", chain, pendulum_basis(), "dx1"); };
  const fs::path csv = dir.path / "c.csv", side = dir.path / "c.json";

  CHECK_THROWS_AS(read_chain(dir.path / "missing"), IoError);

  fresh();
  fs::remove(side);
  CHECK_THROWS_AS(read_chain(csv), IoError);

  fresh();
  replace_in_file(side, "\"version\": 1", "\"version\": 7");
  CHECK_THROWS_AS(read_chain(csv), IoError);

  fresh();
  replace_in_file(side, "bsindy-chain", "other-format");
  CHECK_THROWS_AS(read_chain(csv), IoError);

  fresh();
  replace_in_file(side, "\"x1^2\"", "\"x9\"");
  CHECK_THROWS_AS(read_chain(csv), IoError);

  fresh();
  replace_in_file(csv, "xi[x1]", "xi[y1]");
  CHECK_THROWS_AS(read_chain(csv), IoError);

  fresh();
  write_file_atomic(side, "{ not json");
  CHECK_THROWS_AS(read_chain(csv), IoError);

  // extra rows beyond what the sidecar records
  fresh();
  std::string text = read_file(csv);
  const auto last = text.rfind('\n', text.size() - 2);
  text += text.substr(last + 1);
  write_file_atomic(csv, text);
  CHECK_THROWS_AS(read_chain(csv), IoError);

  // a coefficient that no longer equals T(alpha - alpha0) w
  fresh();
  Table t = read_csv(csv);
  t.data(10, t.column_index("xi[x2]")) += 0.5;
  write_csv(csv, t);
  CHECK_THROWS_AS(read_chain(csv), IoError);

  fresh();
  t = read_csv(csv);
  t.data(3, 0) = 99;
  write_csv(csv, t);
  CHECK_THROWS_AS(read_chain(csv), IoError);
}

TEST_CASE("truncated chain loads with a warning") {
  TempDir dir;
  const Chain chain = small_chain();
  write_chain(dir.path, "c", chain, pendulum_basis(), "dx1");
  Table t = read_csv(dir.path / "c.csv");
  t.data = t.data.topRows(50).eval();
  write_csv(dir.path / "c.csv", t);
  const auto stored = read_chain(dir.path / "c.csv");
  REQUIRE(stored.warnings.size() == 1);
  CHECK(stored.warnings[0].find("truncated") != std::string::npos);
  CHECK(stored.chain.size() == 50);
}

TEST_CASE("report and table writers") {
  const Chain chain = small_chain();
  const auto report = summarize(chain);
  const auto labels = pendulum_basis().labels();
  const Json j = report_json(report, labels);
  CHECK(j.at("coefficients").size() == 5);
  CHECK(j.at("coefficients")[0].at("label") == "x1");
  CHECK(j.contains("geweke_all_below_2"));
  CHECK(j.contains("geweke_retained_below_2"));

  StlsResult s;
  s.xi = Vector::Zero(5);
  s.xi(1) = 2.0;
  s.support = {1};
  s.lambda = 0.1;
  const Json sj = stls_json(s, labels);
  CHECK(sj.at("support").size() == 1);

  const std::vector<double> values{0.0, 0.5, 1.0, 1.0};
  const Table h = histogram_table(values, 2);
  CHECK(h.header == std::vector<std::string>{"lo", "hi", "count"});
  CHECK(h.data(0, 2) == 1.0);
  CHECK(h.data(1, 2) == 3.0);

  TempDir dir;
  write_json(dir.path / "r.json", j);
  CHECK(read_json(dir.path / "r.json") == j);
  CHECK_THROWS_AS(read_json(dir.path / "absent.json"), IoError);
}

TEST_CASE("csv numbers round trip bit for bit") {
  Table t;
  t.header = {"a", "b"};
  t.data.resize(3, 2);
  t.data << 0.1, -1e-300, 1.0 / 3.0, 6.02214076e23, -0.0, 123456789.123456789;
  const Table back = parse_csv(to_csv(t));
  CHECK(back.header == t.header);
  CHECK(back.data == t.data);
  CHECK(parse_double(format_double(0.1)) == 0.1);
  CHECK_THROWS_AS(parse_csv("a,b\n1,2,3\n"), ConfigError);
  CHECK_THROWS_AS(t.column_index("zzz"), ConfigError);
}
