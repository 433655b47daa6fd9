#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>

#include "bsindy/cli.hpp"
#include "bsindy/csv.hpp"
#include "bsindy/diagnostics.hpp"
#include "bsindy/library.hpp"
#include "bsindy/mcmc.hpp"
#include "bsindy/sindy.hpp"

using namespace bsindy;

namespace {

constexpr std::uint64_t kSweeps = 40;

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix A(rows, cols);
  for (Eigen::Index i = 0; i < A.size(); ++i) A.data()[i] = rng.normal();
  return A;
}

std::vector<double> draws(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

}  // namespace

TEST_CASE("random configurations survive serialization") {
  const auto names = preset_names();
  for (std::uint64_t s = 0; s < kSweeps; ++s) {
    Rng rng(s);
    auto cfg = preset_config(names[rng.uniform_index(names.size())]);
    cfg.seed = rng.engine()();
    cfg.noise = rng.uniform();
    if (cfg.is_bayes()) {
      auto& b = std::get<BayesSettings>(cfg.fit);
      b.iterations = 100 + static_cast<long>(rng.uniform_index(10000));
      b.alpha0 = rng.normal();
      b.burn_in = 0.5 * rng.uniform();
      b.sigma2 = {rng.uniform() < 0.5, 0.01 + rng.uniform(), 1.0 + rng.uniform(), rng.uniform()};
    } else {
      cfg.fit = StlsSettings{rng.uniform(), 1 + static_cast<int>(rng.uniform_index(20))};
    }
    INFO("sweep " << s);
    const auto text = serialize_config(cfg);
    CHECK(parse_config(text) == cfg);
    CHECK(serialize_config(parse_config(text)) == text);
  }
}

TEST_CASE("doubles survive text formatting bit for bit") {
  Rng rng(3);
  for (int i = 0; i < 20000; ++i) {
    const double x = std::bit_cast<double>(rng.engine()());
    if (!std::isfinite(x)) continue;
    CHECK(std::bit_cast<std::uint64_t>(parse_double(format_double(x))) == std::bit_cast<std::uint64_t>(x));
  }
}

TEST_CASE("quantiles are monotone and bounded") {
  for (std::uint64_t s = 0; s < kSweeps; ++s) {
    Rng rng(s);
    const auto v = draws(1 + rng.uniform_index(200), rng);
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    double prev = -std::numeric_limits<double>::infinity();
    for (double q = 0.0; q <= 1.0; q += 0.05) {
      const double x = quantile(v, q);
      CHECK(x >= prev);
      CHECK(x >= *lo);
      CHECK(x <= *hi);
      prev = x;
    }
    CHECK(quantile(v, 0.0) == *lo);
    CHECK(quantile(v, 1.0) == *hi);
  }
}

TEST_CASE("stls result is a thresholded fixed point") {
  for (std::uint64_t s = 0; s < kSweeps; ++s) {
    Rng rng(s);
    const auto m = 10 + static_cast<Eigen::Index>(rng.uniform_index(40));
    const auto p = 2 + static_cast<Eigen::Index>(rng.uniform_index(6));
    const Matrix D = gaussian_matrix(m, p, rng);
    const Vector z = gaussian_matrix(m, 1, rng);
    const double lambda = 0.3 * rng.uniform();
    const auto res = stls(D, z, lambda);
    if (!res.converged) continue;
    INFO("sweep " << s);
    for (Eigen::Index j = 0; j < p; ++j) {
      const bool active = std::find(res.support.begin(), res.support.end(), j) != res.support.end();
      if (active) {
        CHECK(std::abs(res.xi(j)) >= lambda);
      } else {
        CHECK(res.xi(j) == 0.0);
      }
    }
    if (!res.support.empty()) {
      CHECK((res.xi - restricted_least_squares(D, z, res.support)).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("least squares is equivariant to column scaling") {
  for (std::uint64_t s = 0; s < kSweeps; ++s) {
    Rng rng(s);
    const Matrix D = gaussian_matrix(30, 4, rng);
    const Vector z = gaussian_matrix(30, 1, rng);
    Vector scale(4);
    for (auto& c : scale) c = std::exp(2.0 * rng.normal());
    const Vector a = least_squares(D, z);
    const Vector b = least_squares(D * scale.asDiagonal(), z);
    CHECK((b.cwiseProduct(scale) - a).cwiseAbs().maxCoeff() <= 1e-8 * (1.0 + a.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("geweke score is affine invariant over seeds") {
  for (std::uint64_t s = 0; s < kSweeps; ++s) {
    Rng rng(s);
    const auto v = draws(2000, rng);
    const double a = 0.1 + 10.0 * rng.uniform(), b = 100.0 * rng.normal();
    std::vector<double> w(v.size());
    std::transform(v.begin(), v.end(), w.begin(), [&](double x) { return a * x + b; });
    CHECK(geweke_score(w) == doctest::Approx(geweke_score(v)).epsilon(1e-6));
  }
}

TEST_CASE("relu coefficients vanish exactly on the spike") {
  for (std::uint64_t s = 0; s < kSweeps; ++s) {
    Rng rng(s);
    const PriorConfig prior{Activation::relu(), rng.normal(), 1.0};
    Vector alpha(20), w(20);
    for (Eigen::Index j = 0; j < 20; ++j) {
      alpha(j) = rng.normal();
      w(j) = rng.normal();
    }
    const Vector xi = coefficients_from(prior, alpha, w);
    for (Eigen::Index j = 0; j < 20; ++j) CHECK((xi(j) == 0.0) == (alpha(j) <= prior.alpha0));
  }
}

TEST_CASE("activations are monotone and invertible") {
  for (const auto& act : {Activation::identity(), Activation::relu(), Activation::horseshoe_fig1(),
                          Activation::horseshoe_appendix()}) {
    Rng rng(9);
    for (int i = 0; i < 500; ++i) {
      const double x = 4.0 * rng.normal(), h = std::abs(rng.normal()) + 1e-3;
      CHECK(act(x + h) >= act(x));
      if (std::abs(x) < 3.0 && act(x) != 0.0) CHECK(act.inverse(act(x)) == doctest::Approx(x).epsilon(1e-8));
    }
  }
}

TEST_CASE("summaries are internally consistent") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    Rng rng(s);
    const Matrix D = gaussian_matrix(25, 4, rng);
    Vector truth(4);
    truth << 1.0, 0.0, -0.5, 0.0;
    const Vector z = D * truth + 0.2 * gaussian_matrix(25, 1, rng);
    ChainConfig cfg;
    cfg.prior = {Activation::relu(), 0.5, 1.0};
    cfg.iterations = 1500;
    cfg.seed = s;
    cfg.sigma2 = {true, 0.1, 1.0, 1.0};
    const Chain chain = run_chain(D, z, cfg);
    const auto r50 = summarize(chain, 0.5), r90 = summarize(chain, 0.9);
    for (std::size_t j = 0; j < 4; ++j) {
      const auto &a = r50.coefficients[j], &b = r90.coefficients[j];
      CHECK(a.inclusion >= 0.0);
      CHECK(a.inclusion <= 1.0);
      CHECK(a.lower <= a.upper);
      CHECK(b.lower <= a.lower);
      CHECK(b.upper >= a.upper);
      CHECK(a.std >= 0.0);
      const bool in_model = std::find(r50.median_model.begin(), r50.median_model.end(),
                                      static_cast<Eigen::Index>(j)) != r50.median_model.end();
      CHECK(in_model == (a.inclusion > 0.5));
    }
    CHECK(((chain.sigma2.array()) > 0.0).all());
    const Vector acc = chain.acceptance_rates();
    CHECK((acc.array() >= 0.0).all());
    CHECK((acc.array() <= 1.0).all());
  }
}

TEST_CASE("design rows follow state rows") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    Rng rng(s);
    const Matrix X = gaussian_matrix(12, 3, rng);
    std::vector<Eigen::Index> perm(12);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng.engine());
    Matrix Xp(12, 3);
    for (Eigen::Index i = 0; i < 12; ++i) Xp.row(i) = X.row(perm[static_cast<std::size_t>(i)]);
    const Matrix D = build_design(X, lorenz_basis()).D;
    const Matrix Dp = build_design(Xp, lorenz_basis()).D;
    for (Eigen::Index i = 0; i < 12; ++i) CHECK(Dp.row(i) == D.row(perm[static_cast<std::size_t>(i)]));
  }
}
