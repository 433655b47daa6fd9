#include "bsindy/sindy.hpp"

#include <cmath>

#include "bsindy/errors.hpp"

namespace bsindy {

Vector least_squares(const Matrix& D, const Vector& z) {
  if (D.rows() < 1) throw ConfigError("least squares needs at least one row");
  if (D.rows() != z.size()) {
    throw ConfigError("design has " + std::to_string(D.rows()) + " rows but target has " + std::to_string(z.size()));
  }
  if (!D.allFinite() || !z.allFinite()) throw ConfigError("least squares input is not finite");
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(D);
  return cod.solve(z);
}

Vector restricted_least_squares(const Matrix& D, const Vector& z, const std::vector<Eigen::Index>& support) {
  Vector xi = Vector::Zero(D.cols());
  if (support.empty()) return xi;
  Matrix sub(D.rows(), static_cast<Eigen::Index>(support.size()));
  for (std::size_t k = 0; k < support.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = D.col(support[k]);
  const Vector coef = least_squares(sub, z);
  for (std::size_t k = 0; k < support.size(); ++k) xi(support[k]) = coef(static_cast<Eigen::Index>(k));
  return xi;
}

StlsResult stls(const Matrix& D, const Vector& z, double lambda, int k_max) {
  if (!(lambda >= 0.0)) throw ConfigError("threshold lambda must be >= 0");
  if (k_max < 1) throw ConfigError("k_max must be >= 1");

  StlsResult res;
  res.lambda = lambda;
  res.xi = least_squares(D, z);
  for (Eigen::Index j = 0; j < D.cols(); ++j) res.support.push_back(j);

  for (int k = 1;; ++k) {
    std::vector<Eigen::Index> kept;
    for (auto j : res.support) {
      if (!(std::abs(res.xi(j)) < lambda)) kept.push_back(j);
    }
    if (kept.size() == res.support.size()) {
      res.converged = true;
      break;
    }
    if (k > k_max) break;
    res.support = std::move(kept);
    res.xi = restricted_least_squares(D, z, res.support);
    res.iterations = k;
  }
  return res;
}

}  // namespace bsindy
