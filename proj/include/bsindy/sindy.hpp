#pragma once

#include <vector>

#include "bsindy/dynamics.hpp"

namespace bsindy {

/// Minimum-norm least-squares solution of D xi = z (complete orthogonal decomposition).
Vector least_squares(const Matrix& D, const Vector& z);

/// Least squares restricted to the columns in `support`; other entries are zero.
Vector restricted_least_squares(const Matrix& D, const Vector& z, const std::vector<Eigen::Index>& support);

struct StlsResult {
  Vector xi;
  std::vector<Eigen::Index> support;  ///< ascending
  int iterations = 0;                 ///< number of restricted re-solves
  double lambda = 0.0;
  bool converged = false;
};

/// Sequential thresholded least squares.
///
/// Starts from the least-squares solution and repeatedly drops every active
/// index with |xi_j| < lambda, re-solving on the remaining columns. Dropped
/// indices never return. Stops when no index is dropped (converged) or after
/// k_max re-solves. An empty active set yields the zero vector.
StlsResult stls(const Matrix& D, const Vector& z, double lambda, int k_max = 10);

}  // namespace bsindy
