#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace gencs {

struct SparseSolution {
  std::vector<double> coefficients;  // length n, zero off support
  std::vector<std::size_t> support;  // in selection order
  double residual_norm = 0.0;        // ||y - A * coefficients||_2
  std::size_t iterations = 0;
  std::uint64_t mac_count = 0;
  bool rank_deficient = false;       // an atom dependent on the support was rejected
  std::vector<double> residual_history;  // residual norm after each iteration
};

struct OmpOptions {
  std::size_t max_support = 0;
  double tol = 0.01;  // stop once ||r|| <= tol * ||y||
};

// Orthogonal matching pursuit.
//
// Each iteration picks the column with the largest normalised correlation with
// the residual and re-solves least squares on the accumulated support. The
// support basis is kept as an incrementally re-orthogonalised QR factorisation,
// so every step is an exact projection. A candidate atom numerically dependent on
// the support is rejected and flagged rather than ill-conditioning the solve.
//
// mac_count tallies every multiply-accumulate: correlations, orthogonalisation,
// residual updates, the final back-substitution and the residual check.
SparseSolution omp(const Eigen::MatrixXd& a, std::span<const double> y, const OmpOptions& options);

}  // namespace gencs
