#include "gencs/omp.hpp"

#include <cmath>

#include <fmt/format.h>

#include "gencs/error.hpp"

namespace gencs {

namespace {

// Relative size below which a candidate atom counts as lying in the span of the
// current support.
constexpr double kDependenceTolerance = 1e-10;

}  // namespace

SparseSolution omp(const Eigen::MatrixXd& a, std::span<const double> y, const OmpOptions& options) {
  const auto m = a.rows();
  const auto n = a.cols();
  if (static_cast<Eigen::Index>(y.size()) != m) {
    throw DimensionError(fmt::format("omp: dictionary has {} rows, measurement has {}", m, y.size()));
  }
  if (options.max_support > static_cast<std::size_t>(m) || options.max_support > static_cast<std::size_t>(n)) {
    throw ValidationError(fmt::format("omp: max_support {} exceeds dictionary size {}x{}",
                                      options.max_support, m, n));
  }
  if (!(options.tol >= 0.0)) throw ValidationError("omp: tol must be >= 0");

  const auto um = static_cast<std::uint64_t>(m);
  const auto un = static_cast<std::uint64_t>(n);
  SparseSolution sol;
  sol.coefficients.assign(static_cast<std::size_t>(n), 0.0);

  const Eigen::VectorXd norms = a.colwise().norm().transpose();
  sol.mac_count += um * un;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!(norms(j) > 0.0)) throw ValidationError(fmt::format("omp: dictionary column {} has zero norm", j));
  }

  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), m);
  const double y_norm = yv.norm();
  sol.mac_count += um;
  if (y_norm == 0.0) return sol;

  Eigen::VectorXd residual = yv;
  Eigen::MatrixXd q(m, std::min(m, n));
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(std::min(m, n), std::min(m, n));
  Eigen::VectorXd qty(std::min(m, n));
  std::vector<char> excluded(static_cast<std::size_t>(n), 0);
  Eigen::Index k = 0;
  double residual_norm = y_norm;

  while (static_cast<std::size_t>(k) < options.max_support && residual_norm > options.tol * y_norm) {
    const Eigen::VectorXd corr = a.transpose() * residual;
    sol.mac_count += um * un;
    Eigen::Index best = -1;
    double best_score = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (excluded[static_cast<std::size_t>(j)]) continue;
      const double score = std::abs(corr(j)) / norms(j);
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    if (best < 0) break;

    // Two passes of classical Gram-Schmidt against the current basis.
    Eigen::VectorXd v = a.col(best);
    Eigen::VectorXd proj = Eigen::VectorXd::Zero(k);
    for (int pass = 0; pass < 2 && k > 0; ++pass) {
      const Eigen::VectorXd c = q.leftCols(k).transpose() * v;
      v -= q.leftCols(k) * c;
      proj += c;
      sol.mac_count += 2 * um * static_cast<std::uint64_t>(k);
    }
    const double v_norm = v.norm();
    sol.mac_count += um;
    excluded[static_cast<std::size_t>(best)] = 1;
    ++sol.iterations;
    if (v_norm <= kDependenceTolerance * norms(best)) {
      sol.rank_deficient = true;
      sol.residual_history.push_back(residual_norm);
      continue;
    }

    q.col(k) = v / v_norm;
    r.col(k).head(k) = proj;
    r(k, k) = v_norm;
    const double step = q.col(k).dot(residual);
    qty(k) = step;
    residual -= step * q.col(k);
    residual_norm = residual.norm();
    sol.mac_count += 4 * um;
    sol.support.push_back(static_cast<std::size_t>(best));
    sol.residual_history.push_back(residual_norm);
    ++k;
  }

  if (k > 0) {
    const Eigen::VectorXd s =
        r.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(qty.head(k));
    sol.mac_count += static_cast<std::uint64_t>(k * (k + 1) / 2);
    Eigen::VectorXd fit = Eigen::VectorXd::Zero(m);
    for (Eigen::Index i = 0; i < k; ++i) {
      const auto col = static_cast<Eigen::Index>(sol.support[static_cast<std::size_t>(i)]);
      sol.coefficients[static_cast<std::size_t>(col)] = s(i);
      fit += s(i) * a.col(col);
    }
    sol.residual_norm = (yv - fit).norm();
    sol.mac_count += um * static_cast<std::uint64_t>(k) + um;
  } else {
    sol.residual_norm = y_norm;
  }
  return sol;
}

}  // namespace gencs
