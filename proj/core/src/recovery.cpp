#include "gencs/recovery.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "gencs/error.hpp"

namespace gencs {

namespace {

constexpr double kNegligibleNorm = 1e-9;

Eigen::MatrixXd keep_columns(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& keep) {
  Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = m.col(keep[k]);
  return out;
}

}  // namespace

Eigen::MatrixXd truncated_synthesis(const WaveletBasis& basis, std::size_t rows) {
  basis.validate();
  if (basis.n < rows) {
    throw DimensionError(fmt::format("wavelet basis length {} shorter than {} samples", basis.n, rows));
  }
  const Eigen::MatrixXd top = dwt_matrix(basis).topRows(static_cast<Eigen::Index>(rows));
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < top.cols(); ++j) {
    if (top.col(j).norm() > kNegligibleNorm) keep.push_back(j);
  }
  return keep_columns(top, keep);
}

Dictionary plain_dictionary(const SensingMatrix& phi, const WaveletBasis& basis) {
  Dictionary d;
  d.synthesis = truncated_synthesis(basis, static_cast<std::size_t>(phi.n()));
  d.response = d.synthesis;
  d.atoms = phi.entries * d.synthesis;
  return d;
}

Dictionary filtered_dictionary(const SensingMatrix& phi, const FilterMatrix& f, const WaveletBasis& basis) {
  if (f.size() != phi.n()) {
    throw DimensionError(fmt::format("filtered_dictionary: Phi is {}x{}, F is {}x{}", phi.m(), phi.n(),
                                     f.entries.rows(), f.entries.cols()));
  }
  const Eigen::MatrixXd w = truncated_synthesis(basis, static_cast<std::size_t>(f.entries.cols()));
  const Eigen::MatrixXd fw = f.entries * w;
  // Scale-aware cut: the cascade's gain is O(100).
  const double scale = fw.colwise().norm().maxCoeff();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < fw.cols(); ++j) {
    if (fw.col(j).norm() > kNegligibleNorm * std::max(1.0, scale)) keep.push_back(j);
  }
  Dictionary d;
  d.synthesis = keep_columns(w, keep);
  d.response = keep_columns(fw, keep);
  d.atoms = phi.entries * d.response;
  d.filter = f.variant;
  return d;
}

FrameRecovery recover_frame(const Dictionary& dict, const MeasurementVector& y, const OmpOptions& options,
                            double fs) {
  auto solution = omp(dict.atoms, y.values, options);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(dict.synthesis.rows());
  Eigen::VectorXd z = Eigen::VectorXd::Zero(dict.response.rows());
  for (auto j : solution.support) {
    const auto col = static_cast<Eigen::Index>(j);
    u += solution.coefficients[j] * dict.synthesis.col(col);
    if (dict.filter) z += solution.coefficients[j] * dict.response.col(col);
  }
  if (!dict.filter) z = u;
  std::uint64_t per_atom = static_cast<std::uint64_t>(u.size());
  if (dict.filter) per_atom += static_cast<std::uint64_t>(z.size());
  const std::uint64_t macs = solution.mac_count + per_atom * solution.support.size();
  return {SampledSignal(std::vector<double>(z.data(), z.data() + z.size()), fs),
          SampledSignal(std::vector<double>(u.data(), u.data() + u.size()), fs), std::move(solution), macs};
}

FrameRecovery recover_filtered(const MeasurementVector& y, const SensingMatrix& phi, const FilterMatrix& f,
                               const WaveletBasis& basis, std::size_t max_support, double tol) {
  if (static_cast<Eigen::Index>(y.values.size()) != phi.m()) {
    throw DimensionError("recover_filtered: measurement length differs from Phi rows");
  }
  const auto dict = filtered_dictionary(phi, f, basis);
  return recover_frame(dict, y, {max_support, tol}, kCanonicalFs);
}

FrameRecovery recover_plain_cs(const MeasurementVector& y, const SensingMatrix& phi, const WaveletBasis& basis,
                               std::size_t max_support, double tol, double fs) {
  if (static_cast<Eigen::Index>(y.values.size()) != phi.m()) {
    throw DimensionError("recover_plain_cs: measurement length differs from Phi rows");
  }
  const auto dict = plain_dictionary(phi, basis);
  return recover_frame(dict, y, {max_support, tol}, fs);
}

}  // namespace gencs
