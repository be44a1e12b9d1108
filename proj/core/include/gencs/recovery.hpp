#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gencs/omp.hpp"
#include "gencs/qrs_filter.hpp"
#include "gencs/sensing.hpp"
#include "gencs/signal.hpp"
#include "gencs/wavelet.hpp"

namespace gencs {

// First `rows` rows of W with the columns that vanish there removed (atoms
// supported only on the zero padding).
Eigen::MatrixXd truncated_synthesis(const WaveletBasis& basis, std::size_t rows);

// Recovery dictionary. Column k of `atoms` is Phi times column k of `response`.
struct Dictionary {
  Eigen::MatrixXd atoms;      // m x K, handed to the solver
  Eigen::MatrixXd synthesis;  // c x K, wavelet atoms over the input window
  Eigen::MatrixXd response;   // n x K, F * synthesis; equals synthesis without a filter
  std::optional<FilterVariant> filter;
};

// A = Phi * W (first n rows of W).
Dictionary plain_dictionary(const SensingMatrix& phi, const WaveletBasis& basis);

// A = Phi * F * W. F has n rows and c = n + history columns; W contributes its
// first c rows. Atoms whose filtered response vanishes are dropped.
Dictionary filtered_dictionary(const SensingMatrix& phi, const FilterMatrix& f, const WaveletBasis& basis);

struct FrameRecovery {
  SampledSignal signal;             // F * W * s for a filtered dictionary, W * s otherwise
  SampledSignal wavelet_component;  // W * s over the input window
  SparseSolution solution;
  std::uint64_t mac_count = 0;      // solver plus synthesis
};

FrameRecovery recover_frame(const Dictionary& dict, const MeasurementVector& y, const OmpOptions& options,
                            double fs = kCanonicalFs);

// Builds A = Phi * F * W, solves for s and returns the morphology-suppressed
// frame F * W * s.
FrameRecovery recover_filtered(const MeasurementVector& y, const SensingMatrix& phi, const FilterMatrix& f,
                               const WaveletBasis& basis, std::size_t max_support, double tol);

// Builds A = Phi * W and returns the raw frame W * s.
FrameRecovery recover_plain_cs(const MeasurementVector& y, const SensingMatrix& phi, const WaveletBasis& basis,
                               std::size_t max_support, double tol, double fs = kCanonicalFs);

}  // namespace gencs
