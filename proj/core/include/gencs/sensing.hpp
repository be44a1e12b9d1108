#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gencs/qrs_filter.hpp"
#include "gencs/signal.hpp"

namespace gencs {

// Bernoulli sensing matrix with i.i.d. equiprobable entries +-1/sqrt(m).
struct SensingMatrix {
  Eigen::MatrixXd entries;
  std::uint64_t seed = 0;

  Eigen::Index m() const { return entries.rows(); }
  Eigen::Index n() const { return entries.cols(); }
};

struct MeasurementVector {
  std::vector<double> values;
  std::size_t frame_id = 0;

  bool operator==(const MeasurementVector&) const = default;
};

// Signs come from successive bits of a seeded 64-bit Mersenne twister, filled
// row-major, so the matrix is identical on every platform.
SensingMatrix bernoulli_matrix(std::size_t m, std::size_t n, std::uint64_t seed);

// y = Phi * x.
MeasurementVector measure(const SensingMatrix& phi, std::span<const double> x, std::size_t frame_id = 0);
MeasurementVector measure(const SensingMatrix& phi, const SampledSignal& x, std::size_t frame_id = 0);

// A0 = Phi * F: sensing raw samples with A0 yields Phi applied to the
// band-stop-filtered frame. With a square F the frame starts from zero filter
// state; with history the input window reaches back f.history samples.
SensingMatrix effective_matrix(const SensingMatrix& phi, const FilterMatrix& f);

// Sensor loop: the cascade runs continuously over x (x at 200 Hz) and each
// consecutive block of phi.n() outputs is measured with phi; the last block is
// zero padded. Block k equals effective_matrix(phi, filter_matrix(n, variant,
// history)) applied to the raw window ending at the block's last sample, for
// any history covering the cascade's memory.
std::vector<MeasurementVector> measure_filtered_stream(const SensingMatrix& phi, const SampledSignal& x,
                                                       FilterVariant variant = FilterVariant::kCanonical);

// Number of measurements for a target sampling compression ratio n / m.
std::size_t measurements_for_ratio(std::size_t n, double cr);

// Multiply-accumulates of one measurement.
inline std::uint64_t sensing_macs(std::size_t m, std::size_t n) {
  return static_cast<std::uint64_t>(m) * n;
}

// Measurement dump: header `frame_id,k,value`, rows in frame then k order.
std::string format_measurements_csv(const std::vector<MeasurementVector>& frames);
std::vector<MeasurementVector> parse_measurements_csv(const std::string& text);
void write_measurements_csv(const std::string& path, const std::vector<MeasurementVector>& frames);
std::vector<MeasurementVector> read_measurements_csv(const std::string& path);

}  // namespace gencs
