#include "gencs/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "gencs/error.hpp"
#include "text_util.hpp"

namespace gencs {

SensingMatrix bernoulli_matrix(std::size_t m, std::size_t n, std::uint64_t seed) {
  if (m == 0 || n == 0) throw ValidationError("bernoulli_matrix: m and n must be positive");
  if (m > n) throw ValidationError(fmt::format("bernoulli_matrix: m = {} exceeds n = {}", m, n));

  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  const auto rows = static_cast<Eigen::Index>(m);
  const auto cols = static_cast<Eigen::Index>(n);
  SensingMatrix phi{Eigen::MatrixXd(rows, cols), seed};
  std::mt19937_64 engine(seed);
  std::uint64_t bits = 0;
  int remaining = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (remaining == 0) {
        bits = engine();
        remaining = 64;
      }
      phi.entries(i, j) = (bits & 1U) ? scale : -scale;
      bits >>= 1;
      --remaining;
    }
  }
  return phi;
}

MeasurementVector measure(const SensingMatrix& phi, std::span<const double> x, std::size_t frame_id) {
  if (static_cast<Eigen::Index>(x.size()) != phi.n()) {
    throw DimensionError(fmt::format("measure: frame has {} samples, sensing matrix expects {}",
                                     x.size(), phi.n()));
  }
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::VectorXd y = phi.entries * xv;
  return {std::vector<double>(y.data(), y.data() + y.size()), frame_id};
}

MeasurementVector measure(const SensingMatrix& phi, const SampledSignal& x, std::size_t frame_id) {
  return measure(phi, x.samples(), frame_id);
}

SensingMatrix effective_matrix(const SensingMatrix& phi, const FilterMatrix& f) {
  if (f.entries.rows() != phi.n()) {
    throw DimensionError(fmt::format("effective_matrix: Phi is {}x{}, F is {}x{}", phi.m(), phi.n(),
                                     f.entries.rows(), f.entries.cols()));
  }
  return {phi.entries * f.entries, phi.seed};
}

std::vector<MeasurementVector> measure_filtered_stream(const SensingMatrix& phi, const SampledSignal& x,
                                                       FilterVariant variant) {
  const auto z = bandstop_cascade(x, variant);
  const auto n = static_cast<std::size_t>(phi.n());
  std::vector<MeasurementVector> out;
  std::vector<double> block(n);
  for (std::size_t start = 0, k = 0; start < z.size(); start += n, ++k) {
    std::fill(block.begin(), block.end(), 0.0);
    std::copy_n(z.values().begin() + static_cast<std::ptrdiff_t>(start), std::min(n, z.size() - start),
                block.begin());
    out.push_back(measure(phi, block, k));
  }
  return out;
}

std::size_t measurements_for_ratio(std::size_t n, double cr) {
  if (!(cr >= 1.0) || !std::isfinite(cr)) {
    throw ValidationError(fmt::format("compression ratio {} must be >= 1", cr));
  }
  return static_cast<std::size_t>(std::llround(static_cast<double>(n) / cr));
}

std::string format_measurements_csv(const std::vector<MeasurementVector>& frames) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "frame_id,k,value\n");
  for (const auto& f : frames) {
    for (std::size_t k = 0; k < f.values.size(); ++k) {
      fmt::format_to(std::back_inserter(buf), "{},{},{:.17g}\n", f.frame_id, k, f.values[k]);
    }
  }
  return fmt::to_string(buf);
}

std::vector<MeasurementVector> parse_measurements_csv(const std::string& text) {
  const auto rows = detail::lines(text);
  if (rows.empty() || rows.front() != "frame_id,k,value") {
    throw ParseError("measurement csv: expected header 'frame_id,k,value'");
  }
  std::vector<MeasurementVector> frames;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto cols = detail::split(rows[r], ',');
    if (cols.size() != 3) throw ParseError(fmt::format("measurement csv: row {} malformed", r));
    const auto frame = static_cast<std::size_t>(detail::parse_uint(cols[0], "measurement frame_id"));
    const auto k = static_cast<std::size_t>(detail::parse_uint(cols[1], "measurement k"));
    const double value = detail::parse_double(cols[2], "measurement value");
    if (frames.empty() || frames.back().frame_id != frame) {
      if (!frames.empty() && frame <= frames.back().frame_id) {
        throw ParseError(fmt::format("measurement csv: frame ids out of order at row {}", r));
      }
      frames.push_back({{}, frame});
    }
    if (k != frames.back().values.size()) {
      throw ParseError(fmt::format("measurement csv: expected k = {} at row {}", frames.back().values.size(), r));
    }
    frames.back().values.push_back(value);
  }
  return frames;
}

void write_measurements_csv(const std::string& path, const std::vector<MeasurementVector>& frames) {
  write_text_file(path, format_measurements_csv(frames));
}

std::vector<MeasurementVector> read_measurements_csv(const std::string& path) {
  return parse_measurements_csv(read_text_file(path));
}

}  // namespace gencs
