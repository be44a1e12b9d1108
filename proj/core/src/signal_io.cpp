#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "gencs/error.hpp"
#include "gencs/signal.hpp"
#include "text_util.hpp"

namespace gencs {

namespace {

constexpr double kSpacingTolerance = 1e-6;  // seconds

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

SampledSignal parse_signal_csv(const std::string& text) {
  const auto rows = detail::lines(text);
  if (rows.empty() || detail::trim(rows.front()) != "time_s,mv") {
    throw ParseError("signal csv: expected header 'time_s,mv'");
  }
  if (rows.size() < 3) {
    throw ParseError("signal csv: need at least two samples to infer the sampling rate");
  }
  std::vector<double> times;
  std::vector<double> values;
  times.reserve(rows.size() - 1);
  values.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto cols = detail::split(rows[r], ',');
    if (cols.size() != 2) {
      throw ParseError(fmt::format("signal csv: row {} has {} columns, expected 2", r, cols.size()));
    }
    times.push_back(detail::parse_double(cols[0], "signal csv time_s"));
    values.push_back(detail::parse_double(cols[1], "signal csv mv"));
  }

  const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  if (!(dt > 0.0)) throw ValidationError("signal csv: time must increase");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (std::abs((times[i] - times[i - 1]) - dt) > kSpacingTolerance) {
      throw ValidationError(
          fmt::format("signal csv: non-uniform sampling at row {} (step {} s, expected {} s)", i + 1,
                      times[i] - times[i - 1], dt));
    }
  }
  // Printed timestamps carry rounding noise; snap the inferred rate to 1 uHz.
  const double fs = std::round(1e6 / dt) / 1e6;
  return SampledSignal(std::move(values), fs);
}

std::string format_signal_csv(const SampledSignal& sig) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "time_s,mv\n");
  for (std::size_t i = 0; i < sig.size(); ++i) {
    fmt::format_to(std::back_inserter(buf), "{:.9f},{:.17g}\n",
                   static_cast<double>(i) / sig.fs(), sig[i]);
  }
  return fmt::to_string(buf);
}

SampledSignal read_signal_csv(const std::string& path) {
  return parse_signal_csv(read_text_file(path));
}

void write_signal_csv(const std::string& path, const SampledSignal& sig) {
  write_text_file(path, format_signal_csv(sig));
}

GroundTruth read_truth_csv(const std::string& path, double fs) {
  const auto text = read_text_file(path);
  const auto rows = detail::lines(text);
  if (rows.empty() || rows.front() != "r_peak_index") {
    throw ParseError("truth csv: expected header 'r_peak_index'");
  }
  std::vector<std::size_t> peaks;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    peaks.push_back(static_cast<std::size_t>(detail::parse_uint(rows[r], "truth csv")));
  }
  return GroundTruth(std::move(peaks), fs);
}

void write_truth_csv(const std::string& path, const GroundTruth& truth) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "r_peak_index\n");
  for (auto p : truth.r_peaks()) fmt::format_to(std::back_inserter(buf), "{}\n", p);
  write_text_file(path, fmt::to_string(buf));
}

}  // namespace gencs
