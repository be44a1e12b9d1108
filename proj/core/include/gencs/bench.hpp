#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gencs/gemrem.hpp"
#include "gencs/pipeline.hpp"
#include "gencs/synth.hpp"

namespace gencs {

struct BenchRecord {
  Method method = Method::kGenCs;
  double cr = 1.0;  // grid n / m for CS methods; achieved bit ratio (header included) for gemrem
  std::uint64_t seed = 0;
  double rpeak_f1 = 0.0;
  double rr_rmse = 0.0;  // s
  double prd = 0.0;      // %
  std::uint64_t mac_count = 0;  // recovery path
  std::uint64_t transmitted_bits = 0;
  double wall_time = 0.0;  // s; 0 unless timing is enabled

  // Not written to bench.csv.
  std::uint64_t sensed_samples = 0;  // samples covered by the transmitted frames
  std::uint64_t frames = 0;
  std::uint64_t sensing_macs = 0;
  double duration = 0.0;  // s of signal recovered
  bool skipped = false;
  std::string note;
};

// Synthetic recording for one seed: heart rate steps through five levels.
struct CorpusSpec {
  double duration = 30.0;  // s
  double base_hr = 60.0;   // bpm
  double hr_step = 6.0;    // bpm per seed, cycling every five seeds
  double hr_jitter = 0.05;
  double noise_std = 0.01;  // mV
  double learn_seconds = 10.0;  // Nyquist-rate snippet used to learn the template

  SyntheticEcgSpec for_seed(std::uint64_t seed) const;
};

struct BenchConfig {
  std::vector<Method> methods{Method::kPlainCs, Method::kGemrem, Method::kGenCs};
  std::vector<double> cr_grid{2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0, 12.0, 16.0, 20.0, 24.0};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  CorpusSpec corpus{};
  // When set, every seed runs on this recording instead of a synthetic one.
  std::optional<std::string> recording;
  std::optional<std::string> recording_truth;
  CsConfig cs{};
  GemremOptions gemrem{};
  double peak_tol = 0.05;  // s
  std::size_t threads = 0;  // 0: hardware concurrency
  bool record_wall_time = false;
};

// One record per (method, cr, seed); gemrem has no CR knob and yields one record
// per seed. Infeasible grid points come back as skipped records. Sorted by
// (method name, cr, seed).
std::vector<BenchRecord> run_bench(const BenchConfig& config);

std::string format_bench_csv(const std::vector<BenchRecord>& records);

struct LifetimeRow {
  Method method = Method::kGenCs;
  double cr = 1.0;
  double frames_per_budget = 0.0;
  double fidelity = 0.0;  // F1 for gencs/gemrem, max(0, 1 - PRD/100) for plain CS; mean over seeds
  double mac_per_frame = 0.0;
};

// Groups non-skipped records by (method, cr); frames_per_budget = budget divided
// by the mean recovery MACs per frame.
std::vector<LifetimeRow> lifetime_proxy(const std::vector<BenchRecord>& records, double mac_budget);

std::string format_lifetime_csv(const std::vector<LifetimeRow>& rows);

}  // namespace gencs
