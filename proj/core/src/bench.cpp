#include "gencs/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include <fmt/format.h>

#include "gencs/error.hpp"
#include "gencs/metrics.hpp"

namespace gencs {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Recording {
  std::uint64_t seed = 0;
  SampledSignal signal;
  std::optional<GroundTruth> truth;
  std::optional<BeatTemplate> tmpl;
  std::string template_error;
};

Recording prepare(const BenchConfig& config, std::uint64_t seed) {
  std::optional<SampledSignal> sig;
  std::optional<GroundTruth> truth;
  if (config.recording) {
    const auto raw = read_signal_csv(*config.recording);
    sig = to_canonical_rate(raw);
    if (config.recording_truth) {
      const auto t = read_truth_csv(*config.recording_truth, raw.fs());
      std::vector<std::size_t> scaled;
      for (auto p : t.r_peaks()) {
        const auto q = static_cast<std::size_t>(std::llround(static_cast<double>(p) * kCanonicalFs / raw.fs()));
        if (q < sig->size() && (scaled.empty() || q > scaled.back())) scaled.push_back(q);
      }
      truth = GroundTruth(std::move(scaled), kCanonicalFs);
    }
  } else {
    auto ecg = synthesize_ecg(config.corpus.for_seed(seed));
    sig = std::move(ecg.signal);
    truth = std::move(ecg.truth);
  }

  Recording r{seed, std::move(*sig), std::move(truth), std::nullopt, {}};
  try {
    const auto len = std::min(r.signal.size(),
                              static_cast<std::size_t>(std::llround(config.corpus.learn_seconds * kCanonicalFs)));
    const auto snippet = window(r.signal, 0, len);
    r.tmpl = learn_template(snippet, locate_r_peaks(snippet, config.cs.variant, config.cs.detector));
  } catch (const ValidationError& e) {
    r.template_error = e.what();
  }
  return r;
}

void score(BenchRecord& rec, const Recording& data, const GroundTruth& peaks, const SampledSignal& estimate,
           double tol) {
  if (data.truth) {
    const auto m = rpeak_f1(peaks, *data.truth, tol);
    rec.rpeak_f1 = m.f1;
    rec.rr_rmse = m.rr_rmse;
  } else {
    rec.rpeak_f1 = kNaN;
    rec.rr_rmse = kNaN;
  }
  try {
    rec.prd = prd(data.signal, estimate);
  } catch (const ValidationError&) {
    rec.prd = kNaN;
  }
}

BenchRecord skipped(Method method, double cr, std::uint64_t seed, std::string note) {
  BenchRecord r;
  r.method = method;
  r.cr = cr;
  r.seed = seed;
  r.rpeak_f1 = r.rr_rmse = r.prd = kNaN;
  r.skipped = true;
  r.note = std::move(note);
  return r;
}

BenchRecord run_cs(const BenchConfig& config, const Recording& data, Method method, double cr) {
  CsConfig cs = config.cs;
  cs.cr = cr;
  cs.seed = data.seed;
  if (method == Method::kGenCs && !data.tmpl) {
    return skipped(method, cr, data.seed, "template: " + data.template_error);
  }
  const double ref_rr = data.tmpl ? data.tmpl->reference_rr : 1.0;
  try {
    cs.check(method, ref_rr, data.signal.fs());
  } catch (const ValidationError& e) {
    return skipped(method, cr, data.seed, e.what());
  }

  const auto start = std::chrono::steady_clock::now();
  const auto result = method == Method::kGenCs ? gencs_pipeline(data.signal, *data.tmpl, cs)
                                               : plain_cs_pipeline(data.signal, cs);
  const auto stop = std::chrono::steady_clock::now();

  BenchRecord rec;
  rec.method = method;
  rec.cr = cr;
  rec.seed = data.seed;
  score(rec, data, result.peaks, result.signal, config.peak_tol);
  rec.mac_count = result.mac_count;
  rec.transmitted_bits = result.transmitted_bits;
  rec.frames = result.frames.size();
  rec.sensed_samples = rec.frames * cs.frame;
  rec.sensing_macs = result.sensing_macs;
  rec.duration = data.signal.duration();
  if (config.record_wall_time) rec.wall_time = std::chrono::duration<double>(stop - start).count();
  return rec;
}

BenchRecord run_gemrem(const BenchConfig& config, const Recording& data) {
  if (!data.tmpl) return skipped(Method::kGemrem, 1.0, data.seed, "template: " + data.template_error);
  const auto start = std::chrono::steady_clock::now();
  const auto stream = gemrem_encode(data.signal, *data.tmpl, config.gemrem);
  const auto decoded = gemrem_decode_full(stream, data.signal.size(), data.signal.fs());
  const auto stop = std::chrono::steady_clock::now();

  const auto n = data.signal.size();
  BenchRecord rec;
  rec.method = Method::kGemrem;
  rec.seed = data.seed;
  rec.cr = gemrem_compression_ratio(stream, n, config.gemrem.bits).with_header;
  score(rec, data, decoded.peaks, decoded.signal, config.peak_tol);
  rec.mac_count = decoded.mac_count;
  rec.transmitted_bits = gemrem_header_bits(stream, config.gemrem.bits) + gemrem_payload_bits(stream, config.gemrem.bits);
  rec.frames = (n + config.cs.frame - 1) / config.cs.frame;
  rec.sensed_samples = n;
  rec.duration = data.signal.duration();
  if (config.record_wall_time) rec.wall_time = std::chrono::duration<double>(stop - start).count();
  return rec;
}

struct Task {
  Method method;
  double cr;
  std::size_t recording;
};

}  // namespace

SyntheticEcgSpec CorpusSpec::for_seed(std::uint64_t seed) const {
  SyntheticEcgSpec s;
  s.duration = duration;
  s.mean_hr = base_hr + hr_step * static_cast<double>((seed + 4) % 5);
  s.hr_jitter = hr_jitter;
  s.noise_std = noise_std;
  s.seed = seed;
  return s;
}

std::vector<BenchRecord> run_bench(const BenchConfig& config) {
  if (config.methods.empty()) throw ValidationError("bench: no methods configured");
  if (config.seeds.empty()) throw ValidationError("bench: no seeds configured");
  const bool needs_grid = std::any_of(config.methods.begin(), config.methods.end(),
                                      [](Method m) { return m != Method::kGemrem; });
  if (needs_grid && config.cr_grid.empty()) throw ValidationError("bench: empty CR grid");
  for (double cr : config.cr_grid) {
    if (!(cr >= 1.0) || !std::isfinite(cr)) throw ValidationError(fmt::format("bench: CR {} must be >= 1", cr));
  }
  if (!(config.peak_tol > 0.0)) throw ValidationError("bench: peak_tol must be positive");

  std::vector<Recording> data;
  data.reserve(config.seeds.size());
  for (auto seed : config.seeds) data.push_back(prepare(config, seed));

  std::vector<Task> tasks;
  for (auto method : config.methods) {
    for (std::size_t k = 0; k < data.size(); ++k) {
      if (method == Method::kGemrem) {
        tasks.push_back({method, 1.0, k});
        continue;
      }
      for (double cr : config.cr_grid) tasks.push_back({method, cr, k});
    }
  }

  std::vector<BenchRecord> out(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    while (true) {
      const auto i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        const auto& t = tasks[i];
        out[i] = t.method == Method::kGemrem ? run_gemrem(config, data[t.recording])
                                             : run_cs(config, data[t.recording], t.method, t.cr);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::size_t threads = config.threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : config.threads;
  threads = std::min(threads, tasks.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t k = 1; k < threads; ++k) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  std::sort(out.begin(), out.end(), [](const BenchRecord& a, const BenchRecord& b) {
    return std::make_tuple(to_string(a.method), a.cr, a.seed) < std::make_tuple(to_string(b.method), b.cr, b.seed);
  });
  return out;
}

std::string format_bench_csv(const std::vector<BenchRecord>& records) {
  fmt::memory_buffer buf;
  auto it = std::back_inserter(buf);
  fmt::format_to(it, "method,cr,seed,rpeak_f1,rr_rmse_s,prd_pct,mac_count,transmitted_bits,wall_time_s\n");
  for (const auto& r : records) {
    fmt::format_to(it, "{},{:.6g},{},{:.6f},{:.6f},{:.4f},{},{},{:.6f}\n", to_string(r.method), r.cr, r.seed,
                   r.rpeak_f1, r.rr_rmse, r.prd, r.mac_count, r.transmitted_bits, r.wall_time);
  }
  return fmt::to_string(buf);
}

std::vector<LifetimeRow> lifetime_proxy(const std::vector<BenchRecord>& records, double mac_budget) {
  if (records.empty()) throw ValidationError("lifetime_proxy: no records");
  if (!(mac_budget > 0.0)) throw ValidationError("lifetime_proxy: MAC budget must be positive");

  struct Acc {
    double macs_per_frame = 0.0;
    double fidelity = 0.0;
    std::size_t count = 0;
  };
  std::map<std::pair<std::string, double>, Acc> groups;
  for (const auto& r : records) {
    if (r.skipped) continue;
    if (r.frames == 0) throw ValidationError("lifetime_proxy: record without frames");
    auto& g = groups[{std::string(to_string(r.method)), r.cr}];
    g.macs_per_frame += static_cast<double>(r.mac_count) / static_cast<double>(r.frames);
    g.fidelity += r.method == Method::kPlainCs ? std::max(0.0, 1.0 - r.prd / 100.0) : r.rpeak_f1;
    ++g.count;
  }
  if (groups.empty()) throw ValidationError("lifetime_proxy: every record was skipped");

  std::vector<LifetimeRow> rows;
  for (const auto& [key, g] : groups) {
    const double per_frame = g.macs_per_frame / static_cast<double>(g.count);
    if (!(per_frame > 0.0)) {
      throw ValidationError(fmt::format("lifetime_proxy: zero MACs per frame for {} at CR {}", key.first, key.second));
    }
    rows.push_back({parse_method(key.first), key.second, mac_budget / per_frame,
                    g.fidelity / static_cast<double>(g.count), per_frame});
  }
  return rows;
}

std::string format_lifetime_csv(const std::vector<LifetimeRow>& rows) {
  fmt::memory_buffer buf;
  auto it = std::back_inserter(buf);
  fmt::format_to(it, "method,cr,frames_per_budget,fidelity\n");
  for (const auto& r : rows) {
    fmt::format_to(it, "{},{:.6g},{:.6f},{:.6f}\n", to_string(r.method), r.cr, r.frames_per_budget, r.fidelity);
  }
  return fmt::to_string(buf);
}

}  // namespace gencs
