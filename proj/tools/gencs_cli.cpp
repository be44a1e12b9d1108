// gencs command-line front end. Every subcommand reads the flat config file
// (--config or $GENCS_CONFIG), applies --set overrides and then its own flags.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "gencs/bench.hpp"
#include "gencs/beat_model.hpp"
#include "gencs/config.hpp"
#include "gencs/error.hpp"
#include "gencs/gemrem.hpp"
#include "gencs/metrics.hpp"
#include "gencs/pipeline.hpp"
#include "gencs/qrs_filter.hpp"
#include "gencs/sensing.hpp"
#include "gencs/signal.hpp"
#include "gencs/synth.hpp"

namespace {

using namespace gencs;

// A flag that is just a shorthand for one config key.
struct KeyFlag {
  CLI::Option* option;
  std::string key;
  std::string value;
};

struct Context {
  std::optional<std::string> config_path;
  std::vector<std::string> overrides;
  std::vector<std::unique_ptr<KeyFlag>> flags;

  void key_flag(CLI::App* sub, const std::string& name, const std::string& key, const std::string& help) {
    auto f = std::make_unique<KeyFlag>();
    f->key = key;
    f->option = sub->add_option(name, f->value, help + " (config key " + key + ")");
    flags.push_back(std::move(f));
  }

  KeyValueConfig settings() const {
    auto kv = KeyValueConfig::load_default(config_path);
    for (const auto& o : overrides) kv.set(o);
    for (const auto& f : flags) {
      if (f->option->count() > 0) kv.set(f->key, f->value);
    }
    return kv;
  }
};

// Loads a recording at the canonical rate; truth indices are rescaled with it.
struct Recording {
  SampledSignal signal;
  std::optional<GroundTruth> truth;
};

Recording load_recording(const std::string& path, const std::string& truth_path) {
  const auto raw = read_signal_csv(path);
  Recording r{to_canonical_rate(raw), std::nullopt};
  if (!truth_path.empty()) {
    const auto t = read_truth_csv(truth_path, raw.fs());
    std::vector<std::size_t> scaled;
    for (auto p : t.r_peaks()) {
      const auto q = static_cast<std::size_t>(std::llround(static_cast<double>(p) * kCanonicalFs / raw.fs()));
      if (q < r.signal.size() && (scaled.empty() || q > scaled.back())) scaled.push_back(q);
    }
    r.truth = GroundTruth(std::move(scaled), kCanonicalFs);
  }
  return r;
}

void report_peaks(const GroundTruth& peaks, const std::optional<GroundTruth>& truth, double tol) {
  fmt::print("peaks: {}\n", peaks.size());
  if (!truth) return;
  const auto m = rpeak_f1(peaks, *truth, tol);
  fmt::print("rpeak_f1: {:.6f}\nprecision: {:.6f}\nrecall: {:.6f}\nrr_rmse_s: {:.6f}\n", m.f1, m.precision, m.recall,
             m.rr_rmse);
}

std::string frame_metrics_csv(const std::vector<FrameStats>& frames) {
  std::string out = "frame_id,residual_norm,iterations,mac_count\n";
  for (const auto& f : frames) {
    out += fmt::format("{},{:.17g},{},{}\n", f.frame_id, f.residual_norm, f.iterations, f.mac_count);
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"GenCS / GeMREM ECG compression toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Context ctx;
  app.add_option_function<std::string>(
      "-c,--config", [&](const std::string& p) { ctx.config_path = p; },
      fmt::format("flat key = value config file (default: ${})", kConfigEnvVar));
  app.add_option("-s,--set", ctx.overrides, "override a config key, key=value (repeatable)")
      ->expected(1)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);

  std::function<void()> action;

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic ECG and its R-peak truth");
  std::string synth_out, synth_truth;
  synth->add_option("-o,--out", synth_out, "signal CSV")->required();
  synth->add_option("--truth", synth_truth, "R-peak truth CSV");
  ctx.key_flag(synth, "--duration", "duration_s", "seconds");
  ctx.key_flag(synth, "--hr", "mean_hr", "mean heart rate, bpm");
  ctx.key_flag(synth, "--jitter", "hr_jitter", "fractional RR std-dev");
  ctx.key_flag(synth, "--noise", "noise_std", "white noise std-dev, mV");
  ctx.key_flag(synth, "--seed", "seed", "RNG seed");
  synth->callback([&] {
    action = [&] {
      const auto ecg = synthesize_ecg(synth_spec_from(ctx.settings()));
      write_signal_csv(synth_out, ecg.signal);
      if (!synth_truth.empty()) write_truth_csv(synth_truth, ecg.truth);
      fmt::print("samples: {}\nbeats: {}\n", ecg.signal.size(), ecg.truth.size());
    };
  });

  // learn
  auto* learn = app.add_subcommand("learn", "fit a beat template to a Nyquist-rate snippet");
  std::string learn_in, learn_truth, learn_out;
  learn->add_option("-i,--in", learn_in, "signal CSV")->required();
  learn->add_option("--truth", learn_truth, "R-peak CSV to segment with (default: detect)");
  learn->add_option("-o,--out", learn_out, "template file")->required();
  ctx.key_flag(learn, "--seconds", "learn_s", "leading seconds of the signal to use");
  learn->callback([&] {
    action = [&] {
      const auto kv = ctx.settings();
      const auto cs = cs_config_from(kv);
      const auto rec = load_recording(learn_in, learn_truth);
      const auto seconds = kv.get_double("learn_s", CorpusSpec{}.learn_seconds);
      if (!(seconds > 0.0)) throw ValidationError("learn_s must be positive");
      const auto len = std::min(rec.signal.size(), static_cast<std::size_t>(std::llround(seconds * kCanonicalFs)));
      const auto snippet = window(rec.signal, 0, len);
      GroundTruth peaks;
      if (rec.truth) {
        std::vector<std::size_t> inside;
        for (auto p : rec.truth->r_peaks()) {
          if (p < len) inside.push_back(p);
        }
        peaks = GroundTruth(std::move(inside), kCanonicalFs);
      } else {
        peaks = locate_r_peaks(snippet, cs.variant, cs.detector);
      }
      const auto tmpl = learn_template(snippet, peaks);
      write_template(learn_out, tmpl);
      fmt::print("beats: {}\nreference_rr: {:.6f}\nfit_residual: {:.6f}\nconverged: {}\n", peaks.size(),
                 tmpl.reference_rr, tmpl.fit_residual, tmpl.converged);
    };
  });

  // filter
  auto* filter = app.add_subcommand("filter", "run the band-stop cascade and detect R peaks");
  std::string filter_in, filter_out, filter_peaks;
  filter->add_option("-i,--in", filter_in, "signal CSV")->required();
  filter->add_option("-o,--out", filter_out, "filtered signal CSV")->required();
  filter->add_option("--peaks", filter_peaks, "delay-compensated R-peak CSV");
  ctx.key_flag(filter, "--variant", "filter_variant", "canonical or verbatim");
  filter->callback([&] {
    action = [&] {
      const auto cs = cs_config_from(ctx.settings());
      const auto x = to_canonical_rate(read_signal_csv(filter_in));
      const auto z = bandstop_cascade(x, cs.variant);
      write_signal_csv(filter_out, z);
      const auto peaks = compensate_delay(detect_r_peaks(z, cs.detector), cascade_group_delay(cs.variant));
      if (!filter_peaks.empty()) write_truth_csv(filter_peaks, peaks);
      fmt::print("samples: {}\npeaks: {}\n", z.size(), peaks.size());
    };
  });

  // compress
  auto* compress_cmd = app.add_subcommand("compress", "sense a signal frame by frame");
  std::string comp_in, comp_out, comp_template, comp_method = "gencs";
  compress_cmd->add_option("-i,--in", comp_in, "signal CSV")->required();
  compress_cmd->add_option("-o,--out", comp_out, "measurement CSV")->required();
  compress_cmd->add_option("-m,--method", comp_method, "gencs or plain_cs");
  compress_cmd->add_option("--template", comp_template, "template file; sets the GenCS support cap");
  ctx.key_flag(compress_cmd, "--cr", "cr", "nominal compression ratio n/m");
  ctx.key_flag(compress_cmd, "--seed", "seed", "sensing matrix seed");
  compress_cmd->callback([&] {
    action = [&] {
      const auto cs = cs_config_from(ctx.settings());
      const auto method = parse_method(comp_method);
      if (method == Method::kGemrem) throw ValidationError("compress: use the gemrem subcommand");
      const double ref_rr = comp_template.empty() ? 1.0 : read_template(comp_template).reference_rr;
      const auto x = to_canonical_rate(read_signal_csv(comp_in));
      const auto frames = compress(x, method, cs, ref_rr);
      write_measurements_csv(comp_out, frames);
      const auto m = cs.measurements();
      fmt::print("samples: {}\nframes: {}\nm: {}\ncr_bits: {:.6f}\n", x.size(), frames.size(), m,
                 compression_ratio(x.size(), cs.bits_per_sample,
                                   static_cast<std::uint64_t>(frames.size() * m * cs.measurement_bits)));
    };
  });

  // recover
  auto* recover = app.add_subcommand("recover", "recover a signal from measurements");
  std::string rec_in, rec_out, rec_template, rec_method = "gencs", rec_peaks, rec_metrics, rec_truth;
  std::size_t rec_samples = 0;
  recover->add_option("-i,--in", rec_in, "measurement CSV")->required();
  recover->add_option("-o,--out", rec_out, "recovered signal CSV")->required();
  recover->add_option("-m,--method", rec_method, "gencs or plain_cs");
  recover->add_option("--template", rec_template, "template file (required for gencs)");
  recover->add_option("-n,--samples", rec_samples, "original length (default: frames x frame)");
  recover->add_option("--peaks", rec_peaks, "R-peak CSV of the recovered signal");
  recover->add_option("--metrics", rec_metrics, "per-frame metrics CSV (default: <out>.frames.csv)");
  recover->add_option("--truth", rec_truth, "R-peak truth CSV at 200 Hz to score against");
  ctx.key_flag(recover, "--seed", "seed", "sensing matrix seed used by compress");
  recover->callback([&] {
    action = [&] {
      const auto kv = ctx.settings();
      auto cs = cs_config_from(kv);
      const auto method = parse_method(rec_method);
      const auto frames = read_measurements_csv(rec_in);
      if (frames.empty() || frames.front().values.empty()) throw ValidationError("recover: no measurements");
      // m comes from the file, so the ratio does too.
      cs.cr = static_cast<double>(cs.frame) / static_cast<double>(frames.front().values.size());
      const auto n = rec_samples > 0 ? rec_samples : frames.size() * cs.frame;
      PipelineResult result = [&] {
        if (method == Method::kGenCs) {
          if (rec_template.empty()) throw ValidationError("recover: gencs needs --template");
          return recover_gencs(frames, read_template(rec_template), n, cs);
        }
        if (method == Method::kPlainCs) return recover_plain(frames, n, cs);
        throw ValidationError("recover: use the gemrem subcommand");
      }();
      write_signal_csv(rec_out, result.signal);
      write_text_file(rec_metrics.empty() ? rec_out + ".frames.csv" : rec_metrics, frame_metrics_csv(result.frames));
      if (!rec_peaks.empty()) write_truth_csv(rec_peaks, result.peaks);
      std::optional<GroundTruth> truth;
      if (!rec_truth.empty()) truth = read_truth_csv(rec_truth, kCanonicalFs);
      fmt::print("samples: {}\nframes: {}\nmac_count: {}\n", n, result.frames.size(), result.mac_count);
      report_peaks(result.peaks, truth, kv.get_double("peak_tol_s", 0.05));
    };
  });

  // gemrem
  auto* gemrem = app.add_subcommand("gemrem", "model-based encoder and decoder");
  gemrem->require_subcommand(1);
  auto* encode = gemrem->add_subcommand("encode", "encode a signal against a template");
  std::string enc_in, enc_template, enc_out, enc_truth;
  encode->add_option("-i,--in", enc_in, "signal CSV")->required();
  encode->add_option("--template", enc_template, "template file")->required();
  encode->add_option("-o,--out", enc_out, "stream file")->required();
  encode->add_option("--truth", enc_truth, "use these R peaks instead of detecting them");
  ctx.key_flag(encode, "--hr-tol", "hr_tol", "relative RR tolerance");
  ctx.key_flag(encode, "--morph-tol", "morph_tol", "beat RMS tolerance, mV");
  encode->callback([&] {
    action = [&] {
      const auto opts = gemrem_options_from(ctx.settings());
      const auto rec = load_recording(enc_in, enc_truth);
      const auto tmpl = read_template(enc_template);
      const auto stream = rec.truth ? gemrem_encode(rec.signal, tmpl, *rec.truth, opts)
                                    : gemrem_encode(rec.signal, tmpl, opts);
      write_gemrem(enc_out, stream);
      const auto ratio = gemrem_compression_ratio(stream, rec.signal.size(), opts.bits);
      fmt::print("samples: {}\nbeats: {}\nupdates: {}\nescapes: {}\nheader_bits: {}\npayload_bits: {}\n",
                 rec.signal.size(), stream.beats, stream.updates.size(), stream.escapes.size(),
                 gemrem_header_bits(stream, opts.bits), gemrem_payload_bits(stream, opts.bits));
      fmt::print("cr: {:.6f}\ncr_without_header: {:.6f}\n", ratio.with_header, ratio.without_header);
    };
  });
  auto* decode = gemrem->add_subcommand("decode", "rebuild a signal from a stream");
  std::string dec_in, dec_out, dec_peaks;
  std::size_t dec_samples = 0;
  decode->add_option("-i,--in", dec_in, "stream file")->required();
  decode->add_option("-o,--out", dec_out, "signal CSV")->required();
  decode->add_option("-n,--samples", dec_samples, "output length")->required();
  decode->add_option("--peaks", dec_peaks, "decoded R-peak CSV");
  decode->callback([&] {
    action = [&] {
      const auto stream = read_gemrem(dec_in);
      const auto out = gemrem_decode_full(stream, dec_samples, stream.fs);
      write_signal_csv(dec_out, out.signal);
      if (!dec_peaks.empty()) write_truth_csv(dec_peaks, out.peaks);
      fmt::print("samples: {}\npeaks: {}\nmac_count: {}\n", out.signal.size(), out.peaks.size(), out.mac_count);
    };
  });

  // bench
  auto* bench = app.add_subcommand("bench", "sweep methods x CR x seeds");
  std::string bench_out = "bench.csv", bench_lifetime;
  bench->add_option("-o,--out", bench_out, "bench CSV");
  bench->add_option("--lifetime", bench_lifetime, "also write the lifetime table here");
  ctx.key_flag(bench, "--threads", "threads", "worker threads, 0 = all cores");
  bench->callback([&] {
    action = [&] {
      const auto kv = ctx.settings();
      const auto records = run_bench(bench_config_from(kv));
      write_text_file(bench_out, format_bench_csv(records));
      if (!bench_lifetime.empty()) {
        write_text_file(bench_lifetime, format_lifetime_csv(lifetime_proxy(records, mac_budget_from(kv))));
      }
      std::size_t skipped = 0;
      for (const auto& r : records) skipped += r.skipped ? 1 : 0;
      fmt::print("records: {}\nskipped: {}\n", records.size(), skipped);
    };
  });

  // lifetime
  auto* lifetime = app.add_subcommand("lifetime", "frames per MAC budget against fidelity");
  std::string life_out = "lifetime.csv", life_bench;
  lifetime->add_option("-o,--out", life_out, "lifetime CSV");
  lifetime->add_option("--bench", life_bench, "also write the underlying bench CSV here");
  ctx.key_flag(lifetime, "--budget", "mac_budget", "MAC budget");
  ctx.key_flag(lifetime, "--threads", "threads", "worker threads, 0 = all cores");
  lifetime->callback([&] {
    action = [&] {
      const auto kv = ctx.settings();
      const auto budget = mac_budget_from(kv);
      const auto records = run_bench(bench_config_from(kv));
      if (!life_bench.empty()) write_text_file(life_bench, format_bench_csv(records));
      const auto rows = lifetime_proxy(records, budget);
      write_text_file(life_out, format_lifetime_csv(rows));
      fmt::print("rows: {}\n", rows.size());
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::kValidation);
  }
  action();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const gencs::Error& e) {
    std::fprintf(stderr, "gencs: %s\n", e.what());
    return static_cast<int>(e.code());
  } catch (const std::bad_alloc&) {
    std::fprintf(stderr, "gencs: out of memory\n");
    return static_cast<int>(gencs::ExitCode::kNumerical);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "gencs: %s\n", e.what());
    return static_cast<int>(gencs::ExitCode::kNumerical);
  }
}
