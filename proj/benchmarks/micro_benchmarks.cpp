#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "gencs/beat_model.hpp"
#include "gencs/omp.hpp"
#include "gencs/pipeline.hpp"
#include "gencs/qrs_filter.hpp"
#include "gencs/sensing.hpp"
#include "gencs/synth.hpp"

namespace {

gencs::SampledSignal ecg(double seconds) {
  gencs::SyntheticEcgSpec spec;
  spec.duration = seconds;
  spec.hr_jitter = 0.05;
  spec.noise_std = 0.01;
  spec.seed = 11;
  return gencs::synthesize_ecg(spec).signal;
}

void BM_Cascade(benchmark::State& state) {
  const auto x = ecg(static_cast<double>(state.range(0)));
  for (auto _ : state) {
    auto z = gencs::bandstop_cascade(x);
    benchmark::DoNotOptimize(z);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(x.size()));
}
BENCHMARK(BM_Cascade)->Arg(2)->Arg(60);

// k-sparse recovery, m = n/2.
void BM_Omp(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = n / 2;
  const auto phi = gencs::bernoulli_matrix(m, n, 3);
  std::mt19937_64 rng(5);
  std::vector<double> s(n, 0.0);
  for (int k = 0; k < 8; ++k) s[rng() % n] = 1.0 + static_cast<double>(k);
  const auto y = gencs::measure(phi, s);
  gencs::OmpOptions opts{m / 4, 1e-9};
  for (auto _ : state) {
    auto sol = gencs::omp(phi.entries, y.values, opts);
    benchmark::DoNotOptimize(sol);
  }
}
BENCHMARK(BM_Omp)->Arg(64)->Arg(256)->Arg(512);

void BM_GencsPipeline(benchmark::State& state) {
  const auto x = ecg(30.0);
  const auto tmpl = gencs::default_template();
  gencs::CsConfig cs;
  cs.cr = static_cast<double>(state.range(0));
  for (auto _ : state) {
    auto r = gencs::gencs_pipeline(x, tmpl, cs);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_GencsPipeline)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_PlainCsPipeline(benchmark::State& state) {
  const auto x = ecg(30.0);
  gencs::CsConfig cs;
  cs.cr = static_cast<double>(state.range(0));
  for (auto _ : state) {
    auto r = gencs::plain_cs_pipeline(x, cs);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_PlainCsPipeline)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
