#include <benchmark/benchmark.h>

#include "qcs/baseline.hpp"
#include "qcs/coverage.hpp"
#include "qcs/frontend.hpp"
#include "qcs/random.hpp"
#include "qcs/reconstruction.hpp"
#include "qcs/signals.hpp"

using namespace qcs;

namespace {

PhotonStream tone_photons(std::size_t photons) {
  const ToneSet tones{{{20e9, 1.0, 0.0}}, 1e-9};
  const SparseSignal x = normalized(make_tone_signal(tones, 64).signal);
  const Waveform w = render_intensity(x, {1.0, 1e9}, 4096);
  return sample_fixed_count(w, 1e-6, photons, 1);
}

void BM_CoverageMc(benchmark::State& state) {
  CoverageScenario s;
  s.k = static_cast<std::size_t>(state.range(0));
  s.n = std::size_t{1} << 15;
  s.p = 0.98;
  s.min_count = 2;
  s.rule = SuccessRule::ExactSupport;
  for (auto _ : state) benchmark::DoNotOptimize(coverage_mc(s, 3 * s.k, 1000, 1));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_CoverageMc)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_SuccessK3(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(success_k3(0.5, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_SuccessK3)->Arg(10)->Arg(10000);

void BM_SampleArrivals(benchmark::State& state) {
  const SparseSignal x = normalized(make_tone_signal({{{1e9, 1.0, 0.0}}, 1e-9}, 64).signal);
  const Waveform w = render_intensity(x, {1.0, 1e9}, 4096);
  const double span = static_cast<double>(state.range(0)) * 1e-9;
  std::size_t photons = 0;
  for (auto _ : state) {
    const PhotonStream p = sample_arrivals(w, span, 2);
    photons += p.count();
    benchmark::DoNotOptimize(p);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(photons));
}
BENCHMARK(BM_SampleArrivals)->Arg(10000)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_DftDirect(benchmark::State& state) {
  const PhotonStream p = tone_photons(static_cast<std::size_t>(state.range(0)));
  std::vector<double> freqs;
  for (std::size_t k = 0; k <= 32; ++k) freqs.push_back(static_cast<double>(k) * 1e9);
  for (auto _ : state) benchmark::DoNotOptimize(dft_estimate(p, freqs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DftDirect)->Arg(10000)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_DftHarmonics(benchmark::State& state) {
  const PhotonStream p = tone_photons(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dft_estimate_harmonics(p, 1e-9, 32));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DftHarmonics)->Arg(10000)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_Omp(benchmark::State& state) {
  const std::size_t n = 256, k = 8, m = static_cast<std::size_t>(state.range(0));
  const SensingMatrix theta = gaussian_sensing_matrix(m, n, 3);
  Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < k; ++i) s(static_cast<Eigen::Index>(31 * i + 5)) = 1.0 + static_cast<double>(i);
  const Eigen::VectorXd y = theta.entries * s;
  for (auto _ : state) benchmark::DoNotOptimize(omp_solve(theta, y, k));
}
BENCHMARK(BM_Omp)->Arg(32)->Arg(96);

}  // namespace

BENCHMARK_MAIN();
