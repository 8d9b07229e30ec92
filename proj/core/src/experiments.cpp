#include "qcs/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qcs/baseline.hpp"
#include "qcs/error.hpp"
#include "qcs/frontend.hpp"
#include "qcs/random.hpp"
#include "qcs/reconstruction.hpp"
#include "qcs/signals.hpp"
#include "qcs/time_lens.hpp"

namespace qcs::experiments {

namespace {

// Stream keys keep row groups of different experiments apart.
constexpr std::uint64_t kSuccessStream = 100;
constexpr std::uint64_t kMminStream = 200;
constexpr std::uint64_t kNmseStream = 300;
constexpr std::uint64_t kConfusionStream = 400;
constexpr std::uint64_t kDftStream = 500;
constexpr std::uint64_t kCombStream = 600;
constexpr std::uint64_t kResolutionStream = 700;
constexpr std::size_t kMaxSearchPoints = std::size_t{1} << 16;

std::uint64_t group_seed(std::uint64_t seed, std::uint64_t stream) { return derive_seed(seed, stream, 0); }
std::uint64_t trial_seed(std::uint64_t group, std::uint64_t index) { return derive_seed(group, 0, index); }

SparseSignal single_tone(double tone_hz, double window_s, std::size_t n) {
  ToneSet set;
  set.window_s = window_s;
  set.tones.push_back({tone_hz, 1.0, 0.0});
  return normalized(make_tone_signal(set, n).signal);
}

}  // namespace

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorCode::InsufficientData, "slope needs two or more points");
  std::vector<std::pair<double, double>> logs;
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0.0 && y[i] > 0.0, ErrorCode::InvalidArgument, "log-log slope needs positive values");
    logs.emplace_back(std::log10(x[i]), std::log10(y[i]));
  }
  double mx = 0.0, my = 0.0;
  for (const auto& [a, b] : logs) {
    mx += a;
    my += b;
  }
  mx /= static_cast<double>(logs.size());
  my /= static_cast<double>(logs.size());
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [a, b] : logs) {
    sxx += (a - mx) * (a - mx);
    sxy += (a - mx) * (b - my);
  }
  return sxy / sxx;
}

std::vector<SuccessPoint> success_vs_m(const SuccessVsMParams& params, std::uint64_t seed, unsigned threads) {
  require(!params.ks.empty(), ErrorCode::InvalidArgument, "no K values to sweep");
  require(!params.ms.empty() || !params.relative_ms.empty(), ErrorCode::InvalidArgument, "no M values to sweep");
  std::vector<SuccessPoint> out;
  for (std::size_t i = 0; i < params.ks.size(); ++i) {
    const std::size_t k = params.ks[i];
    std::vector<std::size_t> ms = params.ms;
    if (ms.empty()) {
      for (const RelativeM& r : params.relative_ms) {
        const double m = std::round(r.per_k * static_cast<double>(k) + r.offset);
        ms.push_back(static_cast<std::size_t>(std::max(1.0, m)));
      }
    }
    std::sort(ms.begin(), ms.end());
    ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
    CoverageScenario scenario;
    scenario.k = k;
    scenario.n = params.n;
    scenario.p = params.p;
    scenario.dark_per_period = params.dark_per_period;
    scenario.min_count = params.min_count;
    scenario.rule = params.rule;
    const std::uint64_t stream = kSuccessStream + i;
    for (const CoverageEstimate& e : coverage_curve(scenario, ms, params.trials, group_seed(seed, stream), threads))
      out.push_back({k, stream, e});
  }
  return out;
}

MminVsKResult mmin_vs_k(const MminVsKParams& params, std::uint64_t seed, unsigned threads) {
  MminVsKResult result;
  for (std::size_t c = 0; c < params.min_counts.size(); ++c) {
    std::vector<std::pair<double, double>> samples;
    for (std::size_t i = 0; i < params.ks.size(); ++i) {
      const std::size_t k = params.ks[i];
      const std::uint64_t stream = kMminStream + 1000 * c + i;
      MinMeasurementOptions options;
      options.trials = params.trials;
      options.n = params.n;
      options.dark_per_period = params.dark_per_period;
      options.threads = threads;
      MminPoint point;
      point.k = k;
      point.min_count = params.min_counts[c];
      point.stream = stream;
      point.m_min = min_measurements(k, params.p, params.target, point.min_count, group_seed(seed, stream), options);
      point.classical = classical_bound(k, params.bound_n, params.bound_c);
      result.points.push_back(point);
      samples.emplace_back(static_cast<double>(k), static_cast<double>(point.m_min));
    }
    if (samples.size() >= 3) result.fits.emplace_back(params.min_counts[c], fit_scaling(samples));
  }
  return result;
}

NmseVsMResult nmse_vs_m(const NmseVsMParams& params, std::uint64_t seed, unsigned threads) {
  require(params.trials >= 1, ErrorCode::InvalidArgument, "need at least one trial");
  const SparseSignal truth = single_tone(params.tone_hz, params.window_s, params.n);
  const Waveform waveform = render_intensity(truth, {params.depth, 1.0}, params.render_grid);

  NmseVsMResult result;
  std::vector<double> ms, rmses;
  for (std::size_t i = 0; i < params.ms.size(); ++i) {
    const std::size_t m = params.ms[i];
    const std::uint64_t stream = kNmseStream + i;
    const std::uint64_t group = group_seed(seed, stream);
    std::vector<double> nmse(params.trials, 0.0);
    std::vector<char> hit(params.trials, 0);
    parallel_for(params.trials, threads, [&](std::size_t t) {
      const PhotonStream photons = sample_fixed_count(waveform, params.span_s, m, trial_seed(group, t));
      const DftSpectrum spectrum = dft_estimate_harmonics(photons, params.window_s, params.n / 2);
      const SparseEstimate estimate = with_topk(spectral_estimate(spectrum, params.depth, params.n), 1);
      const ReconstructionResult r = reconstruct(estimate, Basis::Fourier, params.window_s, &truth);
      nmse[t] = *r.nmse;
      hit[t] = *r.success ? 1 : 0;
    });
    NmsePoint point;
    point.m = m;
    point.stream = stream;
    point.trials = params.trials;
    point.mean_nmse = std::accumulate(nmse.begin(), nmse.end(), 0.0) / static_cast<double>(params.trials);
    point.rmse = std::sqrt(point.mean_nmse);
    point.top1_rate = static_cast<double>(std::count(hit.begin(), hit.end(), 1)) / static_cast<double>(params.trials);
    result.points.push_back(point);
    ms.push_back(static_cast<double>(m));
    rmses.push_back(point.rmse);
  }
  if (ms.size() >= 2) result.loglog_slope = loglog_slope(ms, rmses);
  return result;
}

double background_for_accuracy(double accuracy, std::size_t tones) {
  require(tones >= 2, ErrorCode::InvalidArgument, "classification needs at least two tones");
  const double chance = 1.0 / static_cast<double>(tones);
  require(accuracy > chance && accuracy <= 1.0, ErrorCode::InvalidArgument,
          "target accuracy must lie above chance and at most 1");
  return (1.0 - accuracy) / (1.0 - chance);
}

ConfusionResult confusion_tls(const ConfusionParams& params, std::uint64_t seed, unsigned threads) {
  const std::size_t tones = params.tones_hz.size();
  require(tones >= 2, ErrorCode::InvalidArgument, "confusion experiment needs at least two tones");
  const TimeLensConfig lens = make_time_lens(params.phi_ddot_s2, params.window_s, params.bins);

  ConfusionResult result;
  result.background = params.background.value_or(background_for_accuracy(params.target_single_accuracy, tones));
  for (double f : params.tones_hz) result.tone_bins.push_back(lens_bin(frequency_to_time(f, lens), lens));
  {
    std::vector<std::size_t> sorted = result.tone_bins;
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), ErrorCode::InvalidArgument,
            "two tones share a lens time bin; increase the bin count");
  }

  for (std::size_t pi = 0; pi < params.photons.size(); ++pi) {
    const std::size_t photons = params.photons[pi];
    const std::uint64_t stream = kConfusionStream + pi;
    const std::uint64_t group = group_seed(seed, stream);
    const std::size_t total = tones * params.trials;
    std::vector<std::size_t> predicted(total, 0);
    parallel_for(total, threads, [&](std::size_t index) {
      const std::size_t truth = index / params.trials;
      ToneSet set;
      set.window_s = params.window_s;
      set.tones.push_back({params.tones_hz[truth], 1.0, 0.0});
      const std::uint64_t s = trial_seed(group, index);
      const PhotonStream stream_photons = tls_sample(set, lens, photons, result.background, s);
      const CountHistogram hist = bin_timestamps(stream_photons, params.bins, params.window_s);
      std::uint64_t best = 0;
      std::vector<std::size_t> leaders;
      for (std::size_t j = 0; j < tones; ++j) {
        const std::uint64_t c = hist.bins[result.tone_bins[j]];
        if (c > best || leaders.empty()) {
          if (c > best) leaders.clear();
          best = std::max(best, c);
        }
        if (c == best) leaders.push_back(j);
      }
      Rng tie = make_rng(derive_seed(s, 1, 0));
      predicted[index] = leaders[std::uniform_int_distribution<std::size_t>(0, leaders.size() - 1)(tie)];
    });

    ConfusionPoint point;
    point.photons = photons;
    point.stream = stream;
    point.confusion.assign(tones, std::vector<double>(tones, 0.0));
    std::size_t correct = 0;
    for (std::size_t index = 0; index < total; ++index) {
      const std::size_t truth = index / params.trials;
      point.confusion[truth][predicted[index]] += 1.0;
      if (predicted[index] == truth) ++correct;
    }
    for (auto& row : point.confusion)
      for (double& v : row) v /= static_cast<double>(params.trials);
    point.accuracy = static_cast<double>(correct) / static_cast<double>(total);
    std::tie(point.ci_lo, point.ci_hi) = wilson_interval(correct, total);
    result.points.push_back(std::move(point));
  }
  return result;
}

DftDemoResult dft_demo(const DftDemoParams& params, std::uint64_t seed, unsigned threads) {
  require(params.runs >= 1, ErrorCode::InvalidArgument, "need at least one run");
  const SparseSignal truth = single_tone(params.tone_hz, params.window_s, params.n);
  const Waveform waveform = render_intensity(truth, {params.depth, 1.0}, params.render_grid);

  DftDemoResult result;
  result.true_bin = truth.support.front();
  result.runs.resize(params.runs);
  const std::uint64_t group = group_seed(seed, kDftStream);
  std::vector<ReconstructionResult> first(1);
  std::vector<DftSpectrum> first_spectrum(1);
  parallel_for(params.runs, threads, [&](std::size_t run) {
    const PhotonStream photons = sample_fixed_count(waveform, params.span_s, params.photons, trial_seed(group, run));
    DftSpectrum spectrum = dft_estimate_harmonics(photons, params.window_s, params.n / 2);
    const SparseEstimate estimate = with_topk(spectral_estimate(spectrum, params.depth, params.n), 1);
    ReconstructionResult r = reconstruct(estimate, Basis::Fourier, params.window_s, &truth);
    result.runs[run] = {estimate.topk.front().first, *r.success, *r.nmse};
    if (run == 0) {
      first[0] = std::move(r);
      first_spectrum[0] = std::move(spectrum);
    }
  });
  for (const DftRun& run : result.runs) result.correct_runs += run.correct ? 1 : 0;
  result.frequencies_hz = first_spectrum[0].frequencies_hz;
  result.magnitudes = first_spectrum[0].magnitude;
  result.coefficients = first[0].estimate.coefficients;
  result.truth_waveform = evaluate(truth, params.n);
  result.reconstructed_waveform = first[0].waveform;

  if (params.comb) {
    const CombParams& comb = *params.comb;
    const ToneSet lines = make_comb(comb.first_hz, comb.spacing_hz, comb.count);
    const SparseSignal comb_truth = normalized(make_tone_signal(lines, comb.n).signal);
    const Waveform comb_wave = render_intensity(comb_truth, {params.depth, 1.0}, comb.render_grid);
    const PhotonStream photons =
        sample_fixed_count(comb_wave, lines.window_s * 100.0, comb.photons, trial_seed(group_seed(seed, kCombStream), 0));
    const DftSpectrum spectrum = dft_estimate_harmonics(photons, lines.window_s, comb.n / 2);
    const SparseEstimate estimate = with_topk(spectral_estimate(spectrum, params.depth, comb.n), comb.count);
    const ReconstructionResult r = reconstruct(estimate, Basis::Fourier, lines.window_s, &comb_truth);
    std::vector<std::size_t> truth_support = comb_truth.support;
    std::sort(truth_support.begin(), truth_support.end());
    std::size_t found = 0;
    for (std::size_t idx : r.support)
      if (std::binary_search(truth_support.begin(), truth_support.end(), idx)) ++found;
    result.has_comb = true;
    result.comb_recall = static_cast<double>(found) / static_cast<double>(comb.count);
    result.comb_nmse = *r.nmse;
    result.comb_coefficients = estimate.coefficients;
  }
  return result;
}

JitterBandwidthResult jitter_bandwidth(const JitterBandwidthParams& params) {
  JitterBandwidthResult result;
  for (double fwhm : params.fwhm_s) {
    require(fwhm > 0.0, ErrorCode::InvalidArgument, "FWHM must be positive");
    for (double ratio : params.tau_over_sigma) {
      require(ratio >= 0.0, ErrorCode::InvalidArgument, "tau/sigma must be nonnegative");
      // FWHM is linear in sigma at fixed tau/sigma.
      const double unit_fwhm = emg_fwhm({0.0, 1.0, ratio});
      BandwidthPoint point;
      point.fwhm_s = fwhm;
      point.tau_over_sigma = ratio;
      point.sigma_s = fwhm / unit_fwhm;
      point.tau_s = ratio * point.sigma_s;
      point.f3db_hz = bandwidth_3db({0.0, point.sigma_s, point.tau_s});
      point.product = point.f3db_hz * fwhm;
      result.points.push_back(point);
    }
    const JitterModel gaussian{0.0, gaussian_sigma_for_fwhm(fwhm), 0.0};
    for (double f = 0.0; f <= params.curve_max_hz * (1.0 + 1e-12); f += params.curve_step_hz)
      result.curve.push_back({fwhm, f, jitter_response(gaussian, f)});
  }
  return result;
}

std::vector<ResolutionPoint> resolution_vs_integration(const ResolutionParams& params, std::uint64_t seed,
                                                       unsigned threads) {
  require(params.search_points >= 3, ErrorCode::InvalidArgument, "need at least three search points");
  ToneSet set;
  set.window_s = 1.0 / params.tone_hz;
  set.tones.push_back({params.tone_hz, 1.0, 0.0});
  const SparseSignal tone = normalized(make_tone_signal(set, 2).signal);
  const Waveform waveform = render_intensity(tone, {params.depth, 1.0}, 1000);

  struct Job {
    std::size_t clock;
    std::size_t integration;
  };
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < params.clocks.size(); ++c)
    for (std::size_t i = 0; i < params.integration_s.size(); ++i) jobs.push_back({c, i});

  std::vector<ResolutionPoint> out(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t j) {
    const auto& [name, skew] = params.clocks[jobs[j].clock];
    const double span = params.integration_s[jobs[j].integration];
    const std::uint64_t stream = kResolutionStream + j;
    const std::uint64_t group = group_seed(seed, stream);
    const PhotonStream ideal = sample_fixed_count(waveform, span, params.photons, trial_seed(group, 0));
    DetectorModel clock;
    clock.clock_skew = skew;
    const PhotonStream observed = apply_detector(ideal, clock, trial_seed(group, 1));

    const double fourier = 1.0 / span;
    const double half_width = 4.0 * fourier + 3.0 * std::abs(skew) * params.tone_hz;
    // The main lobe is 1/T wide, so the grid step must not exceed 1/(2T).
    const double needed = std::ceil(4.0 * half_width * span) + 1.0;
    const std::size_t points =
        std::max(params.search_points, static_cast<std::size_t>(std::min(needed, double(kMaxSearchPoints))));
    std::vector<double> grid(points);
    for (std::size_t g = 0; g < grid.size(); ++g)
      grid[g] = params.tone_hz - half_width +
                2.0 * half_width * static_cast<double>(g) / static_cast<double>(grid.size() - 1);
    const DftSpectrum spectrum = dft_estimate(observed, grid);
    const auto peak = static_cast<std::size_t>(
        std::max_element(spectrum.magnitude.begin(), spectrum.magnitude.end()) - spectrum.magnitude.begin());

    ResolutionPoint& point = out[j];
    point.clock = name;
    point.skew = skew;
    point.integration_s = span;
    point.stream = stream;
    point.fourier_limit_hz = fourier;
    point.peak_offset_hz = std::abs(grid[peak] - params.tone_hz);
    point.resolution_hz = std::max(fourier, point.peak_offset_hz);
  });
  return out;
}

}  // namespace qcs::experiments
