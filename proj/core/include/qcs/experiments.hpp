#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qcs/coverage.hpp"

namespace qcs::experiments {

// Each sweep draws all randomness from `seed`. Row groups use their own
// stream key; trial t of a group replays from
// derive_seed(derive_seed(seed, stream, 0), 0, t).

/// M = a K + b, rounded to the nearest integer and clamped to >= 1.
struct RelativeM {
  double per_k = 1.0;
  double offset = 0.0;
};

struct SuccessVsMParams {
  std::size_t n = std::size_t{1} << 15;
  std::vector<std::size_t> ks{10};
  double p = 1.0;
  std::vector<std::size_t> ms;           // used for every K when non-empty
  std::vector<RelativeM> relative_ms;    // otherwise M per K from these
  std::size_t trials = 1000;
  std::uint64_t min_count = 2;
  double dark_per_period = 0.0;
  SuccessRule rule = SuccessRule::ExactSupport;
};

struct SuccessPoint {
  std::size_t k = 0;
  std::uint64_t stream = 0;
  CoverageEstimate estimate;
};

std::vector<SuccessPoint> success_vs_m(const SuccessVsMParams& params, std::uint64_t seed, unsigned threads = 1);

struct MminVsKParams {
  std::vector<std::size_t> ks{10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  double p = 0.98;
  double target = 0.95;
  std::vector<std::uint64_t> min_counts{1, 2};
  std::size_t trials = 2000;
  std::size_t n = std::size_t{1} << 15;
  double dark_per_period = 0.0;
  std::size_t bound_n = std::size_t{1} << 20;
  double bound_c = 1.0;
};

struct MminPoint {
  std::size_t k = 0;
  std::uint64_t min_count = 0;
  std::uint64_t stream = 0;
  std::size_t m_min = 0;
  std::size_t classical = 0;
};

struct MminVsKResult {
  std::vector<MminPoint> points;
  std::vector<std::pair<std::uint64_t, ScalingFit>> fits;   // per min_count
};

MminVsKResult mmin_vs_k(const MminVsKParams& params, std::uint64_t seed, unsigned threads = 1);

struct NmseVsMParams {
  double tone_hz = 1e9;
  double window_s = 1e-9;
  std::size_t n = 64;
  std::size_t render_grid = 4096;
  double depth = 1.0;
  double span_s = 1e-6;
  std::vector<std::size_t> ms{100, 1000, 10000, 100000, 1000000};
  std::size_t trials = 20;
};

struct NmsePoint {
  std::size_t m = 0;
  std::uint64_t stream = 0;
  std::size_t trials = 0;
  double mean_nmse = 0.0;
  double rmse = 0.0;
  double top1_rate = 0.0;
};

struct NmseVsMResult {
  std::vector<NmsePoint> points;
  double loglog_slope = 0.0;   // d log RMSE / d log M
};

NmseVsMResult nmse_vs_m(const NmseVsMParams& params, std::uint64_t seed, unsigned threads = 1);

struct ConfusionParams {
  std::vector<double> tones_hz{5.4e9, 16.2e9, 27.0e9, 37.8e9};
  double phi_ddot_s2 = 1074e-24;
  double window_s = 1024e-12;
  std::size_t bins = 1024;
  std::vector<std::size_t> photons{1, 2, 3, 4, 5, 6, 8, 10};
  std::size_t trials = 10000;                 // per true tone
  std::optional<double> background;           // fitted when absent
  double target_single_accuracy = 0.47;
};

struct ConfusionPoint {
  std::size_t photons = 0;
  std::uint64_t stream = 0;
  double accuracy = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  /// confusion[true][predicted] as row-normalized fractions.
  std::vector<std::vector<double>> confusion;
};

struct ConfusionResult {
  double background = 0.0;
  std::vector<std::size_t> tone_bins;
  std::vector<ConfusionPoint> points;
};

/// Background fraction at which argmax-over-tone-bins classification of a
/// single photon (uniform tie-break) is correct with probability `accuracy`:
/// accuracy = (1 - b) + b / tones.
double background_for_accuracy(double accuracy, std::size_t tones);

ConfusionResult confusion_tls(const ConfusionParams& params, std::uint64_t seed, unsigned threads = 1);

struct CombParams {
  double first_hz = 10e6;
  double spacing_hz = 10e6;
  std::size_t count = 830;
  std::size_t n = 2048;
  std::size_t render_grid = 16384;
  std::size_t photons = 10'000'000;
};

struct DftDemoParams {
  double tone_hz = 20e9;
  double window_s = 1e-9;
  std::size_t n = 64;
  std::size_t render_grid = 4096;
  double depth = 1.0;
  double span_s = 1e-6;
  std::size_t photons = 10000;
  std::size_t runs = 100;
  std::optional<CombParams> comb;
};

struct DftRun {
  std::size_t top_bin = 0;
  bool correct = false;
  double nmse = 0.0;
};

struct DftDemoResult {
  std::size_t true_bin = 0;
  std::vector<DftRun> runs;
  std::size_t correct_runs = 0;
  std::vector<double> frequencies_hz;          // run 0 spectrum
  std::vector<double> magnitudes;
  std::vector<double> coefficients;
  std::vector<double> truth_waveform;
  std::vector<double> reconstructed_waveform;
  // comb section
  bool has_comb = false;
  double comb_recall = 0.0;
  double comb_nmse = 0.0;
  std::vector<double> comb_coefficients;
};

DftDemoResult dft_demo(const DftDemoParams& params, std::uint64_t seed, unsigned threads = 1);

struct JitterBandwidthParams {
  std::vector<double> fwhm_s{45.3e-12, 20.2e-12, 3.0e-12};
  std::vector<double> tau_over_sigma{0.0, 0.25, 0.5, 1.0, 2.0};
  double curve_max_hz = 120e9;
  double curve_step_hz = 0.5e9;
};

struct BandwidthPoint {
  double fwhm_s = 0.0;
  double tau_over_sigma = 0.0;
  double sigma_s = 0.0;
  double tau_s = 0.0;
  double f3db_hz = 0.0;
  double product = 0.0;     // f3dB * FWHM
};

struct JitterBandwidthResult {
  std::vector<BandwidthPoint> points;
  std::vector<std::array<double, 3>> curve;   // (fwhm_s, f_hz, |H|), Gaussian shape
};

JitterBandwidthResult jitter_bandwidth(const JitterBandwidthParams& params);

struct ResolutionParams {
  double tone_hz = 1e9;
  std::vector<double> integration_s{1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0, 1000.0};
  std::vector<std::pair<std::string, double>> clocks{
      {"common", 0.0}, {"gps_locked", 3e-11}, {"free_running", 5e-9}};
  std::size_t photons = 4000;
  std::size_t search_points = 801;   // raised as needed to keep the step <= 1/(2T)
  double depth = 1.0;
};

struct ResolutionPoint {
  std::string clock;
  double skew = 0.0;
  double integration_s = 0.0;
  std::uint64_t stream = 0;
  double fourier_limit_hz = 0.0;
  double peak_offset_hz = 0.0;
  double resolution_hz = 0.0;
};

std::vector<ResolutionPoint> resolution_vs_integration(const ResolutionParams& params, std::uint64_t seed,
                                                       unsigned threads = 1);

/// Least-squares slope of log10(y) against log10(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qcs::experiments
