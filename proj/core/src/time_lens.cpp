#include "qcs/time_lens.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "qcs/error.hpp"

namespace qcs {

void TimeLensConfig::validate() const {
  require(phi_ddot_s2 != 0.0 && std::isfinite(phi_ddot_s2), ErrorCode::InvalidArgument, "dispersion must be nonzero");
  require(window_s > 0.0, ErrorCode::InvalidArgument, "lens window must be positive");
  require(bins > 0, ErrorCode::InvalidArgument, "lens needs at least one bin");
  require(std::abs(lens_strength * phi_ddot_s2 - 1.0) <= 1e-9, ErrorCode::InvalidArgument,
          "imaging condition C_L * phi_ddot = 1 violated");
}

TimeLensConfig make_time_lens(double phi_ddot_s2, double window_s, std::size_t bins) {
  require(phi_ddot_s2 != 0.0, ErrorCode::InvalidArgument, "dispersion must be nonzero");
  TimeLensConfig cfg{phi_ddot_s2, window_s, 1.0 / phi_ddot_s2, bins};
  cfg.validate();
  return cfg;
}

namespace {

void check_in_window(double t, const TimeLensConfig& cfg) {
  require(std::abs(t) <= 0.5 * cfg.window_s * (1.0 + 1e-12), ErrorCode::OutOfWindow,
          "lens time " + std::to_string(t) + " s outside the window of " + std::to_string(cfg.window_s) + " s");
}

}  // namespace

double frequency_to_time(double frequency_hz, const TimeLensConfig& cfg) {
  const double t = -2.0 * std::numbers::pi * cfg.phi_ddot_s2 * frequency_hz;
  check_in_window(t, cfg);
  return t;
}

double time_to_frequency(double time_s, const TimeLensConfig& cfg) {
  check_in_window(time_s, cfg);
  return -time_s / (2.0 * std::numbers::pi * cfg.phi_ddot_s2);
}

std::size_t lens_bin(double time_s, const TimeLensConfig& cfg) {
  check_in_window(time_s, cfg);
  const double offset = (time_s + 0.5 * cfg.window_s) / cfg.bin_width_s();
  return std::min(static_cast<std::size_t>(std::max(offset, 0.0)), cfg.bins - 1);
}

namespace {

struct Line {
  std::size_t bin;
  double power;
};

PhotonStream sample_lines(const std::vector<Line>& lines, const TimeLensConfig& cfg, std::size_t photons,
                          double background, std::uint64_t seed) {
  require(background >= 0.0 && background < 1.0, ErrorCode::InvalidArgument, "background fraction must be in [0, 1)");
  double total = 0.0;
  for (const Line& l : lines) total += l.power;
  require(total > 0.0, ErrorCode::InvalidSupport, "spectrum carries no power");

  PhotonStream out;
  out.span_ps = to_ps(cfg.window_s);
  require(out.span_ps > 0, ErrorCode::InvalidArgument, "lens window shorter than 1 ps");
  const auto bins = static_cast<std::int64_t>(cfg.bins);
  // Integer-ps range of bin j is [ceil(j T / bins), ceil((j+1) T / bins) - 1],
  // matching floor(t * bins / T) = j used by bin_timestamps.
  auto bin_lo = [&](std::int64_t j) { return (j * out.span_ps + bins - 1) / bins; };

  std::vector<double> weights;
  weights.reserve(lines.size());
  for (const Line& l : lines) weights.push_back(l.power);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::int64_t> anywhere(0, out.span_ps - 1);

  Rng rng = make_rng(seed);
  out.timestamps_ps.reserve(photons);
  for (std::size_t i = 0; i < photons; ++i) {
    if (background > 0.0 && unit(rng) < background) {
      out.timestamps_ps.push_back(anywhere(rng));
      continue;
    }
    const auto j = static_cast<std::int64_t>(lines[pick(rng)].bin);
    const std::int64_t lo = bin_lo(j);
    const std::int64_t hi = bin_lo(j + 1) - 1;
    // Bins narrower than the 1 ps timestamp resolution collapse onto lo.
    out.timestamps_ps.push_back(hi > lo ? std::uniform_int_distribution<std::int64_t>(lo, hi)(rng) : lo);
  }
  std::sort(out.timestamps_ps.begin(), out.timestamps_ps.end());
  return out;
}

}  // namespace

PhotonStream tls_sample(const ToneSet& spectrum, const TimeLensConfig& cfg, std::size_t photons, double background,
                        std::uint64_t seed) {
  cfg.validate();
  require(!spectrum.tones.empty(), ErrorCode::InvalidSupport, "empty spectrum");
  std::vector<Line> lines;
  for (const Tone& tone : spectrum.tones)
    lines.push_back({lens_bin(frequency_to_time(tone.frequency_hz, cfg), cfg), tone.amplitude * tone.amplitude});
  return sample_lines(lines, cfg, photons, background, seed);
}

PhotonStream tls_sample(const SparseSignal& spectrum, const TimeLensConfig& cfg, std::size_t photons,
                        double background, std::uint64_t seed) {
  cfg.validate();
  spectrum.validate();
  require(spectrum.domain == Domain::FrequencySparse, ErrorCode::InvalidArgument,
          "the time lens maps frequency-sparse signals");
  std::vector<Line> lines;
  for (std::size_t k = 0; k < spectrum.sparsity(); ++k) {
    const double f = static_cast<double>(spectrum.support[k]) / spectrum.period_s;
    const double a = spectrum.amplitudes[k];
    lines.push_back({lens_bin(frequency_to_time(f, cfg), cfg), a * a});
  }
  return sample_lines(lines, cfg, photons, background, seed);
}

}  // namespace qcs
