#include "qcs/frontend.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qcs/error.hpp"

namespace qcs {

std::int64_t to_ps(double seconds) { return std::llround(seconds / kPicosecond); }

void JitterModel::validate() const {
  require(sigma_s >= 0.0 && tau_s >= 0.0, ErrorCode::InvalidArgument, "jitter sigma and tau must be nonnegative");
  require(!degenerate(), ErrorCode::InvalidArgument, "jitter model needs sigma > 0 or tau > 0");
}

void DetectorModel::validate() const {
  require(efficiency > 0.0 && efficiency <= 1.0, ErrorCode::InvalidArgument, "efficiency must be in (0, 1]");
  require(dark_rate >= 0.0, ErrorCode::InvalidArgument, "dark rate must be nonnegative");
  require(clock_skew > -1.0, ErrorCode::InvalidArgument, "clock skew must exceed -1");
  if (jitter) jitter->validate();
}

void PhotonStream::validate() const {
  require(span_ps >= 0, ErrorCode::InvalidArgument, "negative span");
  require(std::is_sorted(timestamps_ps.begin(), timestamps_ps.end()), ErrorCode::InvalidArgument,
          "timestamps not ascending");
  require(timestamps_ps.empty() || (timestamps_ps.front() >= 0 && timestamps_ps.back() <= span_ps),
          ErrorCode::InvalidArgument, "timestamp outside [0, span]");
}

namespace {

void check_waveform(const Waveform& waveform) {
  require(waveform.period_s > 0.0, ErrorCode::InvalidArgument, "waveform period must be positive");
  for (double r : waveform.rate)
    require(r >= 0.0 && std::isfinite(r), ErrorCode::InvalidIntensity, "waveform has a negative or non-finite rate");
}

std::int64_t clamp_ps(double t_s, std::int64_t span_ps) {
  return std::clamp<std::int64_t>(to_ps(t_s), 0, span_ps);
}

}  // namespace

PhotonStream sample_arrivals(const Waveform& waveform, double span_s, std::uint64_t seed) {
  check_waveform(waveform);
  require(span_s > 0.0, ErrorCode::InvalidArgument, "span must be positive");
  PhotonStream out;
  out.span_ps = to_ps(span_s);
  const double peak = waveform.max_rate();
  if (peak <= 0.0) return out;

  Rng rng = make_rng(seed);
  std::exponential_distribution<double> gap(peak);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  out.timestamps_ps.reserve(static_cast<std::size_t>(waveform.mean_rate() * span_s * 1.1) + 16);
  for (double t = gap(rng); t < span_s; t += gap(rng)) {
    if (unit(rng) * peak < waveform.at(t)) out.timestamps_ps.push_back(clamp_ps(t, out.span_ps));
  }
  return out;
}

PhotonStream sample_fixed_count(const Waveform& waveform, double span_s, std::size_t count, std::uint64_t seed) {
  check_waveform(waveform);
  require(span_s > 0.0, ErrorCode::InvalidArgument, "span must be positive");
  PhotonStream out;
  out.span_ps = to_ps(span_s);
  if (count == 0) return out;
  const double peak = waveform.max_rate();
  require(peak > 0.0, ErrorCode::InvalidIntensity, "cannot draw photons from a zero waveform");

  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  out.timestamps_ps.reserve(count);
  while (out.timestamps_ps.size() < count) {
    const double t = unit(rng) * span_s;
    if (unit(rng) * peak < waveform.at(t)) out.timestamps_ps.push_back(clamp_ps(t, out.span_ps));
  }
  std::sort(out.timestamps_ps.begin(), out.timestamps_ps.end());
  return out;
}

PhotonStream sample_pulse_detections(const SparseSignal& train, double p, std::size_t periods, std::uint64_t seed) {
  train.validate();
  require(train.domain == Domain::TimeSparse, ErrorCode::InvalidArgument, "pulse detection needs a time-sparse train");
  require(p >= 0.0 && p <= 1.0, ErrorCode::InvalidArgument, "detection probability must be in [0, 1]");
  PhotonStream out;
  out.span_ps = to_ps(train.period_s * static_cast<double>(periods));
  std::vector<std::size_t> order = train.support;
  std::sort(order.begin(), order.end());
  const double bin_s = train.period_s / static_cast<double>(train.dimension);

  Rng rng = make_rng(seed);
  std::bernoulli_distribution click(p);
  for (std::size_t period = 0; period < periods; ++period) {
    const double start = train.period_s * static_cast<double>(period);
    for (std::size_t bin : order)
      if (click(rng))
        out.timestamps_ps.push_back(clamp_ps(start + (static_cast<double>(bin) + 0.5) * bin_s, out.span_ps));
  }
  return out;
}

double sample_emg(const JitterModel& jitter, Rng& rng) {
  double t = jitter.mu_s;
  if (jitter.sigma_s > 0.0) t += std::normal_distribution<double>(0.0, jitter.sigma_s)(rng);
  if (jitter.tau_s > 0.0) t += std::exponential_distribution<double>(1.0 / jitter.tau_s)(rng);
  return t;
}

PhotonStream apply_detector(const PhotonStream& stream, const DetectorModel& det, std::uint64_t seed) {
  stream.validate();
  det.validate();
  Rng rng = make_rng(seed);
  std::bernoulli_distribution keep(det.efficiency);

  std::vector<std::int64_t> events;
  events.reserve(stream.count());
  for (std::int64_t t : stream.timestamps_ps)
    if (det.efficiency >= 1.0 || keep(rng)) events.push_back(t);

  if (det.dark_rate > 0.0 && stream.span_ps > 0) {
    const double mean = det.dark_rate * stream.span_s();
    const auto dark = std::poisson_distribution<std::int64_t>(mean)(rng);
    std::uniform_int_distribution<std::int64_t> where(0, stream.span_ps);
    for (std::int64_t i = 0; i < dark; ++i) events.push_back(where(rng));
  }

  const bool identity_timing = !det.jitter && det.clock_skew == 0.0;
  if (!identity_timing) {
    for (std::int64_t& t : events) {
      double t_ps = static_cast<double>(t);
      if (det.jitter) t_ps += sample_emg(*det.jitter, rng) / kPicosecond;
      t_ps *= 1.0 + det.clock_skew;
      t = t_ps < -1.0 || t_ps > static_cast<double>(stream.span_ps) + 1.0 ? -1 : std::llround(t_ps);
    }
  }

  PhotonStream out;
  out.span_ps = stream.span_ps;
  out.timestamps_ps.reserve(events.size());
  for (std::int64_t t : events)
    if (t >= 0 && t <= out.span_ps) out.timestamps_ps.push_back(t);
  std::sort(out.timestamps_ps.begin(), out.timestamps_ps.end());
  return out;
}

double click_probability(double mean_photons) {
  require(mean_photons >= 0.0 && !std::isnan(mean_photons), ErrorCode::InvalidArgument,
          "mean photon number must be nonnegative");
  return -std::expm1(-mean_photons);
}

}  // namespace qcs
