#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qcs/random.hpp"
#include "qcs/signals.hpp"

namespace qcs {

inline constexpr double kPicosecond = 1e-12;

/// Converts seconds to the nearest integer picosecond.
std::int64_t to_ps(double seconds);

/// Exponentially modified Gaussian detector response: a Gaussian of width
/// sigma around mu convolved with an exponential tail of time constant tau.
struct JitterModel {
  double mu_s = 0.0;
  double sigma_s = 0.0;
  double tau_s = 0.0;

  bool degenerate() const noexcept { return sigma_s == 0.0 && tau_s == 0.0; }
  void validate() const;
};

struct DetectorModel {
  double efficiency = 1.0;                // p in (0, 1]
  double dark_rate = 0.0;                 // counts per second
  std::optional<JitterModel> jitter;
  double clock_skew = 0.0;                // relative frequency offset

  void validate() const;
};

/// Detection timestamps in integer picoseconds, ascending, within [0, span_ps].
struct PhotonStream {
  std::vector<std::int64_t> timestamps_ps;
  std::int64_t span_ps = 0;

  std::size_t count() const noexcept { return timestamps_ps.size(); }
  double span_s() const noexcept { return static_cast<double>(span_ps) * kPicosecond; }
  bool empty() const noexcept { return timestamps_ps.empty(); }
  void validate() const;

  friend bool operator==(const PhotonStream&, const PhotonStream&) = default;
};

/// Inhomogeneous Poisson arrivals with rate `waveform` (repeated periodically)
/// over [0, span], by thinning a homogeneous process at the waveform maximum.
PhotonStream sample_arrivals(const Waveform& waveform, double span_s, std::uint64_t seed);

/// Exactly `count` arrivals drawn i.i.d. from the density proportional to the
/// waveform over [0, span]: the Poisson process conditioned on its count.
PhotonStream sample_fixed_count(const Waveform& waveform, double span_s, std::size_t count, std::uint64_t seed);

/// Bernoulli-per-pulse detection of a replayed pulse train: every pulse of
/// every period clicks independently with probability `p` and contributes at
/// most one timestamp, at the centre of its bin. Dead time is implicit; the
/// Poisson path above does not model it.
PhotonStream sample_pulse_detections(const SparseSignal& train, double p, std::size_t periods, std::uint64_t seed);

/// Applies efficiency thinning, dark counts, EMG jitter and clock skew, then
/// re-sorts and drops events that leave [0, span].
PhotonStream apply_detector(const PhotonStream& stream, const DetectorModel& det, std::uint64_t seed);

/// P(click) = 1 - exp(-mean_photons) for a coherent pulse.
double click_probability(double mean_photons);

/// Draws mu + N(0, sigma^2) + Exp(tau).
double sample_emg(const JitterModel& jitter, Rng& rng);

/// Writes "# span_ps=<int>" followed by one decimal timestamp per line.
void write_photon_stream(std::ostream& out, const PhotonStream& stream);
PhotonStream read_photon_stream(std::istream& in);
void save_photon_stream(const std::string& path, const PhotonStream& stream);
PhotonStream load_photon_stream(const std::string& path);

}  // namespace qcs
