#pragma once

#include <cstddef>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace qcs {

enum class Domain { TimeSparse, FrequencySparse };
enum class Basis { Identity, Fourier };

/// A K-sparse signal of dimension N over one period.
///
/// TimeSparse signals are rectangular pulse trains: bin `support[k]` of width
/// period/N carries amplitude `amplitudes[k]`. FrequencySparse signals are
/// sums of cosines, x(t) = sum_k a_k cos(2 pi support[k] t / period + phase_k),
/// so support indices are harmonics of 1/period and must stay at or below N/2.
struct SparseSignal {
  std::size_t dimension = 0;
  Domain domain = Domain::TimeSparse;
  std::vector<std::size_t> support;
  std::vector<double> amplitudes;
  double period_s = 0.0;
  Basis basis = Basis::Identity;
  /// Per-tone phases in radians (FrequencySparse only). Empty means all zero.
  std::vector<double> phases;

  std::size_t sparsity() const noexcept { return support.size(); }
  double phase(std::size_t k) const noexcept { return phases.empty() ? 0.0 : phases[k]; }
  /// Throws InvalidSupport / InvalidArgument if any invariant is broken.
  void validate() const;
};

struct Tone {
  double frequency_hz = 0.0;
  double amplitude = 1.0;
  double phase_rad = 0.0;
};

struct ToneSet {
  std::vector<Tone> tones;
  double window_s = 0.0;
};

struct ModulationConfig {
  double depth = 1.0;           // m in (0, 1]
  double mean_rate = 1.0;       // counts per second at x = 0
};

/// Intensity sampled at cell centres t_g = (g + 1/2) * period / size().
struct Waveform {
  std::vector<double> rate;     // counts per second
  double period_s = 0.0;

  std::size_t size() const noexcept { return rate.size(); }
  double max_rate() const noexcept;
  double mean_rate() const noexcept;
  double at(double t_s) const noexcept;
};

SparseSignal make_dirac_train(std::size_t n, std::vector<std::size_t> support, std::vector<double> amplitudes,
                              double period_s);

struct ToneSynthesis {
  SparseSignal signal;
  /// True when at least one tone was not an integer number of cycles in the
  /// window and was moved to the nearest Fourier bin.
  bool snapped = false;
};

ToneSynthesis make_tone_signal(const ToneSet& tones, std::size_t n);

/// Equal-amplitude, zero-phase comb of `count` lines at `spacing_hz`, starting
/// at `first_hz`, in a window of one spacing period.
ToneSet make_comb(double first_hz, double spacing_hz, std::size_t count);

/// Scales amplitudes so that max |x(t)| = 1 (time) or sum of amplitudes = 1
/// (frequency, the exact peak for zero-phase cosines).
SparseSignal normalized(const SparseSignal& signal);

/// x evaluated at `grid` cell centres over one period.
std::vector<double> evaluate(const SparseSignal& signal, std::size_t grid);

/// lambda(t) = mean_rate * (1 + depth * x(t)); throws ModulationOverdrive if
/// any sample would go negative. A signal with no support renders as the
/// constant mean_rate.
Waveform render_intensity(const SparseSignal& signal, const ModulationConfig& mod, std::size_t grid);

void to_json(nlohmann::json& j, const SparseSignal& s);
void from_json(const nlohmann::json& j, SparseSignal& s);

}  // namespace qcs
