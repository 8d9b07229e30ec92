#include "qcs/signals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include <nlohmann/json.hpp>

#include "qcs/error.hpp"

namespace qcs {

namespace {

void check_support(const std::vector<std::size_t>& support, std::size_t n) {
  require(!support.empty(), ErrorCode::InvalidSupport, "support is empty");
  std::vector<std::size_t> sorted = support;
  std::sort(sorted.begin(), sorted.end());
  require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), ErrorCode::InvalidSupport,
          "duplicate support index");
  require(sorted.back() < n, ErrorCode::InvalidSupport,
          "support index " + std::to_string(sorted.back()) + " outside [0, " + std::to_string(n) + ")");
}

}  // namespace

void SparseSignal::validate() const {
  require(dimension > 0, ErrorCode::InvalidArgument, "dimension must be positive");
  check_support(support, dimension);
  require(support.size() == amplitudes.size(), ErrorCode::InvalidSupport, "support/amplitude length mismatch");
  for (double a : amplitudes)
    require(a > 0.0 && std::isfinite(a), ErrorCode::InvalidArgument, "amplitudes must be positive and finite");
  require(period_s > 0.0 && std::isfinite(period_s), ErrorCode::InvalidArgument, "period must be positive");
  require(phases.empty() || phases.size() == support.size(), ErrorCode::InvalidArgument,
          "phase list length mismatch");
  if (domain == Domain::TimeSparse) {
    require(basis == Basis::Identity, ErrorCode::InvalidArgument, "time-sparse signals use the identity basis");
  } else {
    require(basis == Basis::Fourier, ErrorCode::InvalidArgument, "frequency-sparse signals use the Fourier basis");
    for (std::size_t k : support)
      require(2 * k <= dimension, ErrorCode::FrequencyOutOfRange, "harmonic above the grid Nyquist bin");
  }
}

double Waveform::max_rate() const noexcept {
  return rate.empty() ? 0.0 : *std::max_element(rate.begin(), rate.end());
}

double Waveform::mean_rate() const noexcept {
  if (rate.empty()) return 0.0;
  return std::accumulate(rate.begin(), rate.end(), 0.0) / static_cast<double>(rate.size());
}

double Waveform::at(double t_s) const noexcept {
  if (rate.empty()) return 0.0;
  double phase = std::fmod(t_s / period_s, 1.0);
  if (phase < 0.0) phase += 1.0;
  auto g = static_cast<std::size_t>(phase * static_cast<double>(rate.size()));
  return rate[std::min(g, rate.size() - 1)];
}

SparseSignal make_dirac_train(std::size_t n, std::vector<std::size_t> support, std::vector<double> amplitudes,
                              double period_s) {
  SparseSignal s;
  s.dimension = n;
  s.domain = Domain::TimeSparse;
  s.basis = Basis::Identity;
  s.support = std::move(support);
  s.amplitudes = std::move(amplitudes);
  s.period_s = period_s;
  s.validate();
  return s;
}

ToneSynthesis make_tone_signal(const ToneSet& tones, std::size_t n) {
  require(!tones.tones.empty(), ErrorCode::InvalidSupport, "tone set is empty");
  require(tones.window_s > 0.0, ErrorCode::InvalidArgument, "tone window must be positive");
  require(n > 0, ErrorCode::InvalidArgument, "grid size must be positive");
  const double nyquist_hz = static_cast<double>(n) / (2.0 * tones.window_s);

  ToneSynthesis out;
  SparseSignal& s = out.signal;
  s.dimension = n;
  s.domain = Domain::FrequencySparse;
  s.basis = Basis::Fourier;
  s.period_s = tones.window_s;
  bool any_phase = false;
  for (const Tone& tone : tones.tones) {
    require(tone.frequency_hz >= 0.0, ErrorCode::InvalidArgument, "tone frequency must be nonnegative");
    require(tone.frequency_hz <= nyquist_hz * (1.0 + 1e-12), ErrorCode::FrequencyOutOfRange,
            "tone at " + std::to_string(tone.frequency_hz) + " Hz exceeds grid Nyquist " +
                std::to_string(nyquist_hz) + " Hz");
    const double cycles = tone.frequency_hz * tones.window_s;
    const double bin = std::round(cycles);
    if (std::abs(cycles - bin) > 1e-9 * std::max(1.0, cycles)) out.snapped = true;
    s.support.push_back(static_cast<std::size_t>(bin));
    s.amplitudes.push_back(tone.amplitude);
    s.phases.push_back(tone.phase_rad);
    any_phase = any_phase || tone.phase_rad != 0.0;
  }
  if (!any_phase) s.phases.clear();
  s.validate();
  return out;
}

ToneSet make_comb(double first_hz, double spacing_hz, std::size_t count) {
  require(spacing_hz > 0.0 && count > 0, ErrorCode::InvalidArgument, "comb needs positive spacing and count");
  ToneSet set;
  set.window_s = 1.0 / spacing_hz;
  set.tones.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    set.tones.push_back({first_hz + spacing_hz * static_cast<double>(i), 1.0, 0.0});
  return set;
}

SparseSignal normalized(const SparseSignal& signal) {
  SparseSignal out = signal;
  double scale = 0.0;
  if (signal.domain == Domain::TimeSparse)
    scale = *std::max_element(signal.amplitudes.begin(), signal.amplitudes.end());
  else
    scale = std::accumulate(signal.amplitudes.begin(), signal.amplitudes.end(), 0.0);
  for (double& a : out.amplitudes) a /= scale;
  return out;
}

std::vector<double> evaluate(const SparseSignal& signal, std::size_t grid) {
  require(grid >= signal.dimension, ErrorCode::InvalidArgument, "grid must be at least the signal dimension");
  std::vector<double> x(grid, 0.0);
  const double n = static_cast<double>(signal.dimension);
  const double g_total = static_cast<double>(grid);
  if (signal.domain == Domain::TimeSparse) {
    for (std::size_t g = 0; g < grid; ++g) {
      // cell centre (g + 1/2)/grid of the period lands in bin floor(that * N)
      const auto bin = static_cast<std::size_t>((static_cast<double>(g) + 0.5) / g_total * n);
      for (std::size_t k = 0; k < signal.support.size(); ++k)
        if (signal.support[k] == bin) x[g] = signal.amplitudes[k];
    }
  } else {
    for (std::size_t k = 0; k < signal.support.size(); ++k) {
      const double h = static_cast<double>(signal.support[k]);
      for (std::size_t g = 0; g < grid; ++g) {
        const double t = (static_cast<double>(g) + 0.5) / g_total;
        x[g] += signal.amplitudes[k] * std::cos(2.0 * std::numbers::pi * h * t + signal.phase(k));
      }
    }
  }
  return x;
}

Waveform render_intensity(const SparseSignal& signal, const ModulationConfig& mod, std::size_t grid) {
  // The all-zero signal (no support) renders as the unmodulated carrier.
  if (signal.support.empty() && signal.amplitudes.empty()) {
    require(signal.dimension > 0 && signal.period_s > 0.0, ErrorCode::InvalidArgument,
            "zero signal still needs a dimension and period");
  } else {
    signal.validate();
  }
  require(mod.depth > 0.0 && mod.depth <= 1.0, ErrorCode::InvalidArgument, "modulation depth must be in (0, 1]");
  require(mod.mean_rate >= 0.0, ErrorCode::InvalidArgument, "mean rate must be nonnegative");
  const std::vector<double> x = evaluate(signal, grid);
  Waveform w;
  w.period_s = signal.period_s;
  w.rate.resize(grid);
  for (std::size_t g = 0; g < grid; ++g) {
    const double envelope = 1.0 + mod.depth * x[g];
    // Rounding noise around a zero crossing at full depth is not overdrive.
    require(envelope >= -1e-12, ErrorCode::ModulationOverdrive,
            "intensity goes negative; normalize the signal or reduce depth");
    w.rate[g] = mod.mean_rate * std::max(envelope, 0.0);
  }
  return w;
}

void to_json(nlohmann::json& j, const SparseSignal& s) {
  j = nlohmann::json{{"dimension", s.dimension},
                     {"domain", s.domain == Domain::TimeSparse ? "TimeSparse" : "FrequencySparse"},
                     {"support", s.support},
                     {"amplitudes", s.amplitudes},
                     {"period_s", s.period_s},
                     {"basis", s.basis == Basis::Identity ? "Identity" : "Fourier"}};
  if (!s.phases.empty()) j["phases"] = s.phases;
}

void from_json(const nlohmann::json& j, SparseSignal& s) {
  try {
    s.dimension = j.at("dimension").get<std::size_t>();
    const auto domain = j.at("domain").get<std::string>();
    if (domain == "TimeSparse")
      s.domain = Domain::TimeSparse;
    else if (domain == "FrequencySparse")
      s.domain = Domain::FrequencySparse;
    else
      fail(ErrorCode::ParseError, "unknown domain '" + domain + "'");
    const auto basis = j.at("basis").get<std::string>();
    if (basis == "Identity")
      s.basis = Basis::Identity;
    else if (basis == "Fourier")
      s.basis = Basis::Fourier;
    else
      fail(ErrorCode::ParseError, "unknown basis '" + basis + "'");
    s.support = j.at("support").get<std::vector<std::size_t>>();
    s.amplitudes = j.at("amplitudes").get<std::vector<double>>();
    s.period_s = j.at("period_s").get<double>();
    s.phases = j.contains("phases") ? j.at("phases").get<std::vector<double>>() : std::vector<double>{};
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, e.what());
  }
  s.validate();
}

}  // namespace qcs
