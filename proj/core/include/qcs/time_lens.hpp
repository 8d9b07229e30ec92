#pragma once

#include <cstddef>
#include <cstdint>

#include "qcs/frontend.hpp"
#include "qcs/signals.hpp"

namespace qcs {

/// Time-lens spectrometer at its imaging condition: lens strength is always
/// 1 / phi_ddot. The window [-T/2, T/2] is divided into `bins` time bins.
struct TimeLensConfig {
  double phi_ddot_s2 = 0.0;
  double window_s = 0.0;
  double lens_strength = 0.0;   // s^-2
  std::size_t bins = 1024;

  double bin_width_s() const noexcept { return window_s / static_cast<double>(bins); }
  void validate() const;
};

TimeLensConfig make_time_lens(double phi_ddot_s2, double window_s, std::size_t bins = 1024);

/// t = -2 pi phi_ddot f; throws OutOfWindow if |t| > T/2.
double frequency_to_time(double frequency_hz, const TimeLensConfig& cfg);
/// f = -t / (2 pi phi_ddot); throws OutOfWindow if |t| > T/2.
double time_to_frequency(double time_s, const TimeLensConfig& cfg);

/// Index of the lens time bin holding lens time t (window-centred).
std::size_t lens_bin(double time_s, const TimeLensConfig& cfg);

/// Draws `photons` timestamps from the lens output law: with probability
/// 1 - b a photon lands in the time bin of tone n with weight |s_n|^2, and
/// with probability b it is uniform over the window. Timestamps are measured
/// from the window start (lens time + T/2), so span = T.
PhotonStream tls_sample(const ToneSet& spectrum, const TimeLensConfig& cfg, std::size_t photons, double background,
                        std::uint64_t seed);
PhotonStream tls_sample(const SparseSignal& spectrum, const TimeLensConfig& cfg, std::size_t photons,
                        double background, std::uint64_t seed);

/// |H(f)| = exp(-2 pi^2 sigma^2 f^2) / sqrt(1 + (2 pi tau f)^2).
double jitter_response(const JitterModel& jitter, double frequency_hz);

/// Smallest f with |H(f)| <= 1/sqrt(2); bracketing then bisection to 1e-6
/// relative. Throws Unbounded when sigma = tau = 0.
double bandwidth_3db(const JitterModel& jitter);

/// EMG probability density (right-tailed: delay mu + tau on average).
double emg_pdf(const JitterModel& jitter, double t_s);

/// Full width at half maximum of the EMG density, found numerically.
double emg_fwhm(const JitterModel& jitter);

/// sigma of a pure Gaussian with the given FWHM.
double gaussian_sigma_for_fwhm(double fwhm_s);

/// erfcx(x) = exp(x^2) erfc(x), stable for large x.
double erfcx(double x);

}  // namespace qcs
