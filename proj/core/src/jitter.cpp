#include <cmath>
#include <numbers>

#include "qcs/error.hpp"
#include "qcs/time_lens.hpp"

namespace qcs {

namespace {

constexpr double kHalfPower = 0.70710678118654752440;  // 2^{-1/2}

}  // namespace

double erfcx(double x) {
  if (x < 0.0) return 2.0 * std::exp(x * x) - erfcx(-x);
  if (x < 25.0) return std::exp(x * x) * std::erfc(x);
  // Asymptotic series; the first omitted term is below 1e-13 relative here.
  const double inv2 = 1.0 / (x * x);
  const double series = 1.0 - 0.5 * inv2 * (1.0 - 1.5 * inv2 * (1.0 - 2.5 * inv2 * (1.0 - 3.5 * inv2)));
  return series / (x * std::sqrt(std::numbers::pi));
}

double jitter_response(const JitterModel& jitter, double frequency_hz) {
  const double two_pi_f = 2.0 * std::numbers::pi * frequency_hz;
  const double gauss = std::exp(-0.5 * std::pow(two_pi_f * jitter.sigma_s, 2));
  const double tail = 1.0 / std::sqrt(1.0 + std::pow(two_pi_f * jitter.tau_s, 2));
  return gauss * tail;
}

double bandwidth_3db(const JitterModel& jitter) {
  require(jitter.sigma_s >= 0.0 && jitter.tau_s >= 0.0, ErrorCode::InvalidArgument, "negative jitter parameter");
  require(!jitter.degenerate(), ErrorCode::Unbounded, "zero jitter has unbounded bandwidth");
  double lo = 0.0;
  double hi = 1.0 / (2.0 * std::numbers::pi * (jitter.sigma_s + jitter.tau_s));
  while (jitter_response(jitter, hi) > kHalfPower) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > 1e-9 * hi) {
    const double mid = 0.5 * (lo + hi);
    (jitter_response(jitter, mid) > kHalfPower ? lo : hi) = mid;
  }
  return hi;
}

double gaussian_sigma_for_fwhm(double fwhm_s) { return fwhm_s / (2.0 * std::sqrt(2.0 * std::numbers::ln2)); }

double emg_pdf(const JitterModel& jitter, double t_s) {
  jitter.validate();
  const double sigma = jitter.sigma_s;
  const double tau = jitter.tau_s;
  const double dt = t_s - jitter.mu_s;
  if (tau == 0.0) return std::exp(-0.5 * dt * dt / (sigma * sigma)) / (sigma * std::sqrt(2.0 * std::numbers::pi));
  if (sigma == 0.0) return dt < 0.0 ? 0.0 : std::exp(-dt / tau) / tau;

  const double z = (sigma / tau - dt / sigma) / std::numbers::sqrt2;
  const double gauss = std::exp(-0.5 * dt * dt / (sigma * sigma));
  if (z >= 0.0) return gauss * erfcx(z) / (2.0 * tau);
  // erfcx(z) = 2 exp(z^2) - erfcx(-z); exp(z^2) * gauss is the plain
  // exponential tail, which stays finite where exp(z^2) alone overflows.
  const double tail = std::exp(0.5 * sigma * sigma / (tau * tau) - dt / tau);
  return (2.0 * tail - gauss * erfcx(-z)) / (2.0 * tau);
}

double emg_fwhm(const JitterModel& jitter) {
  jitter.validate();
  if (jitter.tau_s == 0.0) return 2.0 * std::sqrt(2.0 * std::numbers::ln2) * jitter.sigma_s;
  if (jitter.sigma_s == 0.0) return jitter.tau_s * std::numbers::ln2;

  // Unimodal density: golden-section search for the mode.
  const double scale = jitter.sigma_s + jitter.tau_s;
  double a = jitter.mu_s - 6.0 * jitter.sigma_s;
  double b = jitter.mu_s + jitter.tau_s + 6.0 * jitter.sigma_s;
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  while (b - a > 1e-12 * scale) {
    const double c = b - ratio * (b - a);
    const double d = a + ratio * (b - a);
    if (emg_pdf(jitter, c) < emg_pdf(jitter, d))
      a = c;
    else
      b = d;
  }
  const double mode = 0.5 * (a + b);
  const double half = 0.5 * emg_pdf(jitter, mode);

  auto crossing = [&](double inside, double step) {
    double outside = inside + step;
    while (emg_pdf(jitter, outside) > half) outside += step;
    for (int i = 0; i < 200 && std::abs(outside - inside) > 1e-13 * scale; ++i) {
      const double mid = 0.5 * (inside + outside);
      (emg_pdf(jitter, mid) > half ? inside : outside) = mid;
    }
    return 0.5 * (inside + outside);
  };
  return crossing(mode, scale) - crossing(mode, -scale);
}

}  // namespace qcs
