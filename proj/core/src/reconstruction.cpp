#include "qcs/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "qcs/csv.hpp"
#include "qcs/error.hpp"

namespace qcs {

namespace {

std::int64_t period_ps(double period_s) {
  require(period_s > 0.0, ErrorCode::InvalidArgument, "period must be positive");
  const std::int64_t t = to_ps(period_s);
  require(t >= 1, ErrorCode::InvalidArgument, "period shorter than the 1 ps timestamp resolution");
  return t;
}

__extension__ typedef unsigned __int128 u128;

std::size_t bin_of(std::int64_t t_ps, std::int64_t period, std::size_t n) {
  const auto folded = static_cast<u128>(((t_ps % period) + period) % period);
  return static_cast<std::size_t>(folded * n / static_cast<u128>(period));
}

}  // namespace

EquivalentMatrix::EquivalentMatrix(std::size_t columns, std::vector<std::size_t> hot)
    : columns_(columns), hot_(std::move(hot)) {
  require(columns_ > 0, ErrorCode::InvalidArgument, "matrix needs at least one column");
  for (std::size_t c : hot_) require(c < columns_, ErrorCode::InvalidArgument, "hot column out of range");
}

std::vector<double> EquivalentMatrix::apply(const std::vector<double>& x) const {
  require(x.size() == columns_, ErrorCode::InvalidArgument, "vector length does not match matrix columns");
  std::vector<double> y(hot_.size());
  for (std::size_t m = 0; m < hot_.size(); ++m) y[m] = x[hot_[m]];
  return y;
}

std::vector<std::uint64_t> EquivalentMatrix::column_sums() const {
  std::vector<std::uint64_t> sums(columns_, 0);
  for (std::size_t c : hot_) ++sums[c];
  return sums;
}

Eigen::MatrixXd EquivalentMatrix::dense() const {
  require(columns_ <= kMaxDenseColumns, ErrorCode::InvalidArgument,
          "dense equivalent matrix limited to " + std::to_string(kMaxDenseColumns) + " columns");
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(hot_.size()), static_cast<Eigen::Index>(columns_));
  for (std::size_t m = 0; m < hot_.size(); ++m)
    phi(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(hot_[m])) = 1.0;
  return phi;
}

CountHistogram bin_timestamps(const PhotonStream& stream, std::size_t n, double period_s) {
  require(n >= 1, ErrorCode::InvalidArgument, "need at least one bin");
  const std::int64_t period = period_ps(period_s);
  CountHistogram hist;
  hist.bins.assign(n, 0);
  for (std::int64_t t : stream.timestamps_ps) ++hist.bins[bin_of(t, period, n)];
  hist.total = stream.count();
  return hist;
}

SparseEstimate counting_estimate(const CountHistogram& hist, std::optional<double> eta) {
  require(hist.total > 0, ErrorCode::EmptyMeasurement, "no detections to estimate from");
  const double scale = eta.value_or(1.0);
  require(scale > 0.0, ErrorCode::InvalidArgument, "eta must be positive");
  SparseEstimate est;
  est.scale = scale;
  est.coefficients.resize(hist.bins.size());
  const double m = static_cast<double>(hist.total);
  for (std::size_t i = 0; i < hist.bins.size(); ++i)
    est.coefficients[i] = static_cast<double>(hist.bins[i]) / m / scale;
  return est;
}

DftSpectrum dft_estimate(const PhotonStream& stream, const std::vector<double>& frequencies_hz) {
  require(!stream.empty(), ErrorCode::EmptyMeasurement, "no detections to transform");
  DftSpectrum out;
  out.frequencies_hz = frequencies_hz;
  out.photons = stream.count();
  out.magnitude.reserve(frequencies_hz.size());
  out.phase.reserve(frequencies_hz.size());
  for (double f : frequencies_hz) {
    require(f >= 0.0, ErrorCode::InvalidArgument, "grid frequencies must be nonnegative");
    double re = 0.0;
    double im = 0.0;
    const long double f_per_ps = static_cast<long double>(f) * 1e-12L;
    for (std::int64_t t : stream.timestamps_ps) {
      // Reduce the cycle count in extended precision before taking sin/cos.
      long double cycles = f_per_ps * static_cast<long double>(t);
      cycles -= std::floor(cycles);
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(cycles);
      re += std::cos(angle);
      im += std::sin(angle);
    }
    out.magnitude.push_back(std::hypot(re, im));
    out.phase.push_back(std::atan2(im, re));
  }
  return out;
}

DftSpectrum dft_estimate_harmonics(const PhotonStream& stream, double period_s, std::size_t harmonics) {
  require(!stream.empty(), ErrorCode::EmptyMeasurement, "no detections to transform");
  const std::int64_t period = period_ps(period_s);
  const auto cells = static_cast<std::size_t>(period);

  std::vector<std::complex<double>> twiddle(cells);
  for (std::size_t r = 0; r < cells; ++r)
    twiddle[r] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(cells));

  // Fold onto one period; iterate over whichever is smaller, photons or cells.
  std::vector<std::pair<std::uint64_t, double>> residues;
  if (stream.count() < cells) {
    residues.reserve(stream.count());
    for (std::int64_t t : stream.timestamps_ps) residues.emplace_back(static_cast<std::uint64_t>(((t % period) + period) % period), 1.0);
  } else {
    std::vector<double> folded(cells, 0.0);
    for (std::int64_t t : stream.timestamps_ps) folded[static_cast<std::size_t>(((t % period) + period) % period)] += 1.0;
    for (std::size_t r = 0; r < cells; ++r)
      if (folded[r] != 0.0) residues.emplace_back(r, folded[r]);
  }

  DftSpectrum out;
  out.photons = stream.count();
  const double period_exact_s = static_cast<double>(period) * kPicosecond;
  for (std::size_t k = 0; k <= harmonics; ++k) {
    std::complex<double> acc{0.0, 0.0};
    const std::uint64_t step = k % cells;
    for (const auto& [r, weight] : residues)
      acc += weight * twiddle[static_cast<std::size_t>((static_cast<u128>(step) * r) % cells)];
    out.frequencies_hz.push_back(static_cast<double>(k) / period_exact_s);
    out.magnitude.push_back(std::abs(acc));
    out.phase.push_back(std::arg(acc));
  }
  return out;
}

SparseEstimate spectral_estimate(const DftSpectrum& spectrum, double depth, std::size_t n) {
  require(spectrum.photons > 0, ErrorCode::EmptyMeasurement, "spectrum built from no photons");
  require(depth > 0.0 && depth <= 1.0, ErrorCode::InvalidArgument, "modulation depth must be in (0, 1]");
  require(spectrum.magnitude.size() <= n / 2 + 1, ErrorCode::InvalidArgument, "more harmonics than the grid holds");
  SparseEstimate est;
  est.scale = 0.5 * static_cast<double>(spectrum.photons) * depth;
  est.coefficients.assign(n, 0.0);
  est.phases.assign(n, 0.0);
  for (std::size_t k = 1; k < spectrum.magnitude.size(); ++k) {
    est.coefficients[k] = spectrum.magnitude[k] / est.scale;
    est.phases[k] = spectrum.phase[k];
  }
  return est;
}

std::vector<std::size_t> top_k_select(const SparseEstimate& estimate, std::size_t k) {
  const std::size_t n = estimate.coefficients.size();
  require(k >= 1 && k <= n, ErrorCode::InvalidArgument,
          "K=" + std::to_string(k) + " must be in [1, " + std::to_string(n) + "]");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto& c = estimate.coefficients;
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) { return c[a] > c[b] || (c[a] == c[b] && a < b); });
  order.resize(k);
  return order;
}

SparseEstimate with_topk(SparseEstimate estimate, std::size_t k) {
  estimate.topk.clear();
  for (std::size_t i : top_k_select(estimate, k)) estimate.topk.emplace_back(i, estimate.coefficients[i]);
  return estimate;
}

std::vector<std::size_t> recover_support_time(const CountHistogram& hist, std::uint64_t min_count) {
  require(min_count >= 1, ErrorCode::InvalidArgument, "threshold must be at least 1");
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < hist.bins.size(); ++i)
    if (hist.bins[i] >= min_count) support.push_back(i);
  return support;
}

double normalized_mse(const std::vector<double>& estimate, const std::vector<double>& truth) {
  require(estimate.size() == truth.size(), ErrorCode::InvalidArgument, "waveform length mismatch");
  auto peak = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };
  const double pe = peak(estimate);
  const double pt = peak(truth);
  require(pt > 0.0, ErrorCode::InvalidArgument, "reference waveform is identically zero");
  double err = 0.0;
  double ref = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double e = pe > 0.0 ? estimate[i] / pe : 0.0;
    const double t = truth[i] / pt;
    err += (e - t) * (e - t);
    ref += t * t;
  }
  return err / ref;
}

ReconstructionResult reconstruct(const SparseEstimate& estimate, Basis basis, double period_s,
                                 const SparseSignal* truth) {
  const std::size_t n = estimate.coefficients.size();
  require(n > 0, ErrorCode::InvalidArgument, "empty estimate");
  require(estimate.phases.empty() || estimate.phases.size() == n, ErrorCode::InvalidArgument,
          "phase vector length mismatch");
  if (truth) {
    require(truth->dimension == n, ErrorCode::InvalidArgument,
            "estimate has " + std::to_string(n) + " coefficients, truth has dimension " +
                std::to_string(truth->dimension));
    require(truth->basis == basis, ErrorCode::InvalidArgument, "basis does not match the signal domain");
  }

  ReconstructionResult result;
  result.estimate = estimate;
  std::vector<std::size_t> active;
  if (!estimate.topk.empty()) {
    for (const auto& entry : estimate.topk) active.push_back(entry.first);
  } else {
    for (std::size_t i = 0; i < n; ++i)
      if (estimate.coefficients[i] > 0.0) active.push_back(i);
  }
  std::sort(active.begin(), active.end());
  result.support = active;

  if (basis == Basis::Identity) {
    result.waveform.assign(n, 0.0);
    for (std::size_t i : active) result.waveform[i] = estimate.coefficients[i];
  } else {
    SparseSignal synth;
    synth.dimension = n;
    synth.domain = Domain::FrequencySparse;
    synth.basis = Basis::Fourier;
    synth.period_s = period_s;
    for (std::size_t i : active) {
      if (estimate.coefficients[i] <= 0.0) continue;
      require(2 * i <= n, ErrorCode::InvalidArgument, "Fourier coefficient above the Nyquist bin");
      synth.support.push_back(i);
      synth.amplitudes.push_back(estimate.coefficients[i]);
      synth.phases.push_back(estimate.phases.empty() ? 0.0 : estimate.phases[i]);
    }
    result.waveform = synth.support.empty() ? std::vector<double>(n, 0.0) : evaluate(synth, n);
  }

  if (truth) {
    result.nmse = normalized_mse(result.waveform, evaluate(*truth, n));
    std::vector<std::size_t> expected = truth->support;
    std::sort(expected.begin(), expected.end());
    result.success = expected == result.support;
  }
  return result;
}

EquivalentMatrix equivalent_matrix(const PhotonStream& stream, std::size_t n, double period_s) {
  require(n >= 1, ErrorCode::InvalidArgument, "need at least one bin");
  const std::int64_t period = period_ps(period_s);
  std::vector<std::size_t> hot;
  hot.reserve(stream.count());
  for (std::int64_t t : stream.timestamps_ps) hot.push_back(bin_of(t, period, n));
  return EquivalentMatrix(n, std::move(hot));
}

void to_json(nlohmann::json& j, const ReconstructionResult& r) {
  j = nlohmann::json::object();
  j["nmse"] = r.nmse ? nlohmann::json(*r.nmse) : nlohmann::json(nullptr);
  j["success"] = r.success ? nlohmann::json(*r.success) : nlohmann::json(nullptr);
  j["support"] = r.support;
  nlohmann::json topk = nlohmann::json::array();
  for (const auto& [index, value] : r.estimate.topk) topk.push_back({{"index", index}, {"value", value}});
  j["topk"] = topk;
}

void write_waveform_csv(std::ostream& out, const std::vector<double>& waveform) {
  out << "index,value\n";
  for (std::size_t i = 0; i < waveform.size(); ++i) out << i << ',' << format_decimal(waveform[i]) << '\n';
}

}  // namespace qcs
