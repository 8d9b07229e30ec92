#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "qcs/frontend.hpp"
#include "qcs/signals.hpp"

namespace qcs {

struct CountHistogram {
  std::vector<std::uint64_t> bins;
  std::uint64_t total = 0;
};

struct SparseEstimate {
  std::vector<double> coefficients;
  /// Phases in radians for Fourier-basis estimates; empty means zero phase.
  std::vector<double> phases;
  double scale = 1.0;
  /// (index, value) pairs of the K largest coefficients, descending.
  std::vector<std::pair<std::size_t, double>> topk;
};

struct ReconstructionResult {
  SparseEstimate estimate;
  std::vector<double> waveform;
  std::vector<std::size_t> support;
  std::optional<double> nmse;
  std::optional<bool> success;
};

/// Stack of one-hot rows, one per photon. Stored as the hot column of each
/// row; dense materialization is limited to kMaxDenseColumns.
class EquivalentMatrix {
 public:
  static constexpr std::size_t kMaxDenseColumns = std::size_t{1} << 14;

  EquivalentMatrix(std::size_t columns, std::vector<std::size_t> hot);

  std::size_t rows() const noexcept { return hot_.size(); }
  std::size_t cols() const noexcept { return columns_; }
  std::size_t hot_column(std::size_t row) const { return hot_.at(row); }
  const std::vector<std::size_t>& hot_columns() const noexcept { return hot_; }

  /// y = Phi x, i.e. y_m = x[hot(m)].
  std::vector<double> apply(const std::vector<double>& x) const;
  std::vector<std::uint64_t> column_sums() const;
  Eigen::MatrixXd dense() const;

 private:
  std::size_t columns_;
  std::vector<std::size_t> hot_;
};

struct DftSpectrum {
  std::vector<double> frequencies_hz;
  std::vector<double> magnitude;
  std::vector<double> phase;
  std::size_t photons = 0;
};

/// k_n = #{t : floor((t mod T) / (T / N)) = n}. The period is rounded to
/// whole picoseconds.
CountHistogram bin_timestamps(const PhotonStream& stream, std::size_t n, double period_s);

/// s_n = (k_n / M) / eta, with eta = 1 when absent.
SparseEstimate counting_estimate(const CountHistogram& hist, std::optional<double> eta = std::nullopt);

/// s(f) = sum_m exp(-2 pi i f t_m) evaluated directly at each grid frequency.
DftSpectrum dft_estimate(const PhotonStream& stream, const std::vector<double>& frequencies_hz);

/// Same quantity on the harmonic grid f_k = k / T, k = 0..harmonics, computed
/// by folding timestamps modulo T (whole picoseconds) and using an exact
/// twiddle table. Matches dft_estimate on that grid.
DftSpectrum dft_estimate_harmonics(const PhotonStream& stream, double period_s, std::size_t harmonics);

/// Converts a harmonic-grid DFT into tone amplitudes for a signal rendered
/// with modulation depth m: a_k = 2 |s_k| / (M m). The DC bin holds the
/// optical carrier and is zeroed. Output length is `n`.
SparseEstimate spectral_estimate(const DftSpectrum& spectrum, double depth, std::size_t n);

/// Indices of the K largest coefficients, descending, ties to the lower index.
std::vector<std::size_t> top_k_select(const SparseEstimate& estimate, std::size_t k);

/// Copy of `estimate` with its topk list filled.
SparseEstimate with_topk(SparseEstimate estimate, std::size_t k);

/// {n : k_n >= min_count}. The default of 2 rejects isolated background hits.
std::vector<std::size_t> recover_support_time(const CountHistogram& hist, std::uint64_t min_count = 2);

/// x_hat = Psi s_hat on the N-point cell-centre grid, using only the topk
/// entries when present. NMSE compares unit-max-normalized waveforms.
ReconstructionResult reconstruct(const SparseEstimate& estimate, Basis basis, double period_s,
                                 const SparseSignal* truth = nullptr);

EquivalentMatrix equivalent_matrix(const PhotonStream& stream, std::size_t n, double period_s);

/// Normalized squared error after scaling each waveform to unit max |x|.
double normalized_mse(const std::vector<double>& estimate, const std::vector<double>& truth);

void to_json(nlohmann::json& j, const ReconstructionResult& r);
/// "index,value" lines with a header row.
void write_waveform_csv(std::ostream& out, const std::vector<double>& waveform);

}  // namespace qcs
