#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "qcs/signals.hpp"

namespace qcs {

enum class MatrixKind { GaussianRandom, OneHotSampling };

struct SensingMatrix {
  MatrixKind kind = MatrixKind::GaussianRandom;
  Eigen::MatrixXd entries;

  std::size_t rows() const noexcept { return static_cast<std::size_t>(entries.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(entries.cols()); }
};

/// i.i.d. N(0, 1/M) entries, so E||Phi x||^2 = ||x||^2.
SensingMatrix gaussian_sensing_matrix(std::size_t m, std::size_t n, std::uint64_t seed);
/// Each row selects one of the N positions uniformly, with replacement.
SensingMatrix one_hot_sensing_matrix(std::size_t m, std::size_t n, std::uint64_t seed);
SensingMatrix one_hot_from_columns(std::size_t n, const std::vector<std::size_t>& hot);

/// Orthonormal real Fourier basis: DC, (cos k, sin k) pairs, then the Nyquist
/// column for even N. Columns are basis vectors.
Eigen::MatrixXd real_fourier_basis(std::size_t n);

/// max(K, ceil(C K ln(N / K))).
std::size_t classical_bound(std::size_t k, std::size_t n, double c = 1.0);

struct OmpResult {
  Eigen::VectorXd coefficients;
  std::vector<std::size_t> support;        // selection order
  std::vector<double> residual_norms;      // ||r|| before the first and after each iteration
};

/// K rounds of greedy atom selection with a least-squares refit on the
/// selected atoms after each round. Stops early once the residual vanishes.
OmpResult omp_solve(const SensingMatrix& theta, const Eigen::VectorXd& y, std::size_t k);

struct RipReport {
  double delta_hat = 0.0;
  double pass_fraction = 0.0;
  std::size_t trials = 0;
};

/// Samples `trials` unit-norm vectors x = Psi s with s K-sparse (uniform
/// support, Gaussian values) and checks
/// (1 - delta) c ||x||^2 <= ||Phi x||^2 <= (1 + delta) c ||x||^2,
/// c = M/N for one-hot sampling and 1 for Gaussian matrices. Psi is the
/// identity or the real Fourier basis.
RipReport rip_check(const SensingMatrix& phi, std::size_t k, double delta, std::size_t trials, std::uint64_t seed,
                    Basis sparsity_basis = Basis::Identity);

void write_matrix_csv(std::ostream& out, const SensingMatrix& matrix);

}  // namespace qcs
