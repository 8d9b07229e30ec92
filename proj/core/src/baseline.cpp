#include "qcs/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <string>

#include "qcs/csv.hpp"
#include "qcs/error.hpp"
#include "qcs/random.hpp"

namespace qcs {

namespace {

using Index = Eigen::Index;

Index idx(std::size_t i) { return static_cast<Index>(i); }

}  // namespace

SensingMatrix gaussian_sensing_matrix(std::size_t m, std::size_t n, std::uint64_t seed) {
  require(m > 0 && n > 0, ErrorCode::InvalidArgument, "matrix dimensions must be positive");
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(m)));
  SensingMatrix out{MatrixKind::GaussianRandom, Eigen::MatrixXd(idx(m), idx(n))};
  for (Index r = 0; r < out.entries.rows(); ++r)
    for (Index c = 0; c < out.entries.cols(); ++c) out.entries(r, c) = normal(rng);
  return out;
}

SensingMatrix one_hot_from_columns(std::size_t n, const std::vector<std::size_t>& hot) {
  require(n > 0, ErrorCode::InvalidArgument, "matrix needs at least one column");
  SensingMatrix out{MatrixKind::OneHotSampling, Eigen::MatrixXd::Zero(idx(hot.size()), idx(n))};
  for (std::size_t r = 0; r < hot.size(); ++r) {
    require(hot[r] < n, ErrorCode::InvalidArgument, "hot column out of range");
    out.entries(idx(r), idx(hot[r])) = 1.0;
  }
  return out;
}

SensingMatrix one_hot_sensing_matrix(std::size_t m, std::size_t n, std::uint64_t seed) {
  require(m > 0 && n > 0, ErrorCode::InvalidArgument, "matrix dimensions must be positive");
  Rng rng = make_rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::size_t> hot(m);
  for (auto& h : hot) h = pick(rng);
  return one_hot_from_columns(n, hot);
}

Eigen::MatrixXd real_fourier_basis(std::size_t n) {
  require(n > 0, ErrorCode::InvalidArgument, "basis size must be positive");
  Eigen::MatrixXd psi(idx(n), idx(n));
  const double dn = static_cast<double>(n);
  psi.col(0).setConstant(1.0 / std::sqrt(dn));
  Index col = 1;
  for (std::size_t k = 1; 2 * k < n; ++k) {
    for (std::size_t t = 0; t < n; ++t) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(k * t) / dn;
      psi(idx(t), col) = std::sqrt(2.0 / dn) * std::cos(angle);
      psi(idx(t), col + 1) = std::sqrt(2.0 / dn) * std::sin(angle);
    }
    col += 2;
  }
  if (n % 2 == 0)
    for (std::size_t t = 0; t < n; ++t) psi(idx(t), col) = (t % 2 == 0 ? 1.0 : -1.0) / std::sqrt(dn);
  return psi;
}

std::size_t classical_bound(std::size_t k, std::size_t n, double c) {
  require(k >= 1 && k <= n, ErrorCode::InvalidArgument, "need 1 <= K <= N");
  require(c > 0.0, ErrorCode::InvalidArgument, "constant C must be positive");
  const double bound = std::ceil(c * static_cast<double>(k) * std::log(static_cast<double>(n) / static_cast<double>(k)));
  return std::max(k, static_cast<std::size_t>(std::max(bound, 0.0)));
}

OmpResult omp_solve(const SensingMatrix& theta, const Eigen::VectorXd& y, std::size_t k) {
  const Eigen::MatrixXd& a = theta.entries;
  require(a.rows() == y.size(), ErrorCode::InvalidArgument, "measurement length does not match matrix rows");
  require(k >= 1 && idx(k) <= a.cols(), ErrorCode::InvalidArgument, "sparsity must be in [1, N]");

  OmpResult out;
  out.coefficients = Eigen::VectorXd::Zero(a.cols());
  const Eigen::VectorXd col_norms = a.colwise().norm().transpose();
  Eigen::VectorXd residual = y;
  const double y_norm = y.norm();
  out.residual_norms.push_back(y_norm);
  std::vector<bool> chosen(static_cast<std::size_t>(a.cols()), false);
  Eigen::VectorXd refit;

  for (std::size_t iter = 0; iter < k; ++iter) {
    if (residual.norm() <= 1e-12 * std::max(1.0, y_norm)) break;
    const Eigen::VectorXd corr = a.transpose() * residual;
    Index best = -1;
    double best_score = -1.0;
    for (Index j = 0; j < a.cols(); ++j) {
      if (chosen[static_cast<std::size_t>(j)] || col_norms(j) == 0.0) continue;
      const double score = std::abs(corr(j)) / col_norms(j);
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    if (best < 0) break;
    chosen[static_cast<std::size_t>(best)] = true;
    out.support.push_back(static_cast<std::size_t>(best));

    Eigen::MatrixXd sub(a.rows(), idx(out.support.size()));
    for (std::size_t s = 0; s < out.support.size(); ++s) sub.col(idx(s)) = a.col(idx(out.support[s]));
    const Eigen::MatrixXd gram = sub.transpose() * sub;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    const Eigen::VectorXd pivots = ldlt.vectorD().cwiseAbs();
    require(ldlt.info() == Eigen::Success && pivots.minCoeff() > 1e-12 * std::max(1.0, pivots.maxCoeff()),
            ErrorCode::SingularSystem, "selected atoms are linearly dependent");
    refit = ldlt.solve(sub.transpose() * y);
    residual = y - sub * refit;
    out.residual_norms.push_back(residual.norm());
  }

  for (std::size_t s = 0; s < out.support.size(); ++s) out.coefficients(idx(out.support[s])) = refit(idx(s));
  return out;
}

RipReport rip_check(const SensingMatrix& phi, std::size_t k, double delta, std::size_t trials, std::uint64_t seed,
                    Basis sparsity_basis) {
  require(trials >= 1, ErrorCode::InvalidArgument, "need at least one trial");
  require(delta > 0.0 && delta < 1.0, ErrorCode::InvalidArgument, "delta must be in (0, 1)");
  const std::size_t n = phi.cols();
  require(k >= 1 && k <= n, ErrorCode::InvalidArgument, "sparsity must be in [1, N]");

  const double expected = phi.kind == MatrixKind::OneHotSampling
                              ? static_cast<double>(phi.rows()) / static_cast<double>(n)
                              : 1.0;
  Eigen::MatrixXd psi;
  if (sparsity_basis == Basis::Fourier) psi = real_fourier_basis(n);

  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::size_t> positions(n);
  std::iota(positions.begin(), positions.end(), std::size_t{0});

  RipReport report;
  report.trials = trials;
  std::size_t passed = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    // Partial Fisher-Yates for a uniform K-subset.
    for (std::size_t i = 0; i < k; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, n - 1);
      std::swap(positions[i], positions[pick(rng)]);
    }
    Eigen::VectorXd s = Eigen::VectorXd::Zero(idx(n));
    for (std::size_t i = 0; i < k; ++i) s(idx(positions[i])) = normal(rng);
    if (s.norm() == 0.0) s(idx(positions[0])) = 1.0;
    s.normalize();
    const Eigen::VectorXd x = sparsity_basis == Basis::Fourier ? Eigen::VectorXd(psi * s) : s;
    const double ratio = (phi.entries * x).squaredNorm() / (expected * x.squaredNorm());
    report.delta_hat = std::max(report.delta_hat, std::abs(ratio - 1.0));
    if (ratio >= 1.0 - delta && ratio <= 1.0 + delta) ++passed;
  }
  report.pass_fraction = static_cast<double>(passed) / static_cast<double>(trials);
  return report;
}

void write_matrix_csv(std::ostream& out, const SensingMatrix& matrix) {
  for (Index r = 0; r < matrix.entries.rows(); ++r) {
    for (Index c = 0; c < matrix.entries.cols(); ++c) out << (c ? "," : "") << format_decimal(matrix.entries(r, c));
    out << '\n';
  }
}

}  // namespace qcs
