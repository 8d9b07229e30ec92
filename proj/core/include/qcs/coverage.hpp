#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qcs {

/// Absorbing-chain description of covering K cyclically replayed pulses when
/// each pulse clicks with probability p. Transient states are the incomplete
/// coverage configurations; the transition matrix uses columns as source
/// states, so state probabilities evolve as v <- T v.
struct CoverageChain {
  std::size_t k = 0;
  double p = 0.0;
  double period_prob = 0.0;            // 1 - (1 - p)^K
  std::vector<double> jumps;           // P_d for d = 1..K, sums to 1
  Eigen::MatrixXd transition;
  Eigen::VectorXd init;
};

/// Exact chains exist for K = 2 (one transient state) and K = 3 (states X,
/// Y_A, Y_B).
CoverageChain make_coverage_chain(std::size_t k, double p);

/// P_d = (1 - p)^(d - 1) p / P_period, d = 1..K.
std::vector<double> jump_distribution(std::size_t k, double p);

/// 1 - 1^T T^(M-1) v_init, evaluated by repeated squaring.
double chain_success(const CoverageChain& chain, std::size_t m);

/// 1 - ((1 - p) / (2 - p))^(M - 1); M >= 2.
double success_k2(double p, std::size_t m);
/// Three-bin absorbing-chain success probability; 0 for M < 3.
double success_k3(double p, std::size_t m);

enum class SuccessRule {
  /// Every support bin reaches min_count hits; extra bins are ignored.
  Coverage,
  /// The thresholded histogram {n : k_n >= min_count} equals the support.
  ExactSupport,
};

struct CoverageScenario {
  std::size_t k = 1;
  std::size_t n = 1;                   // time bins per period
  double p = 1.0;
  double dark_per_period = 0.0;        // expected background counts per period
  std::uint64_t min_count = 1;         // c0
  SuccessRule rule = SuccessRule::Coverage;

  void validate() const;
};

struct CoverageEstimate {
  std::size_t measurements = 0;
  std::size_t successes = 0;
  std::size_t trials = 0;
  double rate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

/// Wilson score interval at the given z (default 95%).
std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

/// Monte Carlo success rate for M detections: support bins are drawn per
/// trial, pulses replay cyclically and click with probability p, background
/// counts arrive as a Poisson process uniform over the N bins.
CoverageEstimate coverage_mc(const CoverageScenario& scenario, std::size_t m, std::size_t trials, std::uint64_t seed,
                             unsigned threads = 1);

/// coverage_mc at several M from the same trajectories (prefixes of one
/// detection sequence per trial), so the curve uses common random numbers.
std::vector<CoverageEstimate> coverage_curve(const CoverageScenario& scenario, const std::vector<std::size_t>& ms,
                                             std::size_t trials, std::uint64_t seed, unsigned threads = 1);

/// Number of detections each trial needed before every support bin reached
/// min_count (Coverage rule).
std::vector<std::size_t> coverage_hitting_times(const CoverageScenario& scenario, std::size_t trials,
                                                std::uint64_t seed, unsigned threads = 1);

struct MinMeasurementOptions {
  std::size_t trials = 2000;
  std::size_t n = std::size_t{1} << 15;
  double dark_per_period = 0.0;
  unsigned threads = 1;
};

/// Smallest M whose success probability reaches `target`. Exact for K <= 3
/// without background at c0 = 1; otherwise the smallest M whose Monte Carlo
/// estimate (common random numbers) reaches the target.
std::size_t min_measurements(std::size_t k, double p, double target, std::uint64_t min_count, std::uint64_t seed,
                             const MinMeasurementOptions& options = {});

struct ScalingFit {
  double alpha = 0.0;
  double c = 0.0;
  double r2 = 0.0;
  std::vector<std::pair<double, double>> samples;
};

/// Least-squares line M = alpha K + c through (K, M_min) samples.
ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& samples);

}  // namespace qcs
