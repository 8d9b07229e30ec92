#include "qcs/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>

#include "qcs/error.hpp"
#include "qcs/random.hpp"

namespace qcs {

namespace {

void check_probability(double p) {
  require(p > 0.0 && p <= 1.0, ErrorCode::InvalidArgument, "detection probability must be in (0, 1]");
}

Eigen::MatrixXd matrix_power(Eigen::MatrixXd base, std::size_t exponent) {
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(base.rows(), base.cols());
  while (exponent > 0) {
    if (exponent & 1U) result = result * base;
    exponent >>= 1U;
    if (exponent > 0) base = base * base;
  }
  return result;
}

}  // namespace

std::vector<double> jump_distribution(std::size_t k, double p) {
  check_probability(p);
  require(k >= 1, ErrorCode::InvalidArgument, "sparsity must be positive");
  const double q = 1.0 - p;
  const double period_prob = -std::expm1(static_cast<double>(k) * std::log1p(-p));
  std::vector<double> jumps(k);
  for (std::size_t d = 1; d <= k; ++d) jumps[d - 1] = std::pow(q, static_cast<double>(d - 1)) * p / period_prob;
  return jumps;
}

CoverageChain make_coverage_chain(std::size_t k, double p) {
  check_probability(p);
  require(k == 2 || k == 3, ErrorCode::InvalidArgument, "exact coverage chains exist only for K = 2 and K = 3");
  CoverageChain chain;
  chain.k = k;
  chain.p = p;
  chain.period_prob = 1.0 - std::pow(1.0 - p, static_cast<double>(k));
  chain.jumps = jump_distribution(k, p);
  if (k == 2) {
    // One transient state; a jump of two pulses lands back on the same bin.
    chain.transition = Eigen::MatrixXd::Constant(1, 1, chain.jumps[1]);
    chain.init = Eigen::VectorXd::Ones(1);
  } else {
    const double u = chain.jumps[0];
    const double v = chain.jumps[1];
    const double w = chain.jumps[2];
    chain.transition.resize(3, 3);
    // Source states are columns: X, Y_A (missing bin one step ahead),
    // Y_B (missing bin two steps ahead).
    chain.transition << w, 0, 0,
                        u, w, u,
                        v, v, w;
    chain.init = Eigen::VectorXd::Unit(3, 0);
  }
  return chain;
}

double chain_success(const CoverageChain& chain, std::size_t m) {
  require(m >= 1, ErrorCode::InvalidArgument, "need at least one detection");
  const Eigen::VectorXd state = matrix_power(chain.transition, m - 1) * chain.init;
  return 1.0 - state.sum();
}

double success_k2(double p, std::size_t m) {
  check_probability(p);
  require(m >= 2, ErrorCode::InvalidArgument, "two bins need at least two detections");
  const double stay = (1.0 - p) / (2.0 - p);
  return 1.0 - std::pow(stay, static_cast<double>(m - 1));
}

double success_k3(double p, std::size_t m) {
  check_probability(p);
  require(m >= 1, ErrorCode::InvalidArgument, "need at least one detection");
  return chain_success(make_coverage_chain(3, p), m);
}

void CoverageScenario::validate() const {
  check_probability(p);
  require(k >= 1 && k <= n, ErrorCode::InvalidArgument, "need 1 <= K <= N");
  require(dark_per_period >= 0.0, ErrorCode::InvalidArgument, "background rate must be nonnegative");
  require(min_count >= 1, ErrorCode::InvalidArgument, "min_count must be at least 1");
}

std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (phat + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

namespace {

/// One trial of the replayed-pulse detection process. Signal gaps and the
/// background/support draws use separate generators, so for a fixed seed the
/// signal detection sequence is monotonically coupled across p.
class CoverageTrial {
 public:
  CoverageTrial(const CoverageScenario& scenario, std::uint64_t seed)
      : s_(scenario),
        signal_rng_(make_rng(derive_seed(seed, 1, 0))),
        background_rng_(make_rng(derive_seed(seed, 2, 0))),
        hits_(scenario.k, 0) {
    draw_support();
    background_rate_ = s_.dark_per_period / static_cast<double>(s_.n);
    pulse_ = skip();
    next_background_ = background_rate_ > 0.0 ? draw_background_gap() : kNever;
  }

  /// Consumes one detection and updates coverage bookkeeping.
  void step() {
    const double signal_time = pulse_time(pulse_);
    if (next_background_ < signal_time) {
      const auto bin = std::min(static_cast<std::size_t>(next_background_) % s_.n, s_.n - 1);
      record_bin(bin);
      next_background_ += draw_background_gap();
    } else {
      record_support(static_cast<std::size_t>(pulse_ % static_cast<std::uint64_t>(s_.k)));
      pulse_ += 1 + skip();
    }
    ++detections_;
  }

  bool covered() const noexcept { return covered_ == s_.k; }
  bool success() const noexcept {
    return covered() && (s_.rule == SuccessRule::Coverage || false_positives_ == 0);
  }
  std::size_t detections() const noexcept { return detections_; }

 private:
  static constexpr double kNever = std::numeric_limits<double>::infinity();

  void draw_support() {
    std::vector<std::size_t> bins;
    bins.reserve(s_.k);
    if (4 * s_.k < s_.n) {
      std::uniform_int_distribution<std::size_t> pick(0, s_.n - 1);
      while (bins.size() < s_.k) {
        const std::size_t b = pick(background_rng_);
        if (std::find(bins.begin(), bins.end(), b) == bins.end()) bins.push_back(b);
      }
    } else {
      std::vector<std::size_t> all(s_.n);
      std::iota(all.begin(), all.end(), std::size_t{0});
      for (std::size_t i = 0; i < s_.k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, s_.n - 1);
        std::swap(all[i], all[pick(background_rng_)]);
      }
      bins.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(s_.k));
    }
    std::sort(bins.begin(), bins.end());
    positions_ = std::move(bins);
  }

  /// Failures before the next click, by inversion of the geometric CDF.
  std::uint64_t skip() {
    if (s_.p >= 1.0) return 0;
    const double u = 1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(signal_rng_);  // (0, 1]
    return static_cast<std::uint64_t>(std::floor(std::log(u) / std::log1p(-s_.p)));
  }

  double draw_background_gap() {
    return std::exponential_distribution<double>(background_rate_)(background_rng_);
  }

  double pulse_time(std::uint64_t pulse) const {
    const auto k = static_cast<std::uint64_t>(s_.k);
    return static_cast<double>(pulse / k) * static_cast<double>(s_.n) +
           static_cast<double>(positions_[static_cast<std::size_t>(pulse % k)]) + 0.5;
  }

  void record_support(std::size_t index) {
    if (++hits_[index] == s_.min_count) ++covered_;
  }

  void record_bin(std::size_t bin) {
    const auto it = std::lower_bound(positions_.begin(), positions_.end(), bin);
    if (it != positions_.end() && *it == bin) {
      record_support(static_cast<std::size_t>(it - positions_.begin()));
    } else if (++background_hits_[bin] == s_.min_count) {
      ++false_positives_;
    }
  }

  const CoverageScenario& s_;
  Rng signal_rng_;
  Rng background_rng_;
  std::vector<std::size_t> positions_;
  std::vector<std::uint64_t> hits_;
  std::unordered_map<std::size_t, std::uint64_t> background_hits_;
  double background_rate_ = 0.0;
  std::uint64_t pulse_ = 0;
  double next_background_ = kNever;
  std::size_t detections_ = 0;
  std::size_t covered_ = 0;
  std::size_t false_positives_ = 0;
};

constexpr std::size_t kMaxDetections = std::size_t{1} << 32;

}  // namespace

std::vector<CoverageEstimate> coverage_curve(const CoverageScenario& scenario, const std::vector<std::size_t>& ms,
                                             std::size_t trials, std::uint64_t seed, unsigned threads) {
  scenario.validate();
  require(trials >= 1, ErrorCode::InvalidArgument, "need at least one trial");
  std::vector<std::size_t> sorted = ms;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  std::vector<std::vector<char>> outcome(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    CoverageTrial trial(scenario, derive_seed(seed, 0, t));
    auto& row = outcome[t];
    row.assign(sorted.size(), 0);
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      while (trial.detections() < sorted[i]) trial.step();
      row[i] = trial.success() ? 1 : 0;
    }
  });

  std::vector<CoverageEstimate> by_m;
  by_m.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    CoverageEstimate e;
    e.measurements = sorted[i];
    e.trials = trials;
    for (const auto& row : outcome) e.successes += static_cast<std::size_t>(row[i]);
    e.rate = static_cast<double>(e.successes) / static_cast<double>(trials);
    std::tie(e.ci_lo, e.ci_hi) = wilson_interval(e.successes, trials);
    by_m.push_back(e);
  }

  std::vector<CoverageEstimate> out;
  out.reserve(ms.size());
  for (std::size_t m : ms)
    out.push_back(by_m[static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), m) - sorted.begin())]);
  return out;
}

CoverageEstimate coverage_mc(const CoverageScenario& scenario, std::size_t m, std::size_t trials, std::uint64_t seed,
                             unsigned threads) {
  return coverage_curve(scenario, {m}, trials, seed, threads).front();
}

std::vector<std::size_t> coverage_hitting_times(const CoverageScenario& scenario, std::size_t trials,
                                                std::uint64_t seed, unsigned threads) {
  scenario.validate();
  std::vector<std::size_t> times(trials, 0);
  parallel_for(trials, threads, [&](std::size_t t) {
    CoverageTrial trial(scenario, derive_seed(seed, 0, t));
    while (!trial.covered()) {
      require(trial.detections() < kMaxDetections, ErrorCode::Unreachable, "coverage not reached within 2^32 detections");
      trial.step();
    }
    times[t] = trial.detections();
  });
  return times;
}

std::size_t min_measurements(std::size_t k, double p, double target, std::uint64_t min_count, std::uint64_t seed,
                             const MinMeasurementOptions& options) {
  check_probability(p);
  require(target > 0.0 && target < 1.0, ErrorCode::InvalidArgument, "target must be in (0, 1)");
  require(k >= 1 && min_count >= 1, ErrorCode::InvalidArgument, "need K >= 1 and min_count >= 1");

  if (min_count == 1 && options.dark_per_period == 0.0 && k <= 3) {
    if (k == 1) return 1;
    constexpr std::size_t kLimit = 100'000'000;
    for (std::size_t m = k; m < kLimit; ++m) {
      const double success = k == 2 ? success_k2(p, m) : success_k3(p, m);
      if (success >= target) return m;
    }
    fail(ErrorCode::Unreachable, "target not reached below 1e8 detections");
  }

  require(options.trials >= 1, ErrorCode::InvalidArgument, "need at least one trial");
  CoverageScenario scenario;
  scenario.k = k;
  scenario.n = std::max(options.n, k);
  scenario.p = p;
  scenario.dark_per_period = options.dark_per_period;
  scenario.min_count = min_count;
  scenario.rule = SuccessRule::Coverage;
  std::vector<std::size_t> times = coverage_hitting_times(scenario, options.trials, seed, options.threads);
  std::sort(times.begin(), times.end());
  // success(M) = #{t : time_t <= M} / trials reaches the target first at the
  // ceil(target * trials)-th smallest hitting time.
  const auto needed = static_cast<std::size_t>(std::ceil(target * static_cast<double>(options.trials) - 1e-9));
  return times[std::clamp<std::size_t>(needed, 1, options.trials) - 1];
}

ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& samples) {
  std::vector<double> ks;
  for (const auto& s : samples) ks.push_back(s.first);
  std::sort(ks.begin(), ks.end());
  require(samples.size() >= 3, ErrorCode::InsufficientData, "need at least three (K, M_min) samples");
  require(std::adjacent_find(ks.begin(), ks.end()) == ks.end(), ErrorCode::InsufficientData,
          "sample K values must be distinct");

  const double n = static_cast<double>(samples.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [x, y] : samples) {
    sx += x;
    sy += y;
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : samples) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  ScalingFit fit;
  fit.samples = samples;
  fit.alpha = sxy / sxx;
  fit.c = my - fit.alpha * mx;
  double ss_res = 0.0;
  for (const auto& [x, y] : samples) {
    const double r = y - (fit.alpha * x + fit.c);
    ss_res += r * r;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

}  // namespace qcs
