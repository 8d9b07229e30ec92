#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "qcs/baseline.hpp"
#include "qcs/coverage.hpp"
#include "qcs/error.hpp"
#include "qcs/experiments.hpp"
#include "qcs/harness.hpp"
#include "qcs/random.hpp"
#include "qcs/time_lens.hpp"

using namespace qcs;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s  criterion %2d  %-28s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void coverage_fidelity() {
  double worst = 0.0;
  for (std::size_t k : {2u, 3u}) {
    for (double p : {0.3, 0.5, 0.9}) {
      CoverageScenario s;
      s.k = k;
      s.n = 64;
      s.p = p;
      std::vector<std::size_t> ms;
      for (std::size_t m = k; m <= 20; ++m) ms.push_back(m);
      for (const auto& e : coverage_curve(s, ms, 100000, derive_seed(1, k, static_cast<std::uint64_t>(p * 10)))) {
        const double exact = k == 2 ? success_k2(p, e.measurements) : success_k3(p, e.measurements);
        worst = std::max(worst, std::abs(e.rate - exact));
      }
    }
  }
  report(1, "coverage formula fidelity", worst <= 0.01, fmt("max |MC - analytic| = %.4f (tol 0.01)", worst));
}

void spot_values() {
  CoverageScenario s;
  s.n = 64;
  s.p = 0.5;
  s.k = 2;
  const CoverageEstimate mc2 = coverage_mc(s, 2, 100000, 21);
  s.k = 3;
  const CoverageEstimate mc3 = coverage_mc(s, 3, 100000, 22);
  const double a2 = success_k2(0.5, 2), a3 = success_k3(0.5, 3);
  const bool mc_ok = mc2.ci_lo <= 2.0 / 3.0 && 2.0 / 3.0 <= mc2.ci_hi && mc3.ci_lo <= 20.0 / 49.0 &&
                     20.0 / 49.0 <= mc3.ci_hi;
  const bool exact_ok = std::abs(a2 - 2.0 / 3.0) < 1e-15 && std::abs(a3 - 20.0 / 49.0) < 1e-15;
  report(2, "spot values", mc_ok && exact_ok,
         fmt("k2=%.6f (MC %.4f) k3=%.6f (MC %.4f)", a2, mc2.rate, a3, mc3.rate));
}

void success_scaling() {
  experiments::SuccessVsMParams p;
  p.n = std::size_t{1} << 15;
  p.ks = {10, 20, 50, 100};
  p.p = 0.98;
  p.relative_ms = {{0.5, 0}, {1, 0}, {2, 10}, {3, 0}};
  p.trials = 1000;
  p.min_count = 2;
  p.dark_per_period = 0.01;
  p.rule = SuccessRule::ExactSupport;
  const auto t0 = std::chrono::steady_clock::now();
  const auto points = experiments::success_vs_m(p, 1);
  const double elapsed = seconds_since(t0);
  bool ok = elapsed < 120.0;
  std::string detail;
  for (const auto& pt : points) {
    const std::size_t m = pt.estimate.measurements;
    if (m >= 2 * pt.k + 10) {
      ok = ok && pt.estimate.rate >= 0.99;
      detail += fmt("K=%zu M=%zu %.3f; ", pt.k, m, pt.estimate.rate);
    } else if (m <= pt.k) {
      ok = ok && pt.estimate.rate <= 0.5;
    }
  }
  report(3, "success vs M (c0=2)", ok, detail + fmt("%.1fs", elapsed));
}

void mmin_scaling() {
  experiments::MminVsKParams p;
  p.min_counts = {1};
  const auto r = experiments::mmin_vs_k(p, 1);
  const ScalingFit fit = r.fits.front().second;
  bool below = true;
  for (const auto& pt : r.points) below = below && pt.m_min < pt.classical;
  const auto& last = r.points.back();
  report(4, "M_min vs K", fit.alpha >= 1.8 && fit.alpha <= 2.6 && fit.r2 >= 0.95 && below,
         fmt("alpha=%.3f r2=%.4f M_min(%zu)=%zu bound=%zu", fit.alpha, fit.r2, last.k, last.m_min, last.classical));
}

void nmse_scaling() {
  const auto r = experiments::nmse_vs_m(experiments::NmseVsMParams{}, 1);
  report(5, "NMSE scaling", std::abs(r.loglog_slope + 0.5) <= 0.1, fmt("slope=%.4f (target -0.5 +/- 0.1)", r.loglog_slope));
}

void time_lens_mapping() {
  const TimeLensConfig lens = make_time_lens(1074e-24, 1024e-12, 1024);
  const double t = frequency_to_time(16.2e9, lens);
  double worst = 0.0;
  for (double f = -70e9; f <= 70e9; f += 0.37e9) {
    const double back = time_to_frequency(frequency_to_time(f, lens), lens);
    if (f != 0.0) worst = std::max(worst, std::abs(back - f) / std::abs(f));
  }
  report(6, "time-lens mapping", std::abs(t + 109.3e-12) <= 0.1e-12 && worst <= 1e-12,
         fmt("t(16.2 GHz)=%.3f ps, round-trip rel err %.2e", t * 1e12, worst));
}

void jitter_bandwidth() {
  const auto r = experiments::jitter_bandwidth(experiments::JitterBandwidthParams{});
  bool ok = true;
  double product = 0.0;
  std::vector<std::pair<double, double>> gaussian;
  for (const auto& pt : r.points) {
    if (pt.tau_over_sigma != 0.0) continue;
    product = pt.product;
    ok = ok && std::abs(pt.product - 0.312) <= 0.005;
    gaussian.emplace_back(pt.fwhm_s, pt.f3db_hz);
  }
  std::sort(gaussian.begin(), gaussian.end());
  for (std::size_t i = 1; i < gaussian.size(); ++i) ok = ok && gaussian[i].second < gaussian[i - 1].second;
  report(7, "jitter bandwidth", ok && !gaussian.empty(), fmt("f3dB*FWHM=%.6f, monotone in 1/FWHM", product));
}

void dft_path() {
  experiments::DftDemoParams p;
  const auto r = experiments::dft_demo(p, 1);
  double worst = 0.0;
  for (const auto& run : r.runs) worst = std::max(worst, run.nmse);
  report(8, "DFT path", r.correct_runs >= 99 && worst <= 0.05,
         fmt("top-1 correct %zu/%zu, max NMSE %.2e", r.correct_runs, r.runs.size(), worst));
}

void confusion() {
  experiments::ConfusionParams p;
  p.photons = {1, 4};
  const auto r = experiments::confusion_tls(p, 1);
  const auto& one = r.points[0];
  const auto& four = r.points[1];
  bool dominant = true;
  for (std::size_t i = 0; i < four.confusion.size(); ++i)
    for (std::size_t j = 0; j < four.confusion.size(); ++j)
      if (i != j) dominant = dominant && four.confusion[i][i] > four.confusion[i][j];
  report(9, "TLS confusion", std::abs(one.accuracy - 0.47) <= 0.02 && four.accuracy > one.accuracy && dominant,
         fmt("b=%.4f acc(1)=%.4f acc(4)=%.4f diag-dominant=%s", r.background, one.accuracy, four.accuracy,
             dominant ? "yes" : "no"));
}

void rip_concentration() {
  const std::size_t n = 256, k = 4;
  const std::size_t m = classical_bound(k, n, 2.0);
  const SensingMatrix phi = one_hot_sensing_matrix(m, n, 1);
  const RipReport r = rip_check(phi, k, 0.5, 1000, 2, Basis::Fourier);
  report(10, "RIP concentration", r.pass_fraction >= 0.99,
         fmt("M=%zu pass=%.3f delta_hat=%.3f (Fourier-sparse)", m, r.pass_fraction, r.delta_hat));
}

void omp_sanity() {
  const std::size_t n = 256, k = 8, m = 32;
  int exact = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const SensingMatrix theta = gaussian_sensing_matrix(m, n, derive_seed(11, 0, t));
    Rng rng = make_rng(derive_seed(11, 1, t));
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd s = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    std::vector<std::size_t> truth(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
    for (std::size_t i : truth) s(static_cast<Eigen::Index>(i)) = normal(rng);
    std::sort(truth.begin(), truth.end());
    try {
      OmpResult r = omp_solve(theta, theta.entries * s, k);
      std::sort(r.support.begin(), r.support.end());
      if (r.support == truth) ++exact;
    } catch (const Error&) {
    }
  }
  report(11, "OMP baseline (M=4K)", exact >= 95, fmt("exact support %d/100", exact));
}

void determinism() {
  const fs::path configs = fs::path(QCS_SOURCE_DIR) / "configs";
  const fs::path work = fs::temp_directory_path() / "qcs_acceptance_determinism";
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(configs))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  bool ok = !files.empty();
  std::size_t compared = 0;
  for (const auto& f : files) {
    std::vector<std::string> sums[2];
    for (int rep = 0; rep < 2; ++rep) {
      ExperimentConfig cfg = load_config(f);
      cfg.output_dir = work / f.stem() / std::to_string(rep);
      fs::remove_all(cfg.output_dir);
      for (const auto& o : run_experiment(cfg).outputs) sums[rep].push_back(o.sha256);
    }
    ok = ok && sums[0] == sums[1];
    compared += sums[0].size();
  }
  fs::remove_all(work);
  report(12, "determinism", ok, fmt("%zu configs, %zu CSVs byte-identical", files.size(), compared));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria{coverage_fidelity, spot_values, success_scaling,
                                                   mmin_scaling,      nmse_scaling, time_lens_mapping,
                                                   jitter_bandwidth,  dft_path,     confusion,
                                                   rip_concentration, omp_sanity,   determinism};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i + 1), "exception", false, e.what());
    }
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
