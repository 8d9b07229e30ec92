#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "common.hpp"
#include "qcs/random.hpp"
#include "qcs/reconstruction.hpp"
#include "qcs/time_lens.hpp"

using namespace qcs;
using qcs::testing::code_of;

namespace {

SparseEstimate coeffs(std::vector<double> c) {
  SparseEstimate e;
  e.coefficients = std::move(c);
  return e;
}

SparseSignal tone20() {
  return normalized(make_tone_signal(ToneSet{{{20e9, 1.0, 0.0}}, 1e-9}, 64).signal);
}

}  // namespace

TEST(Histogram, EmptyAndSingleBin) {
  PhotonStream empty{{}, 4000};
  const CountHistogram h0 = bin_timestamps(empty, 4, 4e-9);
  EXPECT_EQ(h0.bins, (std::vector<std::uint64_t>{0, 0, 0, 0}));
  EXPECT_EQ(h0.total, 0u);
  PhotonStream s{{1000, 1500, 1999, 5200}, 8000};   // period 4000 ps, bin width 1000 ps
  const CountHistogram h = bin_timestamps(s, 4, 4e-9);
  EXPECT_EQ(h.bins, (std::vector<std::uint64_t>{0, 4, 0, 0}));
}

TEST(Counting, DirectRatio) {
  CountHistogram h{{3, 1, 0, 0}, 4};
  EXPECT_EQ(counting_estimate(h).coefficients, (std::vector<double>{0.75, 0.25, 0.0, 0.0}));
  CountHistogram one{{0, 0, 9}, 9};
  EXPECT_EQ(counting_estimate(one).coefficients, (std::vector<double>{0.0, 0.0, 1.0}));
  EXPECT_EQ(code_of([] { counting_estimate(CountHistogram{{0, 0}, 0}); }), ErrorCode::EmptyMeasurement);
}

TEST(Counting, EtaCalibration) {
  CountHistogram h{{3, 1}, 4};
  const auto e = counting_estimate(h, 0.5);
  EXPECT_DOUBLE_EQ(e.coefficients[0], 1.5);
}

TEST(Counting, TimeLensPowers) {
  const TimeLensConfig lens = make_time_lens(1074e-24, 1024e-12, 1024);
  const ToneSet tones{{{5.4e9, std::sqrt(0.7), 0.0}, {27.0e9, std::sqrt(0.3), 0.0}}, 1024e-12};
  const auto est = counting_estimate(bin_timestamps(tls_sample(tones, lens, 100000, 0.0, 21), 1024, 1024e-12));
  EXPECT_NEAR(est.coefficients[lens_bin(frequency_to_time(5.4e9, lens), lens)], 0.7, 0.01);
  EXPECT_NEAR(est.coefficients[lens_bin(frequency_to_time(27.0e9, lens), lens)], 0.3, 0.01);
}

TEST(Counting, ConsistencyHalvesError) {
  const TimeLensConfig lens = make_time_lens(1074e-24, 1024e-12, 1024);
  const ToneSet tones{{{5.4e9, std::sqrt(0.5), 0.0}, {16.2e9, std::sqrt(0.3), 0.0}, {37.8e9, std::sqrt(0.2), 0.0}},
                      1024e-12};
  std::vector<std::size_t> bins;
  for (const Tone& t : tones.tones) bins.push_back(lens_bin(frequency_to_time(t.frequency_hz, lens), lens));
  auto err = [&](std::size_t m, std::uint64_t stream) {
    double total = 0.0;
    for (std::uint64_t run = 0; run < 200; ++run) {
      const auto e = counting_estimate(bin_timestamps(tls_sample(tones, lens, m, 0.0, derive_seed(5, stream, run)),
                                                      1024, 1024e-12));
      double worst = 0.0;
      const double truth[] = {0.5, 0.3, 0.2};
      for (std::size_t i = 0; i < 3; ++i) worst = std::max(worst, std::abs(e.coefficients[bins[i]] - truth[i]));
      total += worst;
    }
    return total / 200.0;
  };
  const double ratio = err(1000, 0) / err(4000, 1);
  EXPECT_GT(ratio, 1.7);
  EXPECT_LT(ratio, 2.3);
}

TEST(Dft, SingleTimestampUnitMagnitude) {
  PhotonStream s{{12345}, 100000};
  const auto spec = dft_estimate(s, {0.0, 1e9, 3.3e9, 20e9});
  for (double m : spec.magnitude) EXPECT_NEAR(m, 1.0, 1e-12);
}

TEST(Dft, AlignedPhasors) {
  PhotonStream s{{}, 1'000'000};
  for (std::int64_t i = 0; i < 500; ++i) s.timestamps_ps.push_back(50 * i * 7);
  const auto spec = dft_estimate(s, {20e9});
  EXPECT_NEAR(spec.magnitude[0], 500.0, 1e-9);
}

TEST(Dft, RandomPhasorsAndDc) {
  Rng rng = make_rng(3);
  std::uniform_int_distribution<std::int64_t> t(0, 999'999'999);
  PhotonStream s{{}, 1'000'000'000};
  for (int i = 0; i < 10000; ++i) s.timestamps_ps.push_back(t(rng));
  std::sort(s.timestamps_ps.begin(), s.timestamps_ps.end());
  std::vector<double> grid{0.0};
  for (int k = 1; k <= 400; ++k) grid.push_back(1e6 * k + 0.37e6);
  const auto spec = dft_estimate(s, grid);
  EXPECT_DOUBLE_EQ(spec.magnitude[0], 10000.0);
  double power = 0.0;
  for (std::size_t k = 1; k < grid.size(); ++k) power += spec.magnitude[k] * spec.magnitude[k];
  EXPECT_NEAR(power / 400.0, 10000.0, 1500.0);   // E|s|^2 = M
  EXPECT_EQ(code_of([] { dft_estimate(PhotonStream{{}, 10}, {1.0}); }), ErrorCode::EmptyMeasurement);
}

TEST(Dft, HarmonicPathMatchesDirect) {
  const Waveform w = render_intensity(tone20(), {1.0, 1.0}, 4096);
  const PhotonStream s = sample_fixed_count(w, 1e-6, 3000, 17);
  const auto fast = dft_estimate_harmonics(s, 1e-9, 32);
  const auto direct = dft_estimate(s, fast.frequencies_hz);
  ASSERT_EQ(fast.magnitude.size(), 33u);
  for (std::size_t k = 0; k < 33; ++k) {
    EXPECT_NEAR(fast.magnitude[k], direct.magnitude[k], 1e-7 * 3000);
    EXPECT_DOUBLE_EQ(fast.frequencies_hz[k], k * 1e9);
  }
}

TEST(TopK, Examples) {
  EXPECT_EQ(top_k_select(coeffs({0.1, 0.9, 0.0, 0.0}), 1), (std::vector<std::size_t>{1}));
  EXPECT_EQ(top_k_select(coeffs({0.5, 0.5}), 1), (std::vector<std::size_t>{0}));
  EXPECT_EQ(code_of([] { top_k_select(coeffs({0.5, 0.5}), 3); }), ErrorCode::InvalidArgument);
}

TEST(TopK, ScaleInvariant) {
  Rng rng = make_rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> c(40);
    for (double& x : c) x = std::floor(u(rng) * 20.0);   // plenty of ties
    std::vector<double> scaled = c;
    for (double& x : scaled) x *= 3.7;
    EXPECT_EQ(top_k_select(coeffs(c), 7), top_k_select(coeffs(scaled), 7));
  }
}

TEST(TopK, Fig2bScenario) {
  const Waveform w = render_intensity(tone20(), {1.0, 1.0}, 4096);
  const PhotonStream s = sample_fixed_count(w, 1e-6, 10000, 2);
  const auto est = spectral_estimate(dft_estimate_harmonics(s, 1e-9, 32), 1.0, 64);
  EXPECT_EQ(top_k_select(est, 1), (std::vector<std::size_t>{20}));
}

TEST(Support, Threshold) {
  EXPECT_EQ(recover_support_time(CountHistogram{{0, 4, 0, 3}, 7}, 2), (std::vector<std::size_t>{1, 3}));
  EXPECT_TRUE(recover_support_time(CountHistogram{{1, 1, 1, 1}, 4}, 2).empty());
}

TEST(Reconstruct, IdentityBasis) {
  const auto r = reconstruct(coeffs({0.2, 0.0, 0.8}), Basis::Identity, 1e-6);
  EXPECT_EQ(r.waveform, (std::vector<double>{0.2, 0.0, 0.8}));
  EXPECT_FALSE(r.nmse.has_value());
}

TEST(Reconstruct, PerfectEstimateBothBases) {
  const SparseSignal tone = tone20();
  std::vector<double> c(64, 0.0);
  c[20] = 1.0;
  const auto rf = reconstruct(with_topk(coeffs(c), 1), Basis::Fourier, 1e-9, &tone);
  EXPECT_NEAR(*rf.nmse, 0.0, 1e-24);
  EXPECT_TRUE(*rf.success);

  const SparseSignal train = make_dirac_train(16, {3, 9}, {1.0, 0.5}, 1e-6);
  std::vector<double> d(16, 0.0);
  d[3] = 1.0;
  d[9] = 0.5;
  const auto rt = reconstruct(with_topk(coeffs(d), 2), Basis::Identity, 1e-6, &train);
  EXPECT_NEAR(*rt.nmse, 0.0, 1e-24);
  EXPECT_TRUE(*rt.success);
}

TEST(Reconstruct, DimensionMismatch) {
  const SparseSignal tone = tone20();
  EXPECT_EQ(code_of([&] { reconstruct(coeffs(std::vector<double>(32, 0.1)), Basis::Fourier, 1e-9, &tone); }),
            ErrorCode::InvalidArgument);
}

TEST(Reconstruct, EndToEndTone) {
  const SparseSignal tone = tone20();
  const Waveform w = render_intensity(tone, {1.0, 1.0}, 4096);
  const PhotonStream s = sample_fixed_count(w, 1e-6, 10000, 31);
  const auto est = with_topk(spectral_estimate(dft_estimate_harmonics(s, 1e-9, 32), 1.0, 64), 1);
  const auto r = reconstruct(est, Basis::Fourier, 1e-9, &tone);
  EXPECT_LE(*r.nmse, 0.05);
  EXPECT_TRUE(*r.success);
  nlohmann::json j;
  to_json(j, r);
  EXPECT_TRUE(j.contains("nmse"));
  EXPECT_EQ(j["support"], nlohmann::json::array({20}));
}

TEST(EquivalentMatrix, Rows) {
  const EquivalentMatrix phi = equivalent_matrix(PhotonStream{{1500, 3200, 100}, 4000}, 4, 4e-9);
  EXPECT_EQ(phi.hot_columns(), (std::vector<std::size_t>{1, 3, 0}));
  const Eigen::MatrixXd d = phi.dense();
  EXPECT_EQ(d.rows(), 3);
  EXPECT_EQ(d(0, 1), 1.0);
  EXPECT_EQ(d(1, 3), 1.0);
  EXPECT_EQ(d(2, 0), 1.0);
  EXPECT_EQ(d.sum(), 3.0);
  EXPECT_EQ(phi.apply({10, 11, 12, 13}), (std::vector<double>{11, 13, 10}));
}

TEST(EquivalentMatrix, DualityWithHistogram) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Waveform w{{1.0, 5.0, 0.5, 2.0, 0.0, 3.0}, 6e-9};
    const PhotonStream s = sample_fixed_count(w, 1e-7, 500, seed);
    const std::size_t n = 6 + seed % 5;
    const auto h = bin_timestamps(s, n, 6e-9);
    EXPECT_EQ(equivalent_matrix(s, n, 6e-9).column_sums(), h.bins);
  }
}

TEST(Nmse, UnitNormalized) {
  EXPECT_NEAR(normalized_mse({2.0, 0.0, -2.0}, {1.0, 0.0, -1.0}), 0.0, 1e-15);
  EXPECT_NEAR(normalized_mse({0.0, 0.0, 1.0}, {1.0, 0.0, 0.0}), 2.0, 1e-15);
}

TEST(Waveform, CsvHasHeader) {
  std::ostringstream out;
  write_waveform_csv(out, {0.5, 1.25});
  EXPECT_EQ(out.str(), "index,value\n0,0.5\n1,1.25\n");
}
