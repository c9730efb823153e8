#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mzi/error.hpp"
#include "mzi/spectra.hpp"

using namespace mzi;

namespace {

TimeSeries tones(int n, std::initializer_list<std::pair<int, double>> q_tones, double dc = 0.0) {
  TimeSeries ts;
  ts.n_samples = n;
  ts.q.assign(n, dc);
  ts.p.assign(n, 1.0);
  ts.dark.assign(n, 0.0);
  for (int k = 0; k < n; ++k)
    for (auto [f, a] : q_tones) ts.q[k] += a * std::sin(2.0 * std::numbers::pi * f * k / n);
  return ts;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

}  // namespace

TEST(Spectrum, ToneLandsInItsBin) {
  const auto s = power_spectrum(tones(256, {{30, 2e-3}}));
  ASSERT_EQ(s.bins.size(), 129u);
  EXPECT_NEAR(s.bins[30].q_power, 2e-6, 1e-20);
  EXPECT_NEAR(bin_amplitude(s, 30), 2e-3, 1e-17);
  EXPECT_LT(s.bins[31].q_power, 1e-30);
  EXPECT_NEAR(s.bins[0].p_power, 1.0, 1e-15);
}

TEST(Spectrum, Parseval) {
  const auto ts = tones(512, {{3, 0.4}, {100, 0.1}, {256 - 1, 0.05}}, 0.2);
  const auto s = power_spectrum(ts);
  double sum = 0.0, ms = 0.0;
  for (const auto& b : s.bins) sum += b.q_power;
  for (double q : ts.q) ms += q * q;
  EXPECT_NEAR(sum, ms / ts.n_samples, 1e-14);
}

TEST(Spectrum, PeaksUseFloorAndMedian) {
  auto s = power_spectrum(tones(256, {{30, 1e-3}, {34, 1e-9}}));
  const int freqs[] = {30, 34};
  mark_peaks(s, freqs, {});
  EXPECT_DOUBLE_EQ(s.threshold, 1e6 * 1e-18);
  ASSERT_EQ(s.peaks.size(), 2u);
  EXPECT_TRUE(s.peaks[0].above_threshold);
  EXPECT_NEAR(s.peaks[0].magnitude, 1e-3, 1e-15);
  EXPECT_FALSE(s.peaks[1].above_threshold);
  EXPECT_EQ(count_peaks(s), 1);
}

TEST(SingleBin, MatchesToneAmplitude) {
  const auto ts = tones(128, {{5, 0.25}, {9, 1.0}});
  EXPECT_NEAR(single_bin(ts, 5), 0.25 * 64, 1e-12);
  EXPECT_NEAR(single_bin(ts, 9), 64.0, 1e-12);
  EXPECT_NEAR(single_bin(ts, 6), 0.0, 1e-12);
  EXPECT_NEAR(single_bin(ts, 5, Channel::Power), 0.0, 1e-12);
}

TEST(SingleBin, Range) {
  const auto ts = tones(64, {});
  EXPECT_EQ(code_of([&] { single_bin(ts, 0); }), ErrorCode::FreqOutOfRange);
  EXPECT_EQ(code_of([&] { single_bin(ts, 32); }), ErrorCode::FreqOutOfRange);
  EXPECT_NO_THROW(single_bin(ts, 31));
}

TEST(FitSlope, ExactPowerLaw) {
  std::vector<std::pair<double, double>> pts;
  for (double x : {1e-4, 2e-4, 5e-4, 1e-3}) pts.emplace_back(x, 3.0 * x * x);
  const auto fit = fit_slope(pts);
  EXPECT_NEAR(fit.exponent, 2.0, 1e-12);
  EXPECT_NEAR(fit.prefactor, 3.0, 1e-9);
  EXPECT_LT(fit.residual, 1e-12);
}

TEST(FitSlope, Errors) {
  std::vector<std::pair<double, double>> three{{1, 1}, {10, 10}, {100, 100}};
  EXPECT_EQ(code_of([&] { fit_slope(three); }), ErrorCode::InvalidParameter);
  std::vector<std::pair<double, double>> narrow{{1, 1}, {2, 2}, {3, 3}, {4, 4}};
  EXPECT_EQ(code_of([&] { fit_slope(narrow); }), ErrorCode::InvalidParameter);
  std::vector<std::pair<double, double>> zero{{1, 1}, {2, 2}, {5, 0.0}, {10, 10}};
  EXPECT_EQ(code_of([&] { fit_slope(zero); }), ErrorCode::DegenerateSweep);
  std::vector<std::pair<double, double>> negx{{-1, 1}, {2, 2}, {5, 5}, {10, 10}};
  EXPECT_EQ(code_of([&] { fit_slope(negx); }), ErrorCode::InvalidParameter);
}
