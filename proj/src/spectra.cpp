#include "mzi/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fft.hpp"
#include "mzi/error.hpp"

namespace mzi {

namespace {

constexpr double kUnderflow = 1e-15;

std::vector<double> one_sided_power(std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  std::vector<Amp> in(x.begin(), x.end()), out(n);
  detail::fft_plan(n).forward(in, out);
  std::vector<double> power(n / 2 + 1);
  const double scale = 1.0 / (static_cast<double>(n) * n);
  for (int k = 0; k <= n / 2; ++k) {
    const double two_sided = std::norm(out[k]) * scale;
    power[k] = (k == 0 || k == n / 2) ? two_sided : 2.0 * two_sided;
  }
  return power;
}

}  // namespace

SpectrumReport power_spectrum(const TimeSeries& ts) {
  const int n = ts.n_samples;
  if (n < 2 || (n & (n - 1)) != 0)
    throw Error(ErrorCode::InvalidParameter, "n_samples must be a power of two");
  const auto q = one_sided_power(ts.q);
  const auto p = one_sided_power(ts.p);
  SpectrumReport report;
  report.bins.reserve(q.size());
  for (int k = 0; k <= n / 2; ++k) report.bins.push_back({k, q[k], p[k]});
  return report;
}

double peak_threshold(const SpectrumReport& report, const PeakCriterion& criterion) {
  std::vector<double> powers;
  powers.reserve(report.bins.size());
  for (const auto& b : report.bins) powers.push_back(b.q_power);
  auto mid = powers.begin() + static_cast<std::ptrdiff_t>(powers.size() / 2);
  std::nth_element(powers.begin(), mid, powers.end());
  return criterion.factor * std::max(*mid, criterion.noise_floor);
}

void mark_peaks(SpectrumReport& report, std::span<const int> freqs, const PeakCriterion& criterion) {
  report.threshold = peak_threshold(report, criterion);
  report.peaks.clear();
  for (int f : freqs) {
    if (f < 0 || f >= static_cast<int>(report.bins.size()))
      throw Error(ErrorCode::FreqOutOfRange, "peak frequency outside spectrum");
    report.peaks.push_back(
        {f, bin_amplitude(report, f), report.bins[f].q_power > report.threshold});
  }
}

int count_peaks(const SpectrumReport& report) {
  return static_cast<int>(std::count_if(report.bins.begin() + 1, report.bins.end(),
                                        [&](const SpectrumBin& b) { return b.q_power > report.threshold; }));
}

double bin_amplitude(const SpectrumReport& report, int freq) {
  const double pw = report.bins.at(freq).q_power;
  const bool edge = freq == 0 || freq + 1 == static_cast<int>(report.bins.size());
  return edge ? std::sqrt(pw) : std::sqrt(2.0 * pw);
}

double single_bin(const TimeSeries& ts, int freq, Channel channel) {
  const int n = ts.n_samples;
  if (freq < 1 || 2 * freq >= n) {
    std::ostringstream os;
    os << "frequency " << freq << " outside [1, " << n / 2 << ")";
    throw Error(ErrorCode::FreqOutOfRange, os.str());
  }
  const auto& x = channel == Channel::Quad ? ts.q : ts.p;
  double re = 0.0, im = 0.0;
  for (int k = 0; k < n; ++k) {
    const long long reduced = (static_cast<long long>(freq) * k) % n;
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(reduced) / n;
    re += x[k] * std::cos(angle);
    im -= x[k] * std::sin(angle);
  }
  return std::hypot(re, im);
}

PowerLawFit fit_slope(std::span<const std::pair<double, double>> points) {
  if (points.size() < 4)
    throw Error(ErrorCode::InvalidParameter, "power-law fit needs at least 4 points");
  double x_min = points.front().first, x_max = x_min;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !std::isfinite(x))
      throw Error(ErrorCode::InvalidParameter, "power-law fit needs positive x");
    if (!(y > kUnderflow) || !std::isfinite(y)) {
      std::ostringstream os;
      os << "sweep value y = " << y << " at x = " << x << " is below " << kUnderflow;
      throw Error(ErrorCode::DegenerateSweep, os.str());
    }
    x_min = std::min(x_min, x);
    x_max = std::max(x_max, x);
  }
  if (x_max / x_min < 10.0 * (1.0 - 1e-9))
    throw Error(ErrorCode::InvalidParameter, "power-law fit needs x spanning a decade");

  const double n = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [x, y] : points) {
    sx += std::log(x);
    sy += std::log(y);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : points) {
    const double dx = std::log(x) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y) - my);
  }
  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  fit.prefactor = std::exp(my - fit.exponent * mx);
  for (const auto& [x, y] : points)
    fit.residual = std::max(fit.residual, std::abs(y / (fit.prefactor * std::pow(x, fit.exponent)) - 1.0));
  return fit;
}

}  // namespace mzi
