#pragma once

// Power spectra of detector time series, peak detection and power-law fits.

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mzi/field.hpp"

namespace mzi {

struct SpectrumBin {
  int freq = 0;  // cycles per window
  double q_power = 0.0;
  double p_power = 0.0;
};

struct Peak {
  int freq = 0;
  double magnitude = 0.0;  // tone amplitude of q at this bin
  bool above_threshold = false;
};

struct SlopeFit {
  std::string param;
  double exponent = 0.0;
  double residual = 0.0;
};

/// One-sided spectrum normalised so that sum(q_power) is the mean square of
/// q(t); a tone a sin(2 pi f t) contributes a^2/2 to bin f.
struct SpectrumReport {
  std::vector<SpectrumBin> bins;  // 0 .. n/2
  std::vector<Peak> peaks;
  std::vector<SlopeFit> slopes;
  double threshold = 0.0;
};

/// A bin is a peak iff q_power > factor * max(median bin power, noise_floor).
/// The floor stands in for detector sensitivity: without it a noiseless
/// simulation would call any term above rounding level a peak.
struct PeakCriterion {
  double factor = 1e6;
  double noise_floor = 1e-18;
};

/// Rectangular window; drive frequencies are integer cycles per window.
SpectrumReport power_spectrum(const TimeSeries& ts);

double peak_threshold(const SpectrumReport& report, const PeakCriterion& criterion);

/// Sets `threshold` and records a Peak for each requested frequency.
void mark_peaks(SpectrumReport& report, std::span<const int> freqs, const PeakCriterion& criterion);

/// Number of bins (excluding DC) whose q_power exceeds the threshold.
int count_peaks(const SpectrumReport& report);

/// Tone amplitude represented by a one-sided power bin.
double bin_amplitude(const SpectrumReport& report, int freq);

enum class Channel { Quad, Power };

/// |X_f|, the magnitude of the discrete Fourier coefficient
/// sum_k x_k exp(-2 pi i f k / n). A tone of amplitude a at bin f gives a n / 2.
/// Throws FreqOutOfRange unless 1 <= freq < n/2.
double single_bin(const TimeSeries& ts, int freq, Channel channel = Channel::Quad);

struct PowerLawFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double residual = 0.0;  // max |y / fit - 1|
};

/// Least squares in log-log coordinates. Needs >= 4 points with positive x
/// spanning a decade; throws DegenerateSweep if any y <= 1e-15.
PowerLawFit fit_slope(std::span<const std::pair<double, double>> points);

}  // namespace mzi
