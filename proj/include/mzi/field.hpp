#pragma once

// Transverse-mode, time-domain simulation of the detector field.
//
// Coordinates are in beam-waist units. Every beam is a sum of components
// a * u0(x - d) exp(i g x), where u0 is the unit-power Gaussian and (g, d) is
// the accumulated phase ramp and detector-plane displacement of the route.
// Reflections mirror the in-plane transverse coordinate, (g, d) -> (-g, -d).

#include <array>
#include <cstdint>
#include <vector>

#include "mzi/optics.hpp"

namespace mzi {

struct Grid {
  int n_points = 2048;
  double half_width = 8.0;

  double spacing() const { return 2.0 * half_width / n_points; }
  // Cell-centred samples, symmetric about x = 0.
  double x(int j) const { return -half_width + (j + 0.5) * spacing(); }

  /// Throws InvalidParameter unless n_points is a power of two >= 16 and
  /// half_width >= 6.
  void validate() const;
  bool operator==(const Grid&) const = default;
};

struct FieldFrame {
  Grid grid;
  std::vector<Amp> samples;
  int time_index = 0;
};

/// Integral of |E|^2.
double total_power(const FieldFrame& frame);

/// Power on x > 0 minus power on x < 0. Evaluated with band-limited
/// square-wave weights, so it is spectrally accurate for smooth fields.
double quad_signal(const FieldFrame& frame);

/// Unit-power Gaussian (2/pi)^(1/4) exp(-x^2).
FieldFrame gaussian_mode(const Grid& grid);

/// samples(x) <- samples(x - d) exp(i g x); the shift is applied in the
/// Fourier domain. Throws RampUnresolved when |g| * spacing >= 0.1 or
/// |d| >= half_width / 2.
FieldFrame perturb(const FieldFrame& frame, double g, double d);

struct Tilt {
  double g = 0.0;
  double d = 0.0;
};
using MirrorTilts = std::array<Tilt, 5>;

/// Instantaneous ramp and detector-plane displacement of each driven mirror.
MirrorTilts evaluate_drives(const NetworkSpec& net, double t);

struct OutputFrames {
  FieldFrame detector;
  FieldFrame other_port;
  FieldFrame inner_exit;
  FieldFrame dark_port;  // inner output toward F, before mirror F
};

/// Exact coherent sum of all routes at each output for the given tilts.
OutputFrames output_frames(const NetworkSpec& net, const MirrorTilts& tilts, const Grid& grid);
FieldFrame detector_frame(const NetworkSpec& net, const MirrorTilts& tilts, const Grid& grid);

/// Seeded additive white noise on q and p. Off by default.
struct NoiseHook {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

/// q, p at the detector and the dark-port power, one entry per time sample
/// t_k = k / n_samples.
struct TimeSeries {
  std::vector<double> q;
  std::vector<double> p;
  std::vector<double> dark;
  int n_samples = 0;

  double t(int k) const { return static_cast<double>(k) / n_samples; }
};

/// Frames are independent; `threads` = 0 uses the hardware concurrency. The
/// result does not depend on the thread count.
TimeSeries run_timeseries(const NetworkSpec& net, const Grid& grid, int n_samples,
                          const NoiseHook& noise = {}, unsigned threads = 0);

}  // namespace mzi
