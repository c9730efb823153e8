#include "mzi/field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "fft.hpp"
#include "mzi/error.hpp"

namespace mzi {

namespace {

constexpr double kMaxRampPerSample = 0.1;

// Per-grid constants shared by every frame on that grid.
struct GridTables {
  std::vector<Amp> mode;           // u0 samples
  std::vector<Amp> mode_spectrum;  // FFT(u0)
  std::vector<double> wavenumber;  // angular, 0 at Nyquist
  std::vector<double> quad_weight; // band-limited sign(x) * dx
};

GridTables make_tables(const Grid& grid) {
  const int n = grid.n_points;
  const double dx = grid.spacing();
  const double L = grid.half_width;
  GridTables tb;
  tb.mode.resize(n);
  const double norm = std::pow(2.0 / std::numbers::pi, 0.25);
  for (int j = 0; j < n; ++j) {
    const double x = grid.x(j);
    tb.mode[j] = norm * std::exp(-x * x);
  }
  tb.mode_spectrum.resize(n);
  detail::fft_plan(n).forward(tb.mode, tb.mode_spectrum);

  tb.wavenumber.resize(n);
  for (int m = 0; m < n; ++m) {
    const int signed_m = m < n / 2 ? m : m - n;
    tb.wavenumber[m] = m == n / 2 ? 0.0 : 2.0 * std::numbers::pi * signed_m / (n * dx);
  }

  // sign(x) on the periodic cell [-L, L) is (4/pi) sum_{m odd} sin(m pi x/L)/m;
  // the sum is exact on the grid for fields band-limited well below Nyquist.
  tb.quad_weight.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    const double theta = std::numbers::pi * grid.x(j) / L;
    double acc = 0.0;
    for (int m = 1; m < n / 2; m += 2) acc += std::sin(m * theta) / m;
    tb.quad_weight[j] = 4.0 / std::numbers::pi * acc * dx;
  }
  return tb;
}

const GridTables& tables(const Grid& grid) {
  static std::mutex mutex;
  static std::map<std::pair<int, double>, std::unique_ptr<GridTables>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{grid.n_points, grid.half_width}];
  if (!slot) slot = std::make_unique<GridTables>(make_tables(grid));
  return *slot;
}

void check_tilt(const Grid& grid, double g, double d) {
  if (!(std::abs(g) * grid.spacing() < kMaxRampPerSample) ||
      !(std::abs(d) < grid.half_width / 2.0)) {
    std::ostringstream os;
    os << "ramp g = " << g << ", displacement d = " << d << " not resolved on grid (n = "
       << grid.n_points << ", half_width = " << grid.half_width << ")";
    throw Error(ErrorCode::RampUnresolved, os.str());
  }
}

// Shift in the Fourier domain, then apply the ramp. `spectrum` is FFT(frame).
void shifted_with_ramp(const Grid& grid, const GridTables& tb, std::span<const Amp> spectrum,
                       double g, double d, std::vector<Amp>& scratch, std::vector<Amp>& out) {
  const int n = grid.n_points;
  scratch.resize(n);
  out.resize(n);
  for (int m = 0; m < n; ++m) {
    const double k = tb.wavenumber[m];
    const Amp shift = m == n / 2 ? Amp{std::cos(0.5 * std::numbers::pi * n / grid.half_width * d), 0.0}
                                 : std::polar(1.0, -k * d);
    scratch[m] = spectrum[m] * shift;
  }
  detail::fft_plan(n).backward(scratch, out);
  const double inv_n = 1.0 / n;
  for (int j = 0; j < n; ++j) {
    const Amp ramp = g == 0.0 ? Amp{1.0, 0.0} : std::polar(1.0, g * grid.x(j));
    out[j] *= ramp * inv_n;
  }
}

struct Component {
  Amp amp;
  double g;
  double d;
};
using Beam = std::vector<Component>;

struct ComponentOps {
  const MirrorTilts* tilts;

  Beam transmit(const Beam& b, Amp k) const {
    Beam out;
    if (k == Amp{}) return out;
    for (const auto& c : b) out.push_back({c.amp * k, c.g, c.d});
    return out;
  }
  Beam reflect(const Beam& b, Amp k) const {
    Beam out;
    if (k == Amp{}) return out;
    for (const auto& c : b) out.push_back({c.amp * k, -c.g, -c.d});
    return out;
  }
  Beam mirror(const Beam& b, Mirror m) const {
    const Tilt& tilt = (*tilts)[index(m)];
    Beam out = reflect(b, kMirrorReflection);
    // Shift by d, then ramp: u(x - d0 - d) exp(i g0 (x - d)) exp(i g x).
    for (auto& c : out) {
      c.amp *= std::polar(1.0, -c.g * tilt.d);
      c.g += tilt.g;
      c.d += tilt.d;
    }
    return out;
  }
  Beam phase(const Beam& b, double phi) const { return transmit(b, std::polar(1.0, phi)); }
  Beam block(const Beam&) const { return {}; }
  Beam add(const Beam& x, const Beam& y) const {
    Beam out = x;
    out.insert(out.end(), y.begin(), y.end());
    return out;
  }
};

Trace<Beam> trace_components(const NetworkSpec& net, const MirrorTilts& tilts) {
  const ComponentOps ops{&tilts};
  return trace_network<Beam>(net, ops, Beam{{Amp{1.0}, 0.0, 0.0}}, Beam{}, Beam{});
}

// Renders beams onto the grid, evaluating each distinct (g, d) shape once.
class Renderer {
public:
  explicit Renderer(const Grid& grid) : grid_(grid), tb_(tables(grid)) {}

  void render(const Beam& beam, std::vector<Amp>& out) {
    out.assign(grid_.n_points, Amp{});
    for (const auto& c : beam) {
      if (c.amp == Amp{}) continue;
      const auto& shape = shape_for(c.g, c.d);
      for (int j = 0; j < grid_.n_points; ++j) out[j] += c.amp * shape[j];
    }
  }

  void reset() { shapes_.clear(); }

private:
  const std::vector<Amp>& shape_for(double g, double d) {
    for (const auto& s : shapes_)
      if (s.g == g && s.d == d) return s.samples;
    check_tilt(grid_, g, d);
    Shape s{g, d, {}};
    if (g == 0.0 && d == 0.0) {
      s.samples = tb_.mode;
    } else {
      shifted_with_ramp(grid_, tb_, tb_.mode_spectrum, g, d, scratch_, s.samples);
    }
    shapes_.push_back(std::move(s));
    return shapes_.back().samples;
  }

  struct Shape {
    double g;
    double d;
    std::vector<Amp> samples;
  };
  const Grid& grid_;
  const GridTables& tb_;
  std::vector<Shape> shapes_;
  std::vector<Amp> scratch_;
};

double power_of(std::span<const Amp> samples, double dx) {
  double acc = 0.0;
  for (const Amp& s : samples) acc += std::norm(s);
  return acc * dx;
}

double quad_of(std::span<const Amp> samples, const GridTables& tb) {
  double acc = 0.0;
  for (std::size_t j = 0; j < samples.size(); ++j) acc += std::norm(samples[j]) * tb.quad_weight[j];
  return acc;
}

}  // namespace

void Grid::validate() const {
  if (n_points < 16 || !std::has_single_bit(static_cast<unsigned>(n_points)))
    throw Error(ErrorCode::InvalidParameter, "grid n_points must be a power of two >= 16");
  if (!(half_width >= 6.0) || !std::isfinite(half_width))
    throw Error(ErrorCode::InvalidParameter, "grid half_width must be >= 6 waists");
}

double total_power(const FieldFrame& frame) {
  return power_of(frame.samples, frame.grid.spacing());
}

double quad_signal(const FieldFrame& frame) { return quad_of(frame.samples, tables(frame.grid)); }

FieldFrame gaussian_mode(const Grid& grid) {
  grid.validate();
  return FieldFrame{grid, tables(grid).mode, 0};
}

FieldFrame perturb(const FieldFrame& frame, double g, double d) {
  const Grid& grid = frame.grid;
  check_tilt(grid, g, d);
  const auto& tb = tables(grid);
  std::vector<Amp> spectrum(grid.n_points), scratch;
  detail::fft_plan(grid.n_points).forward(frame.samples, spectrum);
  FieldFrame out{grid, {}, frame.time_index};
  shifted_with_ramp(grid, tb, spectrum, g, d, scratch, out.samples);
  return out;
}

MirrorTilts evaluate_drives(const NetworkSpec& net, double t) {
  MirrorTilts tilts{};
  for (const auto& drive : net.params.drives) {
    const double g = drive.ramp(t);
    tilts[index(drive.mirror)] = Tilt{g, g * drive.lever};
  }
  return tilts;
}

OutputFrames output_frames(const NetworkSpec& net, const MirrorTilts& tilts, const Grid& grid) {
  grid.validate();
  const auto tr = trace_components(net, tilts);
  Renderer renderer(grid);
  OutputFrames out;
  for (auto* f : {&out.detector, &out.other_port, &out.inner_exit, &out.dark_port}) f->grid = grid;
  renderer.render(tr.detector, out.detector.samples);
  renderer.render(tr.other_port, out.other_port.samples);
  renderer.render(tr.inner_exit, out.inner_exit.samples);
  renderer.render(tr.at(Mirror::F), out.dark_port.samples);
  return out;
}

FieldFrame detector_frame(const NetworkSpec& net, const MirrorTilts& tilts, const Grid& grid) {
  grid.validate();
  const auto tr = trace_components(net, tilts);
  Renderer renderer(grid);
  FieldFrame out{grid, {}, 0};
  renderer.render(tr.detector, out.samples);
  return out;
}

TimeSeries run_timeseries(const NetworkSpec& net, const Grid& grid, int n_samples,
                          const NoiseHook& noise, unsigned threads) {
  grid.validate();
  if (n_samples < 2 || !std::has_single_bit(static_cast<unsigned>(n_samples)))
    throw Error(ErrorCode::InvalidParameter, "n_samples must be a power of two");
  for (const auto& d : net.params.drives) {
    if (d.freq < 1 || 2 * d.freq >= n_samples)
      throw Error(ErrorCode::FreqOutOfRange, "drive frequency at or above Nyquist");
  }

  TimeSeries ts;
  ts.n_samples = n_samples;
  ts.q.assign(n_samples, 0.0);
  ts.p.assign(n_samples, 0.0);
  ts.dark.assign(n_samples, 0.0);
  const auto& tb = tables(grid);
  const double dx = grid.spacing();

  auto work = [&](int begin, int end) {
    Renderer renderer(grid);
    std::vector<Amp> field;
    for (int k = begin; k < end; ++k) {
      MirrorTilts tilts{};
      for (const auto& drive : net.params.drives) {
        // Reduce the phase argument exactly before scaling by 2 pi.
        const long long cycles = (static_cast<long long>(drive.freq) * k) % n_samples;
        const double arg = 2.0 * std::numbers::pi * static_cast<double>(cycles) / n_samples;
        const double g = drive.g0 * std::sin(arg + drive.phase);
        tilts[index(drive.mirror)] = Tilt{g, g * drive.lever};
      }
      const auto tr = trace_components(net, tilts);
      renderer.reset();
      renderer.render(tr.detector, field);
      ts.q[k] = quad_of(field, tb);
      ts.p[k] = power_of(field, dx);
      renderer.render(tr.at(Mirror::F), field);
      ts.dark[k] = power_of(field, dx);
    }
  };

  unsigned n_threads = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(n_samples));
  if (n_threads <= 1) {
    work(0, n_samples);
  } else {
    const int chunk = (n_samples + static_cast<int>(n_threads) - 1) / static_cast<int>(n_threads);
    std::vector<std::exception_ptr> errors(n_threads);
    {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < n_threads; ++w) {
        const int begin = static_cast<int>(w) * chunk;
        const int end = std::min(n_samples, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, w, begin, end] {
          try {
            work(begin, end);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  if (noise.sigma > 0.0) {
    std::mt19937_64 rng(noise.seed);
    std::normal_distribution<double> normal(0.0, noise.sigma);
    for (int k = 0; k < n_samples; ++k) {
      ts.q[k] += normal(rng);
      ts.p[k] += normal(rng);
    }
  }
  return ts;
}

}  // namespace mzi
