#include "mzi/optics.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "mzi/error.hpp"

namespace mzi {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::PostSelectionSingular: return "PostSelectionSingular";
    case ErrorCode::RampUnresolved: return "RampUnresolved";
    case ErrorCode::FreqOutOfRange: return "FreqOutOfRange";
    case ErrorCode::DegenerateSweep: return "DegenerateSweep";
    case ErrorCode::UnknownScenario: return "UnknownScenario";
    case ErrorCode::InvalidOverride: return "InvalidOverride";
    case ErrorCode::InvalidParamPath: return "InvalidParamPath";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

char mirror_label(Mirror m) {
  static constexpr char labels[] = {'E', 'A', 'B', 'C', 'F'};
  return labels[index(m)];
}

std::optional<Mirror> parse_mirror(std::string_view label) {
  if (label.size() != 1) return std::nullopt;
  for (Mirror m : kAllMirrors)
    if (mirror_label(m) == label[0]) return m;
  return std::nullopt;
}

std::pair<Amp, Amp> apply_beamsplitter(const BeamSplitter& bs, Amp in1, Amp in2) {
  const Amp t = bs.t();
  const Amp r = bs.r();
  return {t * in1 + r * in2, r * in1 + t * in2};
}

double MirrorDrive::ramp(double t) const {
  return g0 * std::sin(2.0 * std::numbers::pi * freq * t + phase);
}

const MirrorDrive* NetworkParams::drive(Mirror m) const {
  for (const auto& d : drives)
    if (d.mirror == m) return &d;
  return nullptr;
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidParameter, what);
}

void require_transmissivity(double T, const char* name) {
  std::ostringstream os;
  os << name << " = " << T << " outside [0, 1]";
  require(std::isfinite(T) && T >= 0.0 && T <= 1.0, os.str());
}

// Reflection parity only; coefficients and blocks are ignored so the
// orientation is a property of the geometry.
struct ParityOps {
  using Beam = std::optional<int>;

  static Beam join(const Beam& x, const Beam& y) {
    if (!x) return y;
    if (!y) return x;
    // Both routes through a mirror must agree, otherwise the topology would
    // not interfere for even transverse modes.
    return *x == *y ? x : Beam{0};
  }
  Beam transmit(const Beam& b, Amp) const { return b; }
  Beam reflect(const Beam& b, Amp) const { return b ? Beam{-*b} : b; }
  Beam mirror(const Beam& b, Mirror) const { return reflect(b, {}); }
  Beam phase(const Beam& b, double) const { return b; }
  Beam block(const Beam& b) const { return b; }
  Beam add(const Beam& x, const Beam& y) const { return join(x, y); }
};

}  // namespace

int tilt_orientation(Mirror m) {
  NetworkSpec geometry;
  geometry.leak = LeakAdmixture{};
  const ParityOps ops;
  const auto tr = trace_network<ParityOps::Beam>(geometry, ops, std::nullopt, std::nullopt,
                                                 std::nullopt, std::pair{m, ParityOps::Beam{1}});
  // The tilt is applied after the mirror's own reflection, which flipped the
  // injected +1 once.
  return -tr.detector.value_or(0);
}

NetworkSpec build_network(const NetworkParams& params, int n_samples) {
  require_transmissivity(params.outer_T, "outer_T");
  require_transmissivity(params.inner_T1, "inner_T1");
  require_transmissivity(params.inner_T2, "inner_T2");
  require(std::isfinite(params.inner_phase) && std::isfinite(params.outer_phase),
          "phases must be finite");
  require(std::isfinite(params.leak_eps) && params.leak_eps >= 0.0, "leak_eps must be >= 0");
  require(n_samples >= 2, "n_samples must be >= 2");

  NetworkSpec net;
  net.params = params;

  std::set<Mirror> seen;
  for (const auto& d : params.drives) {
    const char label = mirror_label(d.mirror);
    require(seen.insert(d.mirror).second, std::string("duplicate drive for mirror ") + label);
    if (d.freq < 1 || 2 * d.freq >= n_samples) {
      std::ostringstream os;
      os << "drive " << label << " frequency " << d.freq << " not in [1, " << n_samples / 2
         << ")";
      throw Error(ErrorCode::FreqOutOfRange, os.str());
    }
    require(std::isfinite(d.g0) && d.g0 >= 0.0, std::string("drive ") + label + " g0 must be >= 0");
    require(std::isfinite(d.phase) && std::isfinite(d.lever),
            std::string("drive ") + label + " phase and lever must be finite");
    if (d.g0 > kWeakRegimeLimit) {
      std::ostringstream os;
      os << "drive " << label << " g0 = " << d.g0 << " exceeds weak regime limit "
         << kWeakRegimeLimit;
      net.warnings.push_back(os.str());
    }
  }

  // Nominal inner exit amplitude without admixture fixes the rotation phase.
  const ScalarOps ops;
  const auto nominal = trace_network<Amp>(net, ops, Amp{1.0}, Amp{}, Amp{});
  if (params.leak_eps > 0.0) {
    const double exit_mag = std::abs(nominal.inner_exit);
    require(exit_mag > 1e-12 && params.leak_eps <= exit_mag,
            "leak_eps exceeds the amplitude available at the inner exit");
    const double s = params.leak_eps / exit_mag;
    const Amp u = nominal.inner_exit / exit_mag;
    net.leak.c = std::sqrt(1.0 - s * s);
    net.leak.to_dark = s * std::conj(u);
    net.leak.to_exit = -s * u;
  }

  const auto traced = trace_network<Amp>(net, ops, Amp{1.0}, Amp{}, Amp{});
  net.dark_port_residual = std::abs(traced.at(Mirror::F));
  return net;
}

}  // namespace mzi
