#pragma once

// Element algebra and the fixed nested Mach-Zehnder topology.
//
//              mirror E         mirror A
//   source ─ BS1 ──────── BS2 ─────────┐
//             │            │           │
//             │            └─ mirror B ─ BS3 ── mirror F ─┐
//             │                          └── inner exit X │
//             └── mirror C ── [block] ── outer phase ──── BS4 ── detector D
//                                                          └── other port
//
// Ports are labelled by the mirror whose incident beam they carry. BS1 sends
// its transmitted beam into the inner interferometer and reflects into C; BS2
// transmits into A; BS3 transmits A (reflects B) toward F; BS4 transmits F
// (reflects C) into D. Mirrors are ideal reflectors with amplitude i, i.e. a
// beam splitter with T = 0 in the symmetric convention.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mzi {

using Amp = std::complex<double>;

enum class Mirror : std::uint8_t { E = 0, A = 1, B = 2, C = 3, F = 4 };

inline constexpr std::array<Mirror, 5> kAllMirrors{Mirror::E, Mirror::A, Mirror::B,
                                                   Mirror::C, Mirror::F};

constexpr std::size_t index(Mirror m) { return static_cast<std::size_t>(m); }
char mirror_label(Mirror m);
std::optional<Mirror> parse_mirror(std::string_view label);

enum class Output : std::uint8_t { Detector, OtherPort, InnerExit };

/// Lossless two-port splitter. Transmitted amplitude sqrt(T), reflected i*sqrt(1-T).
struct BeamSplitter {
  double transmissivity = 0.5;

  Amp t() const { return {std::sqrt(transmissivity), 0.0}; }
  Amp r() const { return {0.0, std::sqrt(1.0 - transmissivity)}; }
};

/// out1 = t*in1 + r*in2, out2 = r*in1 + t*in2.
std::pair<Amp, Amp> apply_beamsplitter(const BeamSplitter& bs, Amp in1, Amp in2);

inline constexpr Amp kMirrorReflection{0.0, 1.0};

/// Sinusoidal tilt of one mirror. The instantaneous phase-ramp coefficient is
/// g(t) = g0 sin(2 pi freq t + phase) with t in analysis windows; the tilt
/// displaces the beam at the detector plane by g(t) * lever.
struct MirrorDrive {
  Mirror mirror = Mirror::A;
  int freq = 1;
  double g0 = 1e-3;
  double phase = 0.0;
  double lever = 1.0;

  double ramp(double t) const;
  bool operator==(const MirrorDrive&) const = default;
};

inline constexpr double kWeakRegimeLimit = 0.05;

/// User-facing description of the network. Defaults reproduce the pre- and
/// post-selected states (1, i, 1)/sqrt(3) and (1, -i, 1)/sqrt(3) on (A, B, C).
struct NetworkParams {
  double outer_T = 2.0 / 3.0;
  double inner_T1 = 0.5;
  double inner_T2 = 0.5;
  double inner_phase = 0.0;  // on arm B, before BS3
  double outer_phase = 0.0;  // on arm C, after mirror C
  bool block_c = false;
  double leak_eps = 0.0;
  std::vector<MirrorDrive> drives;

  const MirrorDrive* drive(Mirror m) const;
  bool operator==(const NetworkParams&) const = default;
};

/// Unitary admixture of the inner exit into the dark port:
///   F' = c F + s conj(u) X   (reflection-like cross term)
///   X' = c X - s u F
/// with u the phase of the nominal exit amplitude, so the static leak toward F
/// is exactly leak_eps (real, positive) when the inner interferometer is dark.
struct LeakAdmixture {
  double c = 1.0;
  Amp to_dark{0.0, 0.0};  // s * conj(u)
  Amp to_exit{0.0, 0.0};  // -s * u
};

/// Validated network with derived quantities.
struct NetworkSpec {
  NetworkParams params;
  LeakAdmixture leak;
  double dark_port_residual = 0.0;  // |static amplitude toward F|, drives off
  std::vector<std::string> warnings;

  BeamSplitter outer() const { return {params.outer_T}; }
  BeamSplitter inner_split() const { return {params.inner_T1}; }
  BeamSplitter inner_merge() const { return {params.inner_T2}; }
};

/// Validates parameters and derives the leak admixture. Drive frequencies must
/// lie in [1, n_samples/2).
NetworkSpec build_network(const NetworkParams& params, int n_samples = 4096);

// ---------------------------------------------------------------------------
// Topology trace, generic over the beam representation. The state engine uses
// scalar amplitudes; the field engine uses lists of transverse components.

template <class Beam>
struct Trace {
  std::array<Beam, 5> incident{};  // beam arriving at each mirror
  Beam detector{};
  Beam other_port{};
  Beam inner_exit{};

  const Beam& at(Mirror m) const { return incident[index(m)]; }
  const Beam& output(Output o) const {
    switch (o) {
      case Output::Detector: return detector;
      case Output::OtherPort: return other_port;
      case Output::InnerExit: return inner_exit;
    }
    return detector;
  }
};

/// Ops must provide, for its Beam type:
///   Beam transmit(const Beam&, Amp) const;   coefficient, no reflection
///   Beam reflect(const Beam&, Amp) const;    coefficient with reflection
///   Beam mirror(const Beam&, Mirror) const;  hit a mirror
///   Beam phase(const Beam&, double) const;
///   Beam block(const Beam&) const;
///   Beam add(const Beam&, const Beam&) const;
///
/// When `inject` is set, the incident beam at that mirror is replaced by the
/// given beam; pass zero sources to obtain the downstream transfer from it.
template <class Beam, class Ops>
Trace<Beam> trace_network(const NetworkSpec& net, const Ops& ops, const Beam& source,
                          const Beam& vacuum_outer, const Beam& vacuum_inner,
                          const std::optional<std::pair<Mirror, Beam>>& inject = {}) {
  auto split = [&ops](const BeamSplitter& bs, const Beam& in1, const Beam& in2) {
    return std::pair<Beam, Beam>{ops.add(ops.transmit(in1, bs.t()), ops.reflect(in2, bs.r())),
                                 ops.add(ops.reflect(in1, bs.r()), ops.transmit(in2, bs.t()))};
  };
  auto arrive = [&inject](Mirror m, Beam beam) {
    if (inject && inject->first == m) return inject->second;
    return beam;
  };

  Trace<Beam> tr;
  auto [to_inner, to_c] = split(net.outer(), source, vacuum_outer);

  tr.incident[index(Mirror::E)] = arrive(Mirror::E, to_inner);
  const Beam e = ops.mirror(tr.at(Mirror::E), Mirror::E);

  auto [to_a, to_b] = split(net.inner_split(), e, vacuum_inner);
  tr.incident[index(Mirror::A)] = arrive(Mirror::A, to_a);
  tr.incident[index(Mirror::B)] = arrive(Mirror::B, to_b);
  const Beam a = ops.mirror(tr.at(Mirror::A), Mirror::A);
  const Beam b = ops.phase(ops.mirror(tr.at(Mirror::B), Mirror::B), net.params.inner_phase);

  auto [dark, exit] = split(net.inner_merge(), a, b);
  const Beam leaked = ops.add(ops.transmit(dark, net.leak.c), ops.reflect(exit, net.leak.to_dark));
  tr.inner_exit = ops.add(ops.reflect(dark, net.leak.to_exit), ops.transmit(exit, net.leak.c));

  tr.incident[index(Mirror::F)] = arrive(Mirror::F, leaked);
  const Beam f = ops.mirror(tr.at(Mirror::F), Mirror::F);

  // A blocked lower arm removes the beam on both sides of mirror C.
  Beam c_in = arrive(Mirror::C, net.params.block_c ? ops.block(to_c) : to_c);
  tr.incident[index(Mirror::C)] = c_in;
  Beam c = ops.phase(ops.mirror(c_in, Mirror::C), net.params.outer_phase);
  if (net.params.block_c) c = ops.block(c);

  auto [d, other] = split(net.outer(), f, c);
  tr.detector = d;
  tr.other_port = other;
  return tr;
}

/// Scalar amplitudes; reflections carry no transverse bookkeeping.
struct ScalarOps {
  Amp transmit(Amp b, Amp k) const { return b * k; }
  Amp reflect(Amp b, Amp k) const { return b * k; }
  Amp mirror(Amp b, Mirror) const { return b * kMirrorReflection; }
  Amp phase(Amp b, double phi) const { return b * std::polar(1.0, phi); }
  Amp block(Amp) const { return {}; }
  Amp add(Amp x, Amp y) const { return x + y; }
};

/// Sign (+1/-1) with which a tilt of mirror `m`, expressed in the beam frame
/// just after reflection from it, appears in the detector-plane transverse
/// coordinate. Each later reflection reverses the in-plane coordinate.
int tilt_orientation(Mirror m);

}  // namespace mzi
