#pragma once

// Forward/backward path states and weak values of path projectors.

#include <array>

#include "mzi/optics.hpp"

namespace mzi {

inline constexpr double kSingularOverlap = 1e-12;

/// Amplitude at every mirror plane (E, A, B, C, F), plus the post-selection
/// overlap <Phi|Psi> (the amplitude reaching the detector).
struct PathState {
  std::array<Amp, 5> amps{};
  Amp overlap{};

  Amp operator[](Mirror m) const { return amps[index(m)]; }
};

/// Amplitudes incident on each mirror for a unit-amplitude source.
PathState forward_state(const NetworkSpec& net);

/// Dual amplitudes phi_p = conj(T_p) where T_p is the transfer from the
/// incident point of mirror p to the chosen output, so that
/// sum_p conj(phi_p) psi_p over a cut equals the output amplitude.
PathState backward_state(const NetworkSpec& net, Output port = Output::Detector);

/// conj(phi_p) psi_p / <Phi|Psi>; throws PostSelectionSingular when
/// |<Phi|Psi>| <= 1e-12.
Amp weak_value(const NetworkSpec& net, Mirror path);
Amp weak_value(const PathState& forward, const PathState& backward, Mirror path);

/// Weak value of the product of two port projectors, evaluated as the sum of
/// route amplitudes visiting both ports. Distinct arms (A, B, C) give exactly
/// zero; p1 == p2 reduces to weak_value(p1).
Amp joint_weak_value(const NetworkSpec& net, Mirror p1, Mirror p2);

/// 3x3 transfer matrix: rows (detector, other port, inner exit), columns
/// (source, outer vacuum port, inner vacuum port).
using NetworkMatrix = std::array<std::array<Amp, 3>, 3>;
NetworkMatrix network_matrix(const NetworkSpec& net);

}  // namespace mzi
