#pragma once

// First-order prediction of the quad-cell signal from weak values. Used as an
// independent check of the field engine.

#include <array>
#include <numbers>
#include <optional>
#include <vector>

#include "mzi/optics.hpp"

namespace mzi {

/// dQ/dd at d = 0 for a displaced unit Gaussian, Q(d) = erf(sqrt(2) d).
inline constexpr double kQuadResponse = 2.0 * std::numbers::sqrt2 * std::numbers::inv_sqrtpi;

struct FirstOrderModel {
  double kappa = kQuadResponse;
  // Weak values of each mirror-port projector; empty when the post-selection
  // is singular.
  std::optional<std::array<Amp, 5>> weak_values;
  // conj(phi_p) psi_p conj(<Phi|Psi>): weak value times detection probability.
  // Finite even when the overlap vanishes.
  std::array<Amp, 5> weighted_weak_values{};
  double detection_probability = 0.0;
  std::array<int, 5> orientation{};  // detector-frame sign of each mirror's tilt
  std::vector<MirrorDrive> drives;
};

FirstOrderModel first_order_model(const NetworkSpec& net);

/// Detector-frame displacement s_m g0 lever sin(2 pi f t + phase).
double detector_displacement(const FirstOrderModel& model, const MirrorDrive& drive, double t);

/// Per detected photon: q(t) = kappa sum_m Re(w_m) d_m(t). Throws
/// PostSelectionSingular when the model has no weak values.
double predict_q(const FirstOrderModel& model, double t);

/// Raw quad signal in source-power units, comparable with the field engine:
/// kappa sum_m Re(P w_m) d_m(t), with P the detection probability.
double predict_detector_q(const FirstOrderModel& model, double t);

}  // namespace mzi
