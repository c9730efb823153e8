#include "mzi/analytic.hpp"

#include <cmath>

#include "mzi/error.hpp"
#include "mzi/state.hpp"

namespace mzi {

FirstOrderModel first_order_model(const NetworkSpec& net) {
  const PathState fwd = forward_state(net);
  const PathState bwd = backward_state(net);

  FirstOrderModel model;
  model.drives = net.params.drives;
  model.detection_probability = std::norm(fwd.overlap);
  for (Mirror m : kAllMirrors) {
    model.orientation[index(m)] = tilt_orientation(m);
    model.weighted_weak_values[index(m)] = std::conj(bwd[m]) * fwd[m] * std::conj(fwd.overlap);
  }
  if (std::abs(fwd.overlap) > kSingularOverlap) {
    std::array<Amp, 5> w{};
    for (Mirror m : kAllMirrors) w[index(m)] = std::conj(bwd[m]) * fwd[m] / fwd.overlap;
    model.weak_values = w;
  }
  return model;
}

double detector_displacement(const FirstOrderModel& model, const MirrorDrive& drive, double t) {
  return model.orientation[index(drive.mirror)] * drive.lever * drive.ramp(t);
}

double predict_q(const FirstOrderModel& model, double t) {
  if (!model.weak_values)
    throw Error(ErrorCode::PostSelectionSingular, "first-order model has no weak values");
  double q = 0.0;
  for (const auto& drive : model.drives)
    q += (*model.weak_values)[index(drive.mirror)].real() * detector_displacement(model, drive, t);
  return model.kappa * q;
}

double predict_detector_q(const FirstOrderModel& model, double t) {
  double q = 0.0;
  for (const auto& drive : model.drives)
    q += model.weighted_weak_values[index(drive.mirror)].real() *
         detector_displacement(model, drive, t);
  return model.kappa * q;
}

}  // namespace mzi
