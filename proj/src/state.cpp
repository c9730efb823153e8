#include "mzi/state.hpp"

#include <sstream>

#include "mzi/error.hpp"

namespace mzi {

namespace {

Trace<Amp> trace_from_source(const NetworkSpec& net) {
  return trace_network<Amp>(net, ScalarOps{}, Amp{1.0}, Amp{}, Amp{});
}

Amp transfer(const NetworkSpec& net, Mirror from, Output to) {
  const auto tr = trace_network<Amp>(net, ScalarOps{}, Amp{}, Amp{}, Amp{},
                                     std::pair{from, Amp{1.0}});
  return tr.output(to);
}

void require_nonsingular(Amp overlap) {
  if (std::abs(overlap) <= kSingularOverlap) {
    std::ostringstream os;
    os << "post-selection overlap |<Phi|Psi>| = " << std::abs(overlap)
       << " is singular; weak values undefined";
    throw Error(ErrorCode::PostSelectionSingular, os.str());
  }
}

// Routes from the source to the detector, as the set of mirrors each visits.
struct Route {
  Mirror arm;
  std::array<bool, 5> visits;
};

constexpr std::array<Route, 3> kRoutes{{
    {Mirror::A, {true, true, false, false, true}},
    {Mirror::B, {true, false, true, false, true}},
    {Mirror::C, {false, false, false, true, false}},
}};

}  // namespace

PathState forward_state(const NetworkSpec& net) {
  const auto tr = trace_from_source(net);
  PathState s;
  s.amps = tr.incident;
  s.overlap = tr.detector;
  return s;
}

PathState backward_state(const NetworkSpec& net, Output port) {
  PathState s;
  for (Mirror m : kAllMirrors) s.amps[index(m)] = std::conj(transfer(net, m, port));
  s.overlap = trace_from_source(net).output(port);
  return s;
}

Amp weak_value(const PathState& forward, const PathState& backward, Mirror path) {
  // The overlap is recomputed from the arm cut so that global phase changes of
  // either state cancel between numerator and denominator.
  Amp overlap{};
  for (Mirror arm : {Mirror::A, Mirror::B, Mirror::C})
    overlap += std::conj(backward[arm]) * forward[arm];
  require_nonsingular(overlap);
  return std::conj(backward[path]) * forward[path] / overlap;
}

Amp weak_value(const NetworkSpec& net, Mirror path) {
  return weak_value(forward_state(net), backward_state(net), path);
}

Amp joint_weak_value(const NetworkSpec& net, Mirror p1, Mirror p2) {
  const PathState fwd = forward_state(net);
  const PathState bwd = backward_state(net);
  require_nonsingular(fwd.overlap);
  if (p1 == p2) return weak_value(fwd, bwd, p1);

  Amp sum{};
  for (const Route& r : kRoutes) {
    if (r.visits[index(p1)] && r.visits[index(p2)])
      sum += std::conj(bwd[r.arm]) * fwd[r.arm];
  }
  return sum / fwd.overlap;
}

NetworkMatrix network_matrix(const NetworkSpec& net) {
  NetworkMatrix m{};
  const std::array<std::array<Amp, 3>, 3> inputs{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
  for (std::size_t col = 0; col < 3; ++col) {
    const auto& in = inputs[col];
    const auto tr = trace_network<Amp>(net, ScalarOps{}, in[0], in[1], in[2]);
    m[0][col] = tr.detector;
    m[1][col] = tr.other_port;
    m[2][col] = tr.inner_exit;
  }
  return m;
}

}  // namespace mzi
