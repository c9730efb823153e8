#include <gtest/gtest.h>

#include <cmath>

#include "mzi/error.hpp"
#include "mzi/field.hpp"
#include "mzi/state.hpp"

using namespace mzi;

TEST(Field, GaussianHasUnitPowerAndNoImbalance) {
  const auto u = gaussian_mode({});
  EXPECT_NEAR(total_power(u), 1.0, 1e-14);
  EXPECT_NEAR(quad_signal(u), 0.0, 1e-15);
}

TEST(Field, DisplacedQuadMatchesErf) {
  // Q(d) = erf(sqrt(2) d) for the unit Gaussian.
  const auto u = gaussian_mode({});
  EXPECT_NEAR(quad_signal(perturb(u, 0.0, 0.1)), 0.1585194188782061, 1e-13);
  EXPECT_NEAR(quad_signal(perturb(u, 0.0, -0.1)), -0.1585194188782061, 1e-13);
  EXPECT_NEAR(quad_signal(perturb(u, 0.0, 1e-3)), 0.001595768057760288, 1e-15);
  EXPECT_NEAR(quad_signal(perturb(u, 0.0, 0.5)), 0.682689492137086, 1e-12);
}

TEST(Field, RampAloneDoesNotMoveIntensity) {
  const auto u = gaussian_mode({});
  const auto tilted = perturb(u, 0.3, 0.0);
  EXPECT_NEAR(total_power(tilted), 1.0, 1e-14);
  EXPECT_NEAR(quad_signal(tilted), 0.0, 1e-14);
}

TEST(Field, PerturbConservesPower) {
  const auto u = gaussian_mode({});
  EXPECT_NEAR(total_power(perturb(u, 0.05, 0.37)), 1.0, 1e-13);
}

TEST(Field, UnresolvedRampThrows) {
  const Grid grid{256, 8.0};
  const auto u = gaussian_mode(grid);
  const double too_steep = 0.2 / grid.spacing();
  EXPECT_THROW(perturb(u, too_steep, 0.0), Error);
  EXPECT_THROW(perturb(u, 0.0, 4.0), Error);
  try {
    perturb(u, too_steep, 0.0);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RampUnresolved);
  }
}

TEST(Field, GridValidation) {
  EXPECT_THROW((Grid{1000, 8.0}.validate()), Error);
  EXPECT_THROW((Grid{2048, 3.0}.validate()), Error);
  EXPECT_NO_THROW((Grid{64, 6.0}.validate()));
  const Grid g{16, 8.0};
  EXPECT_DOUBLE_EQ(g.x(0), -g.x(15));
}

TEST(Field, UndrivenOutputsMatchStateEngine) {
  const auto net = build_network({});
  const Grid grid{256, 8.0};
  const auto frames = output_frames(net, {}, grid);
  const auto m = network_matrix(net);
  EXPECT_NEAR(total_power(frames.detector), std::norm(m[0][0]), 1e-14);
  EXPECT_NEAR(total_power(frames.other_port), std::norm(m[1][0]), 1e-14);
  EXPECT_NEAR(total_power(frames.inner_exit), std::norm(m[2][0]), 1e-14);
  EXPECT_NEAR(total_power(frames.dark_port), 0.0, 1e-28);
  EXPECT_NEAR(total_power(frames.detector) + total_power(frames.other_port) + total_power(frames.inner_exit),
              1.0, 1e-14);
}

TEST(Field, DrivenNetworkConservesPower) {
  NetworkParams p;
  p.drives = {{Mirror::A, 3, 0.02, 0.0, 1.0}, {Mirror::C, 5, 0.03, 0.4, 1.5}};
  const auto net = build_network(p, 64);
  const Grid grid{512, 8.0};
  for (double t : {0.05, 0.13, 0.71}) {
    const auto f = output_frames(net, evaluate_drives(net, t), grid);
    EXPECT_NEAR(total_power(f.detector) + total_power(f.other_port) + total_power(f.inner_exit), 1.0, 1e-12);
  }
}

TEST(Field, EvaluateDrives) {
  NetworkParams p;
  p.drives = {{Mirror::B, 4, 2e-3, 0.0, 3.0}};
  const auto net = build_network(p, 64);
  const auto tilts = evaluate_drives(net, 1.0 / 16.0);
  EXPECT_NEAR(tilts[index(Mirror::B)].g, 2e-3, 1e-18);
  EXPECT_NEAR(tilts[index(Mirror::B)].d, 6e-3, 1e-18);
  EXPECT_EQ(tilts[index(Mirror::A)].g, 0.0);
}

TEST(TimeSeries, ThreadCountDoesNotChangeResult) {
  NetworkParams p;
  p.drives = {{Mirror::A, 3, 1e-3, 0.0, 1.0}, {Mirror::B, 5, 1e-3, 0.0, 1.0}};
  const auto net = build_network(p, 64);
  const Grid grid{256, 8.0};
  const auto one = run_timeseries(net, grid, 64, {}, 1);
  const auto four = run_timeseries(net, grid, 64, {}, 4);
  EXPECT_EQ(one.q, four.q);
  EXPECT_EQ(one.p, four.p);
  EXPECT_EQ(one.dark, four.dark);
}

TEST(TimeSeries, NoiseIsSeeded) {
  const auto net = build_network({}, 64);
  const Grid grid{128, 8.0};
  const auto a = run_timeseries(net, grid, 64, {1e-6, 7});
  const auto b = run_timeseries(net, grid, 64, {1e-6, 7});
  const auto c = run_timeseries(net, grid, 64, {1e-6, 8});
  EXPECT_EQ(a.q, b.q);
  EXPECT_NE(a.q, c.q);
  const auto quiet = run_timeseries(net, grid, 64);
  double max_q = 0.0;
  for (double q : quiet.q) max_q = std::max(max_q, std::abs(q));
  EXPECT_LT(max_q, 1e-15);
}
