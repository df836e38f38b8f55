#include <cmath>
#include <random>

#include "doctest.h"
#include "rovlock/control/locking.hpp"

using namespace rovlock;
using namespace rovlock::control;

TEST_CASE("deviation") {
  const BBox user{100, 100, 50, 40};
  const Deviation zero = compute_deviation(user, user, 0.4, 0.4);
  CHECK(zero.dx == 0.0);
  CHECK(zero.dy == 0.0);
  CHECK(zero.ds == 0.0);
  CHECK(zero.dpsi == 0.0);

  // (100+50)/2 - (110+40)/2, (100+40)/2 - (95+44)/2, 10/2 + (-4)/2, 0.3 - 0.1
  const Deviation d = compute_deviation(user, {110, 95, 40, 44}, 0.1, 0.3);
  CHECK(d.dx == doctest::Approx(0.0));
  CHECK(d.dy == doctest::Approx(0.5));
  CHECK(d.ds == doctest::Approx(3.0));
  CHECK(d.dpsi == doctest::Approx(0.2));

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> pos(0.0, 300.0), size(5.0, 100.0), ang(-10.0, 10.0);
  for (int i = 0; i < 100; ++i) {
    const BBox a{pos(rng), pos(rng), size(rng), size(rng)};
    const BBox b{pos(rng), pos(rng), size(rng), size(rng)};
    const double pa = ang(rng), pb = ang(rng);
    const Deviation ab = compute_deviation(a, b, pa, pb);
    const Deviation ba = compute_deviation(b, a, pb, pa);
    CHECK(ab.dx == doctest::Approx(-ba.dx));
    CHECK(ab.dy == doctest::Approx(-ba.dy));
    CHECK(ab.ds == doctest::Approx(-ba.ds));
    CHECK(ab.dpsi > -M_PI);
    CHECK(ab.dpsi <= M_PI);
    // Same angle modulo 2 pi.
    CHECK(std::abs(std::sin(ab.dpsi) - std::sin(pb - pa)) < 1e-9);
    CHECK(std::abs(std::cos(ab.dpsi) - std::cos(pb - pa)) < 1e-9);
  }
}

TEST_CASE("yaw wrapping") {
  CHECK(std::abs(compute_deviation({0, 0, 1, 1}, {0, 0, 1, 1}, 0.7, 0.7 + 2 * M_PI).dpsi) < 1e-12);
  CHECK(wrap_angle(M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(-M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(3 * M_PI / 2) == doctest::Approx(-M_PI / 2));
  CHECK(wrap_angle(-0.25) == doctest::Approx(-0.25));
}

TEST_CASE("pi step") {
  SUBCASE("pure proportional") {
    PiGains g;
    g.kp = {1, 1, 1, 1};
    g.ki = {0, 0, 0, 0};
    PiState s;
    const ControlCommand u = pi_step(s, {0.5, 0, 0, 0}, g);
    CHECK(u.u_x == doctest::Approx(0.5));
    CHECK(u.u_y == 0.0);
    CHECK(u.u_z == 0.0);
    CHECK(u.u_psi == 0.0);
  }
  SUBCASE("running sum") {
    PiGains g;
    g.kp = {0, 0, 0, 0};
    g.ki = {0.1, 0.1, 0.1, 0.1};
    PiState s;
    CHECK(pi_step(s, {2, 0, 0, 0}, g).u_x == doctest::Approx(0.2));
    CHECK(pi_step(s, {2, 0, 0, 0}, g).u_x == doctest::Approx(0.4));
    CHECK(pi_step(s, {2, 0, 0, 0}, g).u_x == doctest::Approx(0.6));
  }
  SUBCASE("saturation and windup bound") {
    PiGains g;
    g.kp = {1, 1, 1, 1};
    g.ki = {0.1, 0.1, 0.1, 0.1};
    PiState s;
    for (int k = 0; k < 50; ++k) {
      const ControlCommand u = pi_step(s, {5, -5, 0, 0}, g);
      CHECK(u.u_x == 1.0);
      CHECK(u.u_y == -1.0);
      for (double v : s.integral) CHECK(std::abs(v) <= 2.0 / 0.1);
    }
  }
  SUBCASE("zero in, zero out") {
    PiState s;
    const ControlCommand u = pi_step(s, {}, PiGains{});
    CHECK(u.as_array() == AxisArray{0, 0, 0, 0});
  }
  SUBCASE("linear below saturation") {
    // Direct evaluation of u_k = kp d_k + ki sum_{j<=k} d_j for a history and
    // its scaled copy.
    const PiGains g;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> dev(-20.0, 20.0);
    std::vector<Deviation> hist;
    for (int k = 0; k < 30; ++k) hist.push_back({dev(rng), dev(rng), dev(rng), 0.02 * dev(rng)});
    PiState s1, s2;
    AxisArray sum{};
    for (const auto& d : hist) {
      const Deviation scaled{2.5 * d.dx, 2.5 * d.dy, 2.5 * d.ds, 2.5 * d.dpsi};
      const AxisArray u1 = pi_step(s1, d, g).as_array();
      const AxisArray u2 = pi_step(s2, scaled, g).as_array();
      const AxisArray da = d.as_array();
      for (int a = 0; a < 4; ++a) {
        sum[a] += da[a];
        CHECK(u1[a] == doctest::Approx(g.kp[a] * da[a] + g.ki[a] * sum[a]));
        CHECK(u2[a] == doctest::Approx(2.5 * u1[a]));
      }
    }
  }
  SUBCASE("invalid gains") {
    PiGains g;
    g.kp[2] = -1.0;
    PiState s;
    CHECK_THROWS_AS(pi_step(s, {}, g), Error);
    CHECK_THROWS_AS(LockingController({0, 0, 10, 10}, 0.0, g), Error);
  }
}

TEST_CASE("controller drops to zero on loss") {
  LockingController c({100, 100, 40, 40}, 0.0);
  tracking::TrackResult r{{110, 100, 40, 40}, 1.0, tracking::TrackStatus::Tracking};
  for (int k = 0; k < 5; ++k) c.step(r, 0.0);
  CHECK(c.state().integral[0] != 0.0);
  r.status = tracking::TrackStatus::Lost;
  const ControlCommand u = c.step(r, 0.3);
  CHECK(u.as_array() == AxisArray{0, 0, 0, 0});
  CHECK(c.state().integral == AxisArray{0, 0, 0, 0});
}
