#include "doctest.h"

#include <cmath>
#include <random>

#include "pulsejet/hydro.hpp"

using namespace pulsejet;
using namespace pulsejet::hydro;

namespace {

RobotParams unit_robot() {
  RobotParams r;
  r.water_density = 1000.0;
  r.jet_orifice_area = 1e-3;
  return r;
}

}  // namespace

TEST_SUITE("hydrodynamics") {
  TEST_CASE("instantaneous jet thrust") {
    auto r = unit_robot();
    CHECK(jet_thrust_instantaneous(0.0, r) == 0.0);
    const double q = 7.143e-4;
    CHECK(jet_thrust_instantaneous(-q, r) == doctest::Approx(1e6 * q * q).epsilon(1e-14));
    CHECK(jet_thrust_instantaneous(-q, r) == doctest::Approx(0.510).epsilon(1e-3));
    r.intake_thrust_factor = 0.1;
    CHECK(jet_thrust_instantaneous(q, r) == doctest::Approx(-0.1 * 1e6 * q * q).epsilon(1e-14));
    r.intake_thrust_factor = 0.0;
    CHECK(jet_thrust_instantaneous(q, r) == 0.0);
  }

  TEST_CASE("stroke mean thrust and scaling") {
    const auto r = unit_robot();
    StrokeProfile s;
    s.delta_volume = 1e-4;
    s.contraction_duration = 0.14;
    const double t = stroke_mean_thrust(s, r);
    CHECK(t == doctest::Approx(0.510).epsilon(1e-3));
    auto s2 = s;
    s2.delta_volume *= 2.0;
    CHECK(stroke_mean_thrust(s2, r) == doctest::Approx(4.0 * t).epsilon(1e-14));
    s2 = s;
    s2.contraction_duration *= 2.0;
    CHECK(stroke_mean_thrust(s2, r) == doctest::Approx(0.25 * t).epsilon(1e-14));
    s2 = s;
    s2.contraction_duration *= 0.5;
    CHECK(stroke_mean_thrust(s2, r) == doctest::Approx(4.0 * t).epsilon(1e-14));
  }

  TEST_CASE("constant-rate chain identity") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
      RobotParams r;
      r.jet_orifice_area = 1e-4 + 1e-2 * u(rng);
      StrokeProfile s;
      s.delta_volume = 1e-6 + 1e-3 * u(rng);
      s.contraction_duration = 0.01 + u(rng);
      CHECK(jet_thrust_instantaneous(-s.delta_volume / s.contraction_duration, r) == stroke_mean_thrust(s, r));
    }
  }

  TEST_CASE("thrust sign by flow direction") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
      RobotParams r;
      r.jet_orifice_area = 1e-4 + 1e-2 * u(rng);
      r.intake_thrust_factor = u(rng);
      const double q = 1e-3 * u(rng);
      CHECK(jet_thrust_instantaneous(-q, r) >= 0.0);
      CHECK(jet_thrust_instantaneous(q, r) <= 0.0);
    }
  }

  TEST_CASE("drag") {
    RobotParams r;
    r.drag_coefficient = 1.0;
    r.frontal_area = 9.5e-3;
    CHECK(drag_force(0.0, r) == 0.0);
    CHECK(drag_force(0.158, r) == doctest::Approx(0.5 * 1000 * 9.5e-3 * 0.158 * 0.158).epsilon(1e-14));
    CHECK(drag_force(0.158, r) == doctest::Approx(0.119).epsilon(2e-3));
    for (double v : {1e-6, 0.01, 0.3, 2.0}) {
      CHECK(drag_force(-v, r) == -drag_force(v, r));
      CHECK(drag_force(v, r) > 0.0);
    }
    CHECK(RobotParams{}.frontal_area == doctest::Approx(M_PI / 4 * 0.11 * 0.11).epsilon(1e-15));
  }

  TEST_CASE("forces combine thrust and drag") {
    RobotParams r;
    const auto f = forces(-2e-3, 0.1, r);
    CHECK(f.thrust == jet_thrust_instantaneous(-2e-3, r));
    CHECK(f.drag == drag_force(0.1, r));
    CHECK(f.net == f.thrust - f.drag);
    CHECK(effective_mass(r) == doctest::Approx((1.0 + r.added_mass_coefficient) * r.total_mass));
  }

  TEST_CASE("net stroke impulse is positive exactly when beta tau_con < tau_exp") {
    const auto r = unit_robot();
    int checked = 0;
    for (double beta = 0.0; beta <= 1.0; beta += 0.05) {
      for (double tc = 0.02; tc <= 2.0; tc *= 1.3) {
        for (double te = 0.02; te <= 5.0; te *= 1.3) {
          StrokeProfile s;
          s.delta_volume = 1e-4;
          s.contraction_duration = tc;
          s.expansion_duration = te;
          RobotParams rb = r;
          rb.intake_thrust_factor = beta;
          const double j = stroke_net_impulse(s, rb);
          const double closed = 1e3 / 1e-3 * 1e-8 * (1.0 / tc - beta / te);
          CHECK(j == doctest::Approx(closed).epsilon(1e-12));
          if (std::abs(beta * tc - te) > 1e-12) CHECK((j > 0.0) == (beta * tc < te));
          ++checked;
        }
      }
    }
    CHECK(checked > 1000);
  }
}
