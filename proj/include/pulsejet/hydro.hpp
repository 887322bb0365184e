#pragma once

#include "pulsejet/params.hpp"

namespace pulsejet::hydro {

// Sign convention: positive is forward (the direction the jet pushes the body).
struct HydroForces {
  double thrust = 0.0;
  double drag = 0.0;
  double net = 0.0;
};

// Momentum-flux thrust (rho/A) Q^2. Ejection (negative rate, bell contracting)
// pushes forward; intake is penalized by the intake thrust factor.
double jet_thrust_instantaneous(double volume_rate, const RobotParams& robot);

// Constant-efflux thrust of the contraction phase, (rho/A) (dV/tau_con)^2.
double stroke_mean_thrust(const StrokeProfile& profile, const RobotParams& robot);

// Net impulse of one constant-rate stroke, (rho/A) dV^2 (1/tau_con - beta/tau_exp).
double stroke_net_impulse(const StrokeProfile& profile, const RobotParams& robot);

// Quadratic drag, same sign as the velocity.
double drag_force(double velocity, const RobotParams& robot);

HydroForces forces(double volume_rate, double velocity, const RobotParams& robot);

// Body inertia including entrained water, (1 + C_a) M.
double effective_mass(const RobotParams& robot);

}  // namespace pulsejet::hydro
