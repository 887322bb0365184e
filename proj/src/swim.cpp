#include "pulsejet/swim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pulsejet/config.hpp"
#include "pulsejet/hydro.hpp"

namespace pulsejet::sim {

engine::Pair first_pair_for(const engine::EngineState& engine) {
  return engine.hub_position <= 0.0 ? engine::Pair::Top : engine::Pair::Bottom;
}

PairPower stroke_power(double time, const engine::EngineState& engine, const PowerProtocol& protocol,
                       const ActuatorParams& actuator, engine::Pair first_pair, int n_cycles) {
  PairPower out;
  if (time < 0.0 || first_pair == engine::Pair::None) return out;
  const auto cycle = static_cast<long long>(std::floor(time / protocol.cycle_period));
  if (n_cycles >= 0 && cycle >= n_cycles) return out;
  const double phase = time - static_cast<double>(cycle) * protocol.cycle_period;
  if (phase >= protocol.on_duration) return out;
  const auto other = first_pair == engine::Pair::Top ? engine::Pair::Bottom : engine::Pair::Top;
  const auto pair = cycle % 2 == 0 ? first_pair : other;
  if (protocol.snap_cutoff) {
    if (pair == engine::Pair::Top && engine.hub_position > 0.0) return out;
    if (pair == engine::Pair::Bottom && engine.hub_position < 0.0) return out;
  }
  const double p = sma::coil_power(actuator, protocol);
  (pair == engine::Pair::Top ? out.top : out.bottom) = p;
  return out;
}

namespace {

bool finite_state(const engine::EngineState& e, const sma::SmaState& a, const sma::SmaState& b,
                  const BodyState& body) {
  return std::isfinite(e.hub_position) && std::isfinite(e.hub_velocity) && std::isfinite(a.temperature) &&
         std::isfinite(b.temperature) && std::isfinite(body.position) && std::isfinite(body.velocity);
}

}  // namespace

Trajectory run_scenario(const ParamSet& params) {
  const double tw = params.robot.water_temperature;
  const auto eng = engine::settled_rest(params.scenario.initial_side, params.actuator, params.engine, tw);
  const auto ext = engine::coil_extensions(eng.hub_position, params.actuator, params.engine);
  return run_scenario(params, eng, sma::cold_state(tw, ext.top), sma::cold_state(tw, ext.bottom));
}

Trajectory run_scenario(const ParamSet& params, const engine::EngineState& initial_engine,
                        const sma::SmaState& initial_top, const sma::SmaState& initial_bottom) {
  if (auto violations = validate(params); !violations.empty()) throw InvariantError(std::move(violations));

  const auto& sc = params.scenario;
  const auto& robot = params.robot;
  const double dt = sc.dt;
  const auto n_steps = static_cast<long long>(std::llround(sc.duration / dt));
  const int decimation = sc.output_decimation;
  const bool free_swim = sc.kind == ScenarioKind::FreeSwim;
  const double m_eff = hydro::effective_mass(robot);
  const double supply_power = params.power.supply_voltage * params.power.supply_current;
  const auto first_pair = first_pair_for(initial_engine);

  Trajectory traj;
  traj.kind = sc.kind;
  traj.n_cycles = sc.n_cycles;
  traj.duration = static_cast<double>(n_steps) * dt;
  traj.dt = dt;
  {
    const double span = traj.duration - params.power.on_duration;
    int full = span < 0.0 ? 0 : static_cast<int>(std::floor(span / params.power.cycle_period + 1e-9)) + 1;
    if (sc.n_cycles >= 0) full = std::min(full, sc.n_cycles);
    traj.powered_cycles = full;
  }
  traj.frames.reserve(static_cast<std::size_t>(n_steps / decimation + 2));

  engine::EngineState eng = initial_engine;
  sma::SmaState top = initial_top;
  sma::SmaState bottom = initial_bottom;
  BodyState body;
  double volume = engine::bell_volume(eng.hub_position, params.engine, robot);

  SimFrame frame;
  frame.body = body;
  frame.engine = eng;
  frame.sma_top = top;
  frame.sma_bottom = bottom;
  frame.bell_volume = volume;
  traj.frames.push_back(frame);

  double thrust_acc = 0.0;
  double drag_acc = 0.0;
  int acc_count = 0;

  for (long long i = 0; i < n_steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    const auto power = stroke_power(t, eng, params.power, params.actuator, first_pair, sc.n_cycles);
    eng.active_pair = power.top > 0.0 ? engine::Pair::Top
                      : power.bottom > 0.0 ? engine::Pair::Bottom
                                           : engine::Pair::None;
    if (eng.active_pair != engine::Pair::None) traj.electrical_energy += supply_power * dt;

    top = sma::step(top, params.actuator, power.top, robot.water_temperature, dt);
    bottom = sma::step(bottom, params.actuator, power.bottom, robot.water_temperature, dt);
    eng = engine::step_hub(eng, top, bottom, params.actuator, params.engine, dt);
    const auto ext = engine::coil_extensions(eng.hub_position, params.actuator, params.engine);
    top.displacement = ext.top;
    bottom.displacement = ext.bottom;

    const double next_volume = engine::bell_volume(eng.hub_position, params.engine, robot);
    const double thrust = hydro::jet_thrust_instantaneous((next_volume - volume) / dt, robot);
    volume = next_volume;

    double drag = 0.0;
    if (free_swim) {
      drag = sc.drag_enabled ? hydro::drag_force(body.velocity, robot) : 0.0;
      body.velocity += (thrust - drag) / m_eff * dt;
      body.position += body.velocity * dt;
    }
    body.time = t + dt;

    if (!finite_state(eng, top, bottom, body)) {
      throw SimulationError("non-finite state at t = " + std::to_string(body.time) + " s",
                            traj.frames.size());
    }

    thrust_acc += thrust;
    drag_acc += drag;
    ++acc_count;
    if (acc_count == decimation || i + 1 == n_steps) {
      frame.time = body.time;
      frame.body = body;
      frame.engine = eng;
      frame.sma_top = top;
      frame.sma_bottom = bottom;
      frame.bell_volume = volume;
      frame.thrust = thrust_acc / acc_count;
      frame.drag = drag_acc / acc_count;
      traj.frames.push_back(frame);
      thrust_acc = drag_acc = 0.0;
      acc_count = 0;
    }
  }
  return traj;
}

std::vector<std::pair<double, double>> speed_profile(const std::vector<double>& time,
                                                     const std::vector<double>& position, int window) {
  const std::size_t n = time.size();
  if (n < 2 || position.size() != n) {
    throw std::invalid_argument("speed profile needs at least two frames");
  }
  if (window < 1) throw std::invalid_argument("smoothing window must be >= 1");
  std::vector<double> raw(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == n ? i : i + 1;
    raw[i] = std::abs((position[hi] - position[lo]) / (time[hi] - time[lo]));
  }
  const auto before = static_cast<std::size_t>((window - 1) / 2);
  const auto after = static_cast<std::size_t>(window / 2);
  std::vector<std::pair<double, double>> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= before ? i - before : 0;
    const std::size_t hi = std::min(n - 1, i + after);
    double sum = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) sum += raw[k];
    out[i] = {time[i], sum / static_cast<double>(hi - lo + 1)};
  }
  return out;
}

std::vector<std::pair<double, double>> speed_profile(const Trajectory& trajectory, int window) {
  std::vector<double> t, x;
  t.reserve(trajectory.frames.size());
  x.reserve(trajectory.frames.size());
  for (const auto& f : trajectory.frames) {
    t.push_back(f.time);
    x.push_back(f.body.position);
  }
  return speed_profile(t, x, window);
}

TrajectoryMetrics summarize(const Trajectory& trajectory) {
  TrajectoryMetrics m;
  const auto& fr = trajectory.frames;
  if (fr.empty()) return m;
  double active_sum = 0.0;
  int active_n = 0;
  for (std::size_t i = 0; i < fr.size(); ++i) {
    m.peak_thrust = std::max(m.peak_thrust, fr[i].thrust);
    m.peak_speed = std::max(m.peak_speed, std::abs(fr[i].body.velocity));
    if (fr[i].thrust > 0.0) {
      active_sum += fr[i].thrust;
      ++active_n;
    }
    if (i > 0) m.net_impulse += 0.5 * (fr[i].thrust + fr[i - 1].thrust) * (fr[i].time - fr[i - 1].time);
  }
  m.mean_active_thrust = active_n > 0 ? active_sum / active_n : 0.0;
  m.snap_count = fr.back().engine.snap_count;
  m.net_impulse_per_stroke = m.net_impulse / static_cast<double>(std::max<std::int64_t>(m.snap_count, 1));
  m.net_displacement = fr.back().body.position - fr.front().body.position;
  m.avg_speed = trajectory.duration > 0.0 ? m.net_displacement / trajectory.duration : 0.0;
  m.electrical_energy = trajectory.electrical_energy;
  m.feasible = m.snap_count >= std::max(trajectory.powered_cycles, 1);
  return m;
}

}  // namespace pulsejet::sim
