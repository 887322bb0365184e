#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pulsejet/engine.hpp"
#include "pulsejet/params.hpp"
#include "pulsejet/sma.hpp"

namespace pulsejet::sim {

struct BodyState {
  double position = 0.0;
  double velocity = 0.0;
  double time = 0.0;
};

// One output sample. Thrust and drag are averages over the output interval
// that ends at `time`; with decimation 1 they are the per-step values.
struct SimFrame {
  double time = 0.0;
  BodyState body;
  engine::EngineState engine;
  sma::SmaState sma_top;
  sma::SmaState sma_bottom;
  double bell_volume = 0.0;
  double thrust = 0.0;
  double drag = 0.0;
};

struct Trajectory {
  std::vector<SimFrame> frames;
  ScenarioKind kind = ScenarioKind::FreeSwim;
  int n_cycles = 0;
  int powered_cycles = 0;  // cycles whose heating window ends inside the run
  double duration = 0.0;
  double dt = 0.0;
  double electrical_energy = 0.0;  // supply V*I integrated over powered time [J]
};

class SimulationError : public std::runtime_error {
 public:
  SimulationError(const std::string& message, std::size_t frame_index)
      : std::runtime_error(message), frame_index_(frame_index) {}
  std::size_t frame_index() const { return frame_index_; }

 private:
  std::size_t frame_index_;
};

struct PairPower {
  double top = 0.0;
  double bottom = 0.0;
};

// The first stroke drives the hub away from the stop it rests against.
engine::Pair first_pair_for(const engine::EngineState& engine);

// Alternating duty-cycled heating. Cycle k powers the first pair when k is
// even and the other pair when k is odd, for on_duration of each period.
// Power stops after n_cycles cycles (n_cycles < 0 means unlimited).
PairPower stroke_power(double time, const engine::EngineState& engine, const PowerProtocol& protocol,
                       const ActuatorParams& actuator, engine::Pair first_pair, int n_cycles = -1);

// Integrates the full model for params.scenario. Throws InvariantError for
// invalid parameters and SimulationError on a non-finite state.
Trajectory run_scenario(const ParamSet& params);

// Same, starting from an explicit engine and coil state.
Trajectory run_scenario(const ParamSet& params, const engine::EngineState& initial_engine,
                        const sma::SmaState& initial_top, const sma::SmaState& initial_bottom);

// Central-difference speed magnitude with a centered moving average.
std::vector<std::pair<double, double>> speed_profile(const std::vector<double>& time,
                                                     const std::vector<double>& position, int window = 5);
std::vector<std::pair<double, double>> speed_profile(const Trajectory& trajectory, int window = 5);

struct TrajectoryMetrics {
  double peak_thrust = 0.0;
  double mean_active_thrust = 0.0;  // mean over frames with positive thrust
  double net_impulse = 0.0;         // trapezoid of thrust over the run
  double net_impulse_per_stroke = 0.0;
  double peak_speed = 0.0;
  double avg_speed = 0.0;  // net displacement / duration
  double net_displacement = 0.0;
  double electrical_energy = 0.0;
  std::int64_t snap_count = 0;
  bool feasible = false;  // every powered cycle produced a snap
};

TrajectoryMetrics summarize(const Trajectory& trajectory);

}  // namespace pulsejet::sim
