#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "speclat/checker.hpp"
#include "speclat/mdp.hpp"

namespace speclat::grid {

struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

inline int manhattan(Cell a, Cell b) {
  return (a.x > b.x ? a.x - b.x : b.x - a.x) + (a.y > b.y ? a.y - b.y : b.y - a.y);
}

// State variable names.
inline constexpr const char* kRobotX = "robotX";
inline constexpr const char* kRobotY = "robotY";
inline constexpr const char* kHumanX = "humanX";
inline constexpr const char* kHumanY = "humanY";
inline constexpr const char* kEnergy = "energy";
inline constexpr const char* kService = "serviceHuman";
inline constexpr const char* kTimer = "serviceTimer";
inline constexpr const char* kTick = "tick";
inline constexpr const char* kVelocity = "velocity";

inline constexpr int kMaxSpeed = 6;
inline constexpr int kMaxServiceTime = 10;

/// Scenario of the domestic-robot case study. Defaults are the 7x7 setup.
struct GridConfig {
  int width = 7;
  int height = 7;
  Cell robot0{4, 4};
  Cell human0{5, 5};
  Cell station{0, 0};
  int capacity = 25;    // initial and full battery energy
  int min_energy = 2;   // at or below this, the robot heads for the station
  int horizon = 20;     // ticks; also the bound of the until query
  double arrival_prob = 0.0;
  /// Probability of the human staying put; unset = uniform over stay and
  /// every feasible one-cell move.
  std::optional<double> human_stay_prob;
  /// Start from every pair of distinct positions instead of robot0/human0.
  bool start_anywhere = false;
  /// Adds a `velocity` variable holding the speed of the last robot move.
  bool track_velocity = false;
  /// Completed (with no possible re-arrival) and overdue requests become
  /// absorbing. Query values are unchanged; the state space shrinks.
  bool absorb_resolved = true;
  std::size_t max_states = 5'000'000;

  void validate() const;  // throws Error(InvalidArgument)
};

/// One point of the velocity x service-time specification lattice.
struct SpecParams {
  int vmax = kMaxSpeed;        // cells per tick, 1..6
  int tmax = kMaxServiceTime;  // service-time bound in ticks, 1..10

  void validate() const;
};

/// Decoded state of the case-study model.
struct RobotState {
  Cell robot;
  Cell human;
  int energy = 0;
  bool service = false;
  int timer = 0;
  int tick = 0;
  int velocity = 0;  // only meaningful with track_velocity
};

VariableSchema make_schema(const GridConfig& cfg, const SpecParams& spec);
std::vector<int> encode_state(const GridConfig& cfg, const RobotState& s);
RobotState decode_state(const GridConfig& cfg, std::span<const int> valuation);
RobotState decode_state(const Mdp& mdp, const GridConfig& cfg, StateId id);
std::optional<StateId> find_state(const Mdp& mdp, const GridConfig& cfg, const RobotState& s);

/// Explores every state reachable from the initial configurations and
/// returns the case-study MDP for this specification. Velocity is enforced
/// by pruning moves faster than spec.vmax; the service-time bound is left to
/// the query.
Mdp build_model(const GridConfig& cfg, const SpecParams& spec);

/// Start-state condition: pending requests only at timer 0, full battery,
/// tick 0, distinct positions.
StateFormula initial_states(const GridConfig& cfg);

struct PropertyQuery {
  BoundedUntilQuery query;
  FilterSpec filter;
};

/// filter(min, Pmax[(serviceHuman & ok) U<=horizon (!serviceHuman & ok)], init)
/// with ok = serviceTimer <= tmax.
PropertyQuery property_query(const GridConfig& cfg, const SpecParams& spec);

/// Same query with `velocity <= vmax` conjoined into phi, psi and the filter,
/// for models built with track_velocity and a larger speed limit.
PropertyQuery velocity_labelled_query(const GridConfig& cfg, const SpecParams& spec);

/// Worst-case (filtered) probability and model size of one check.
struct CheckOutcome {
  double probability = 0.0;
  double nominal_probability = 0.0;  // pending request at robot0/human0
  std::size_t states = 0;
  std::size_t transitions = 0;
  double build_ms = 0.0;
  double check_ms = 0.0;
};

CheckOutcome check_spec(const GridConfig& cfg, const SpecParams& spec, const CheckerOptions& opts = {});

}  // namespace speclat::grid
