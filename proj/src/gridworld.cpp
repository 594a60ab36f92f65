#include "speclat/gridworld.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <deque>

#include "speclat/error.hpp"

namespace speclat::grid {

namespace {

[[noreturn]] void bad_config(const std::string& what) {
  throw Error(ErrorCode::InvalidArgument, "invalid grid configuration: " + what);
}

bool inside(const GridConfig& cfg, Cell c) {
  return c.x >= 0 && c.y >= 0 && c.x < cfg.width && c.y < cfg.height;
}

std::string cell_text(Cell c) { return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")"; }

struct Direction {
  char name;
  int dx;
  int dy;
};
constexpr std::array<Direction, 4> kDirections{{{'N', 0, -1}, {'E', 1, 0}, {'S', 0, 1}, {'W', -1, 0}}};

// Variable positions in the schema.
enum Var : std::size_t { RX, RY, HX, HY, EN, SV, TM, TK, VEL };

}  // namespace

void GridConfig::validate() const {
  if (width < 1 || height < 1) bad_config("grid must be at least 1x1");
  if (!inside(*this, robot0)) bad_config("robot start " + cell_text(robot0) + " outside the grid");
  if (!inside(*this, human0)) bad_config("human start " + cell_text(human0) + " outside the grid");
  if (!inside(*this, station)) bad_config("station " + cell_text(station) + " outside the grid");
  if (robot0 == human0) bad_config("robot and human must start on distinct cells");
  if (start_anywhere && width * height < 2) bad_config("need two cells to place robot and human");
  if (capacity < 1) bad_config("capacity must be at least 1");
  if (min_energy < 0) bad_config("min_energy must be non-negative");
  if (horizon < 1) bad_config("horizon must be at least 1");
  if (!(arrival_prob >= 0.0 && arrival_prob <= 1.0)) bad_config("arrival_prob must lie in [0,1]");
  if (human_stay_prob && !(*human_stay_prob >= 0.0 && *human_stay_prob <= 1.0)) {
    bad_config("human_stay_prob must lie in [0,1]");
  }
}

void SpecParams::validate() const {
  if (vmax < 1 || vmax > kMaxSpeed) {
    throw Error(ErrorCode::InvalidArgument, "vmax must lie in [1," + std::to_string(kMaxSpeed) + "]");
  }
  if (tmax < 1 || tmax > kMaxServiceTime) {
    throw Error(ErrorCode::InvalidArgument, "tmax must lie in [1," + std::to_string(kMaxServiceTime) + "]");
  }
}

VariableSchema make_schema(const GridConfig& cfg, const SpecParams& spec) {
  // serviceTimer saturates at tmax + 1, the first value violating the bound.
  std::vector<VariableDomain> vars{
      {kRobotX, 0, cfg.width - 1}, {kRobotY, 0, cfg.height - 1},
      {kHumanX, 0, cfg.width - 1}, {kHumanY, 0, cfg.height - 1},
      {kEnergy, 0, cfg.capacity},  {kService, 0, 1},
      {kTimer, 0, spec.tmax + 1},  {kTick, 0, cfg.horizon},
  };
  if (cfg.track_velocity) vars.push_back({kVelocity, 0, spec.vmax});
  return VariableSchema(std::move(vars));
}

std::vector<int> encode_state(const GridConfig& cfg, const RobotState& s) {
  std::vector<int> v{s.robot.x, s.robot.y, s.human.x, s.human.y, s.energy,
                     s.service ? 1 : 0, s.timer, s.tick};
  if (cfg.track_velocity) v.push_back(s.velocity);
  return v;
}

RobotState decode_state(const GridConfig& cfg, std::span<const int> v) {
  RobotState s;
  s.robot = {v[RX], v[RY]};
  s.human = {v[HX], v[HY]};
  s.energy = v[EN];
  s.service = v[SV] != 0;
  s.timer = v[TM];
  s.tick = v[TK];
  s.velocity = cfg.track_velocity ? v[VEL] : 0;
  return s;
}

RobotState decode_state(const Mdp& mdp, const GridConfig& cfg, StateId id) {
  return decode_state(cfg, mdp.valuation(id));
}

std::optional<StateId> find_state(const Mdp& mdp, const GridConfig& cfg, const RobotState& s) {
  return mdp.find(encode_state(cfg, s));
}

namespace {

struct RobotMove {
  char dir;    // 0 for stay
  int speed;   // 0 for stay
  Cell dest;
};

std::string move_label(const RobotMove& m) {
  if (m.speed == 0) return "stay";
  return std::string(1, m.dir) + std::to_string(m.speed);
}

// Enabled robot moves, "stay" first, then N, E, S, W by increasing speed.
void robot_moves(const GridConfig& cfg, const SpecParams& spec, const RobotState& s,
                 std::vector<RobotMove>& out) {
  out.clear();
  const bool can_move = s.energy > 0;
  const bool seeking = s.energy <= cfg.min_energy && !(s.robot == cfg.station);
  const int here = manhattan(s.robot, cfg.station);

  bool free_step_home = false;  // a one-cell move that gets closer is available
  std::vector<RobotMove> moves;
  if (can_move) {
    for (const auto& d : kDirections) {
      for (int k = 1; k <= spec.vmax; ++k) {
        Cell dest{s.robot.x + k * d.dx, s.robot.y + k * d.dy};
        if (!inside(cfg, dest)) break;
        if (dest == s.human) continue;
        if (seeking) {
          if (manhattan(dest, cfg.station) >= here) continue;
          if (k == 1) free_step_home = true;
        }
        moves.push_back({d.name, k, dest});
      }
    }
  }
  if (!seeking || !free_step_home) out.push_back({0, 0, s.robot});
  out.insert(out.end(), moves.begin(), moves.end());
}

struct Outcome {
  RobotState next;
  double prob;
};

// Human motion, service bookkeeping and tick for one robot move.
void tick_outcomes(const GridConfig& cfg, const SpecParams& spec, const RobotState& s,
                   const RobotMove& move, std::vector<Outcome>& out) {
  out.clear();
  RobotState base = s;
  base.robot = move.dest;
  if (move.dest == cfg.station) base.energy = cfg.capacity;
  else if (move.speed > 0) base.energy = s.energy - 1;
  base.velocity = move.speed;
  base.tick = std::min(s.tick + 1, cfg.horizon);

  std::array<Cell, 5> human_next{};
  std::array<double, 5> human_prob{};
  std::size_t options = 0;
  human_next[options++] = s.human;
  for (const auto& d : kDirections) {
    Cell c{s.human.x + d.dx, s.human.y + d.dy};
    if (inside(cfg, c) && !(c == move.dest)) human_next[options++] = c;
  }
  const std::size_t moves = options - 1;
  if (!cfg.human_stay_prob || moves == 0) {
    for (std::size_t i = 0; i < options; ++i) human_prob[i] = 1.0 / static_cast<double>(options);
  } else {
    human_prob[0] = *cfg.human_stay_prob;
    for (std::size_t i = 1; i < options; ++i) {
      human_prob[i] = (1.0 - *cfg.human_stay_prob) / static_cast<double>(moves);
    }
  }

  for (std::size_t i = 0; i < options; ++i) {
    if (human_prob[i] <= 0.0) continue;
    RobotState n = base;
    n.human = human_next[i];
    if (s.service) {
      if (manhattan(n.robot, n.human) == 1) {
        n.service = false;
        n.timer = 0;
      } else {
        n.timer = std::min(s.timer + 1, spec.tmax + 1);
      }
      out.push_back({n, human_prob[i]});
    } else if (cfg.arrival_prob > 0.0) {
      n.timer = 0;
      if (cfg.arrival_prob < 1.0) out.push_back({n, human_prob[i] * (1.0 - cfg.arrival_prob)});
      n.service = true;
      out.push_back({n, human_prob[i] * cfg.arrival_prob});
    } else {
      out.push_back({n, human_prob[i]});
    }
  }
}

bool absorbing(const GridConfig& cfg, const SpecParams& spec, const RobotState& s, const char*& label) {
  if (!cfg.absorb_resolved) return false;
  if (s.service && s.timer > spec.tmax) {
    label = "overdue";
    return true;
  }
  if (!s.service && cfg.arrival_prob == 0.0) {
    label = "done";
    return true;
  }
  return false;
}

std::vector<RobotState> start_states(const GridConfig& cfg) {
  std::vector<std::pair<Cell, Cell>> placements;
  if (cfg.start_anywhere) {
    for (int ry = 0; ry < cfg.height; ++ry)
      for (int rx = 0; rx < cfg.width; ++rx)
        for (int hy = 0; hy < cfg.height; ++hy)
          for (int hx = 0; hx < cfg.width; ++hx)
            if (rx != hx || ry != hy) placements.push_back({{rx, ry}, {hx, hy}});
  } else {
    placements.push_back({cfg.robot0, cfg.human0});
  }
  std::vector<RobotState> out;
  for (const auto& [r, h] : placements) {
    for (bool pending : {true, false}) {
      RobotState s;
      s.robot = r;
      s.human = h;
      s.energy = cfg.capacity;
      s.service = pending;
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace

Mdp build_model(const GridConfig& cfg, const SpecParams& spec) {
  cfg.validate();
  spec.validate();
  MdpBuilder builder(make_schema(cfg, spec));
  builder.set_state_limit(cfg.max_states);

  const std::size_t nvars = builder.schema().size();
  std::array<int, 9> buf{};
  auto valuation_of = [&](const RobotState& s) {
    buf = {s.robot.x, s.robot.y, s.human.x, s.human.y, s.energy, s.service ? 1 : 0, s.timer, s.tick, s.velocity};
    return std::span<const int>(buf.data(), nvars);
  };

  std::deque<std::pair<StateId, RobotState>> frontier;
  for (const auto& s : start_states(cfg)) {
    auto [id, added] = builder.intern_state(valuation_of(s));
    builder.mark_initial(id);
    if (added) frontier.emplace_back(id, s);
  }

  std::vector<RobotMove> moves;
  std::vector<Outcome> outcomes;
  std::vector<Transition> dist;
  while (!frontier.empty()) {
    auto [id, s] = frontier.front();
    frontier.pop_front();

    const char* loop_label = nullptr;
    if (absorbing(cfg, spec, s, loop_label)) {
      const Transition self{id, 1.0};
      builder.add_action(id, loop_label, std::span(&self, 1));
      continue;
    }
    robot_moves(cfg, spec, s, moves);
    for (const auto& m : moves) {
      tick_outcomes(cfg, spec, s, m, outcomes);
      dist.clear();
      for (const auto& o : outcomes) {
        auto [next, added] = builder.intern_state(valuation_of(o.next));
        if (added) frontier.emplace_back(next, o.next);
        dist.push_back({next, o.prob});
      }
      builder.add_action(id, move_label(m), dist);
    }
  }
  return std::move(builder).build();
}

StateFormula initial_states(const GridConfig& cfg) {
  auto pending_at_zero = StateFormula::flag(kService) && StateFormula::compare(kTimer, CompareOp::Eq, 0);
  auto request = pending_at_zero || !StateFormula::flag(kService);
  auto apart = StateFormula::compare(Operand::variable(kRobotX), CompareOp::Ne, Operand::variable(kHumanX)) ||
               StateFormula::compare(Operand::variable(kRobotY), CompareOp::Ne, Operand::variable(kHumanY));
  return request && StateFormula::compare(kEnergy, CompareOp::Eq, cfg.capacity) &&
         StateFormula::compare(kTick, CompareOp::Eq, 0) && apart;
}

PropertyQuery property_query(const GridConfig& cfg, const SpecParams& spec) {
  auto ok = StateFormula::compare(kTimer, CompareOp::Le, spec.tmax);
  PropertyQuery pq;
  pq.query.phi = StateFormula::flag(kService) && ok;
  pq.query.psi = !StateFormula::flag(kService) && ok;
  pq.query.horizon = cfg.horizon;
  pq.filter = FilterSpec{FilterMode::Min, initial_states(cfg)};
  return pq;
}

PropertyQuery velocity_labelled_query(const GridConfig& cfg, const SpecParams& spec) {
  auto slow = StateFormula::compare(kVelocity, CompareOp::Le, spec.vmax);
  PropertyQuery pq = property_query(cfg, spec);
  pq.query.phi = pq.query.phi && slow;
  pq.query.psi = pq.query.psi && slow;
  pq.filter.condition = pq.filter.condition && slow;
  return pq;
}

CheckOutcome check_spec(const GridConfig& cfg, const SpecParams& spec, const CheckerOptions& opts) {
  using clock = std::chrono::steady_clock;
  auto ms = [](clock::duration d) { return std::chrono::duration<double, std::milli>(d).count(); };

  CheckOutcome out;
  auto t0 = clock::now();
  Mdp mdp = build_model(cfg, spec);
  auto t1 = clock::now();
  auto pq = property_query(cfg, spec);
  auto values = pmax_bounded_until(mdp, pq.query, opts);
  out.probability = filter_apply(values, pq.filter, mdp);
  RobotState nominal;
  nominal.robot = cfg.robot0;
  nominal.human = cfg.human0;
  nominal.energy = cfg.capacity;
  nominal.service = true;
  auto id = find_state(mdp, cfg, nominal);
  out.nominal_probability = id ? values[*id] : 0.0;
  auto t2 = clock::now();
  out.states = mdp.num_states();
  out.transitions = mdp.num_transitions();
  out.build_ms = ms(t1 - t0);
  out.check_ms = ms(t2 - t1);
  return out;
}

}  // namespace speclat::grid
