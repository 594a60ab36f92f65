#include "speclat/oracle.hpp"

#include <cmath>
#include <cstdlib>
#include <deque>
#include <random>
#include <set>

#include "speclat/error.hpp"

namespace speclat::oracle {

namespace {

// Direct AST interpretation with name lookup on every comparison.
bool holds(const StateFormula& f, const VariableSchema& schema, const std::vector<int>& val) {
  using K = StateFormula::Kind;
  switch (f.kind()) {
    case K::True: return true;
    case K::False: return false;
    case K::Not: return !holds(f.child(0), schema, val);
    case K::And: return holds(f.child(0), schema, val) && holds(f.child(1), schema, val);
    case K::Or: return holds(f.child(0), schema, val) || holds(f.child(1), schema, val);
    case K::Compare: {
      auto read = [&](const Operand& o) {
        if (!o.is_variable()) return o.literal_value();
        auto i = schema.index_of(o.name());
        if (!i) throw Error(ErrorCode::Formula, "unknown variable '" + o.name() + "'");
        return val[*i];
      };
      const int l = read(f.lhs());
      const int r = read(f.rhs());
      switch (f.op()) {
        case CompareOp::Eq: return l == r;
        case CompareOp::Ne: return l != r;
        case CompareOp::Lt: return l < r;
        case CompareOp::Le: return l <= r;
        case CompareOp::Gt: return l > r;
        case CompareOp::Ge: return l >= r;
      }
    }
  }
  return false;
}

struct Expander {
  const Mdp& mdp;
  const BoundedUntilQuery& q;
  std::size_t limit;
  std::size_t nodes = 0;

  double value(StateId s, int steps_left) {
    if (++nodes > limit) {
      throw Error(ErrorCode::OracleGuard,
                  "brute-force recursion exceeded " + std::to_string(limit) + " nodes");
    }
    const auto val = mdp.valuation(s);
    if (holds(q.psi, mdp.schema(), val)) return 1.0;
    if (!holds(q.phi, mdp.schema(), val)) return 0.0;
    if (steps_left == 0) return 0.0;
    double best = 0.0;
    for (std::size_t a = 0; a < mdp.num_actions(s); ++a) {
      double sum = 0.0;
      for (const auto& t : mdp.transitions(mdp.first_action(s) + a)) {
        sum += t.prob * value(t.target, steps_left - 1);
      }
      best = std::max(best, sum);
    }
    return best;
  }
};

}  // namespace

double brute_force_pmax(const Mdp& mdp, const BoundedUntilQuery& q, StateId s, std::size_t node_limit) {
  if (q.horizon < 0 || q.horizon > kMaxBruteForceHorizon) {
    throw Error(ErrorCode::OracleGuard, "brute force supports horizons 0.." +
                                            std::to_string(kMaxBruteForceHorizon) + ", got " +
                                            std::to_string(q.horizon));
  }
  if (s >= mdp.num_states()) throw Error(ErrorCode::InvalidArgument, "state index out of range");
  Expander e{mdp, q, node_limit};
  return e.value(s, q.horizon);
}

SimulationReport simulate_policy(const Mdp& mdp, const PolicyTable& policy, const BoundedUntilQuery& q,
                                 StateId start, std::uint64_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "simulation needs at least one sample");
  if (policy.num_states() != mdp.num_states() && q.horizon > 0) {
    throw Error(ErrorCode::InvalidArgument, "policy does not match the model");
  }
  if (policy.horizon() < q.horizon) {
    throw Error(ErrorCode::InvalidArgument, "missing policy entries: policy covers " +
                                                std::to_string(policy.horizon()) + " steps, query needs " +
                                                std::to_string(q.horizon));
  }
  // Labels are computed once; rollouts only look them up.
  std::vector<char> phi(mdp.num_states()), psi(mdp.num_states());
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    const auto val = mdp.valuation(s);
    psi[s] = holds(q.psi, mdp.schema(), val);
    phi[s] = holds(q.phi, mdp.schema(), val);
  }

  std::mt19937_64 rng(seed);
  // 53-bit uniform in [0,1), independent of the standard library's
  // distribution implementation.
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  std::uint64_t successes = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    StateId s = start;
    for (int step = 0;; ++step) {
      if (psi[s]) {
        ++successes;
        break;
      }
      if (!phi[s] || step == q.horizon) break;
      const std::size_t a = mdp.first_action(s) + policy.action(step, s);
      const auto dist = mdp.transitions(a);
      double u = uniform();
      StateId next = dist.back().target;
      for (const auto& t : dist) {
        if (u < t.prob) {
          next = t.target;
          break;
        }
        u -= t.prob;
      }
      s = next;
    }
  }
  SimulationReport r;
  r.samples = n;
  r.successes = successes;
  r.estimate = static_cast<double>(successes) / static_cast<double>(n);
  r.std_error = std::sqrt(r.estimate * (1.0 - r.estimate) / static_cast<double>(n));
  r.seed = seed;
  r.generator = kGeneratorId;
  return r;
}

// ---------------------------------------------------------------------------
// Case-study rules, restated.
//
// Valuation layout: robotX robotY humanX humanY energy serviceHuman
// serviceTimer tick [velocity].

std::map<std::string, std::map<std::vector<int>, double>> gridworld_successors(
    const grid::GridConfig& cfg, const grid::SpecParams& spec, const std::vector<int>& v) {
  const int rx = v[0], ry = v[1], hx = v[2], hy = v[3], energy = v[4];
  const bool pending = v[5] != 0;
  const int timer = v[6], tick = v[7];
  std::map<std::string, std::map<std::vector<int>, double>> result;

  auto in_grid = [&](int x, int y) { return x >= 0 && y >= 0 && x < cfg.width && y < cfg.height; };
  auto dist = [](int ax, int ay, int bx, int by) { return std::abs(ax - bx) + std::abs(ay - by); };

  if (cfg.absorb_resolved) {
    if (pending && timer > spec.tmax) {
      result["overdue"][v] = 1.0;
      return result;
    }
    if (!pending && cfg.arrival_prob == 0.0) {
      result["done"][v] = 1.0;
      return result;
    }
  }

  struct Choice { std::string label; int x, y, speed; };
  std::vector<Choice> choices;
  const bool at_station = rx == cfg.station.x && ry == cfg.station.y;
  const bool low = energy <= cfg.min_energy && !at_station;
  const int home = dist(rx, ry, cfg.station.x, cfg.station.y);
  const char names[4] = {'N', 'E', 'S', 'W'};
  const int dxs[4] = {0, 1, 0, -1};
  const int dys[4] = {-1, 0, 1, 0};

  bool one_step_home = false;
  if (energy > 0) {
    for (int d = 0; d < 4; ++d) {
      for (int k = 1; k <= spec.vmax; ++k) {
        int x = rx + k * dxs[d], y = ry + k * dys[d];
        if (!in_grid(x, y) || (x == hx && y == hy)) continue;
        if (low && dist(x, y, cfg.station.x, cfg.station.y) >= home) continue;
        if (low && k == 1) one_step_home = true;
        choices.push_back({std::string(1, names[d]) + std::to_string(k), x, y, k});
      }
    }
  }
  if (!low || !one_step_home) choices.push_back({"stay", rx, ry, 0});

  for (const auto& c : choices) {
    int e2 = (c.x == cfg.station.x && c.y == cfg.station.y) ? cfg.capacity
             : c.speed > 0                                   ? energy - 1
                                                             : energy;
    std::vector<std::pair<int, int>> spots{{hx, hy}};
    for (int d = 0; d < 4; ++d) {
      int x = hx + dxs[d], y = hy + dys[d];
      if (in_grid(x, y) && !(x == c.x && y == c.y)) spots.push_back({x, y});
    }
    std::vector<double> w(spots.size());
    const double m = static_cast<double>(spots.size() - 1);
    for (std::size_t i = 0; i < spots.size(); ++i) {
      if (!cfg.human_stay_prob || spots.size() == 1) w[i] = 1.0 / static_cast<double>(spots.size());
      else w[i] = i == 0 ? *cfg.human_stay_prob : (1.0 - *cfg.human_stay_prob) / m;
    }
    auto& out = result[c.label];
    for (std::size_t i = 0; i < spots.size(); ++i) {
      auto [nx, ny] = spots[i];
      std::vector<int> base{c.x, c.y, nx, ny, e2, 0, 0, std::min(tick + 1, cfg.horizon)};
      if (cfg.track_velocity) base.push_back(c.speed);
      if (pending) {
        if (dist(c.x, c.y, nx, ny) == 1) {
          base[5] = 0;
          base[6] = 0;
        } else {
          base[5] = 1;
          base[6] = std::min(timer + 1, spec.tmax + 1);
        }
        if (w[i] > 0) out[base] += w[i];
      } else {
        if (w[i] * (1.0 - cfg.arrival_prob) > 0) out[base] += w[i] * (1.0 - cfg.arrival_prob);
        base[5] = 1;
        if (w[i] * cfg.arrival_prob > 0) out[base] += w[i] * cfg.arrival_prob;
      }
    }
  }
  return result;
}

std::size_t gridworld_reachable_count(const grid::GridConfig& cfg, const grid::SpecParams& spec) {
  std::set<std::vector<int>> seen;
  std::deque<std::vector<int>> queue;
  auto visit = [&](std::vector<int> v) {
    if (seen.insert(v).second) queue.push_back(std::move(v));
  };
  for (int rx = 0; rx < cfg.width; ++rx)
    for (int ry = 0; ry < cfg.height; ++ry)
      for (int hx = 0; hx < cfg.width; ++hx)
        for (int hy = 0; hy < cfg.height; ++hy) {
          if (rx == hx && ry == hy) continue;
          const bool nominal = rx == cfg.robot0.x && ry == cfg.robot0.y && hx == cfg.human0.x &&
                               hy == cfg.human0.y;
          if (!cfg.start_anywhere && !nominal) continue;
          for (int pending = 0; pending <= 1; ++pending) {
            std::vector<int> v{rx, ry, hx, hy, cfg.capacity, pending, 0, 0};
            if (cfg.track_velocity) v.push_back(0);
            visit(std::move(v));
          }
        }
  while (!queue.empty()) {
    std::vector<int> v = std::move(queue.front());
    queue.pop_front();
    for (auto& [label, succ] : gridworld_successors(cfg, spec, v)) {
      for (auto& [next, p] : succ) visit(next);
    }
  }
  return seen.size();
}

}  // namespace speclat::oracle
