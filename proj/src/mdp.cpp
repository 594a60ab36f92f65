#include "speclat/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "speclat/error.hpp"

namespace speclat {

// ---------------------------------------------------------------------------
// VariableSchema

VariableSchema::VariableSchema(std::vector<VariableDomain> variables)
    : variables_(std::move(variables)) {
  std::set<std::string> seen;
  for (const auto& v : variables_) {
    if (v.name.empty()) throw Error(ErrorCode::Model, "variable with empty name");
    if (!seen.insert(v.name).second) {
      throw Error(ErrorCode::Model, "duplicate variable name '" + v.name + "'");
    }
    if (v.lo > v.hi) {
      throw Error(ErrorCode::Model, "empty domain for variable '" + v.name + "': [" +
                                        std::to_string(v.lo) + ", " + std::to_string(v.hi) + "]");
    }
  }
  strides_.assign(variables_.size(), 1);
  cardinality_ = 1;
  for (std::size_t i = variables_.size(); i-- > 0;) {
    strides_[i] = cardinality_;
    auto radix = static_cast<StateKey>(static_cast<std::int64_t>(variables_[i].hi) - variables_[i].lo + 1);
    if (cardinality_ > std::numeric_limits<StateKey>::max() / radix) {
      throw Error(ErrorCode::Model, "schema has more than 2^64 valuations");
    }
    cardinality_ *= radix;
  }
}

std::optional<std::size_t> VariableSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t VariableSchema::require_index(std::string_view name) const {
  if (auto i = index_of(name)) return *i;
  throw Error(ErrorCode::Formula, "unknown variable '" + std::string(name) + "'");
}

bool VariableSchema::in_range(std::span<const int> valuation) const {
  if (valuation.size() != variables_.size()) return false;
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (valuation[i] < variables_[i].lo || valuation[i] > variables_[i].hi) return false;
  }
  return true;
}

StateKey VariableSchema::encode(std::span<const int> valuation) const {
  if (valuation.size() != variables_.size()) {
    throw Error(ErrorCode::Model, "valuation has " + std::to_string(valuation.size()) +
                                      " components, schema has " + std::to_string(variables_.size()));
  }
  StateKey key = 0;
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    const auto& v = variables_[i];
    if (valuation[i] < v.lo || valuation[i] > v.hi) {
      throw Error(ErrorCode::Model, "out-of-range valuation " + describe(valuation) + ": " +
                                        v.name + " must lie in [" + std::to_string(v.lo) + ", " +
                                        std::to_string(v.hi) + "]");
    }
    key += static_cast<StateKey>(valuation[i] - v.lo) * strides_[i];
  }
  return key;
}

void VariableSchema::decode(StateKey key, std::span<int> out) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    out[i] = component(key, i);
  }
}

int VariableSchema::component(StateKey key, std::size_t var) const {
  const auto& v = variables_[var];
  auto radix = static_cast<StateKey>(v.hi - v.lo + 1);
  return static_cast<int>((key / strides_[var]) % radix) + v.lo;
}

std::string VariableSchema::describe(std::span<const int> valuation) const {
  std::string out = "(";
  for (std::size_t i = 0; i < valuation.size(); ++i) {
    if (i) out += ", ";
    out += i < variables_.size() ? variables_[i].name : "?";
    out += "=" + std::to_string(valuation[i]);
  }
  return out + ")";
}

// ---------------------------------------------------------------------------
// Mdp

std::vector<int> Mdp::valuation(StateId s) const {
  std::vector<int> v(schema_.size());
  schema_.decode(keys_[s], v);
  return v;
}

void Mdp::valuation(StateId s, std::span<int> out) const { schema_.decode(keys_[s], out); }

std::optional<StateId> Mdp::find(std::span<const int> valuation) const {
  if (!schema_.in_range(valuation)) return std::nullopt;
  StateKey k = schema_.encode(valuation);
  auto it = std::lower_bound(keys_.begin(), keys_.end(), k);
  if (it == keys_.end() || *it != k) return std::nullopt;
  return static_cast<StateId>(it - keys_.begin());
}

std::string Mdp::describe(StateId s) const { return schema_.describe(valuation(s)); }

namespace {

// `describe_source` is only called on failure.
template <class Describe>
void check_distribution(Describe&& describe_source, std::string_view label,
                        std::span<const Transition> dist, std::size_t num_states) {
  auto where = [&] { return "action '" + std::string(label) + "' of state " + describe_source(); };
  if (dist.empty()) throw Error(ErrorCode::Model, where() + " has an empty distribution");
  double sum = 0.0;
  for (const auto& t : dist) {
    if (t.target >= num_states) {
      throw Error(ErrorCode::Model, where() + " targets unknown state " + std::to_string(t.target));
    }
    if (!(t.prob > 0.0) || !std::isfinite(t.prob)) {
      throw Error(ErrorCode::Model, where() + " has non-positive probability " + std::to_string(t.prob));
    }
    sum += t.prob;
  }
  if (std::abs(sum - 1.0) > kProbabilityTolerance) {
    std::ostringstream os;
    os << where() << ": probabilities sum to " << sum;
    throw Error(ErrorCode::Model, os.str());
  }
  bool repeated = false;
  if (dist.size() <= 16) {
    for (std::size_t i = 1; i < dist.size() && !repeated; ++i) {
      for (std::size_t j = 0; j < i; ++j) repeated |= dist[i].target == dist[j].target;
    }
  } else {
    std::vector<StateId> targets;
    targets.reserve(dist.size());
    for (const auto& t : dist) targets.push_back(t.target);
    std::sort(targets.begin(), targets.end());
    repeated = std::adjacent_find(targets.begin(), targets.end()) != targets.end();
  }
  if (repeated) throw Error(ErrorCode::Model, where() + " lists a target more than once");
}

}  // namespace

void Mdp::validate() const {
  const std::size_t n = keys_.size();
  if (n == 0) throw Error(ErrorCode::Model, "model has no states");
  if (initial_.empty()) throw Error(ErrorCode::Model, "model has no initial state");
  if (!std::is_sorted(keys_.begin(), keys_.end()) ||
      std::adjacent_find(keys_.begin(), keys_.end()) != keys_.end()) {
    throw Error(ErrorCode::Model, "state table is not strictly ordered");
  }
  std::vector<int> buf(schema_.size());
  for (StateId s = 0; s < n; ++s) {
    valuation(s, buf);
    if (num_actions(s) == 0) {
      throw Error(ErrorCode::Model, "state " + schema_.describe(buf) + " has no enabled action");
    }
    for (std::size_t a = first_action(s); a < first_action(s + 1); ++a) {
      check_distribution([&] { return schema_.describe(buf); }, action_label(a), transitions(a), n);
    }
  }
  for (StateId s : initial_) {
    if (s >= n) throw Error(ErrorCode::Model, "initial state index out of range");
  }
}

void Mdp::write_dump(std::ostream& out) const {
  for (StateId s = 0; s < num_states(); ++s) {
    const std::string src = describe(s);
    for (std::size_t a = first_action(s); a < first_action(s + 1); ++a) {
      for (const auto& t : transitions(a)) {
        out << src << '\t' << action_label(a) << '\t' << describe(t.target) << '\t' << t.prob << '\n';
      }
    }
  }
}

// ---------------------------------------------------------------------------
// MdpBuilder

MdpBuilder::MdpBuilder(VariableSchema schema) : schema_(std::move(schema)) {}

void MdpBuilder::check_limit() const {
  if (state_limit_ != 0 && keys_.size() > state_limit_) {
    throw Error(ErrorCode::StateLimit,
                "state space exceeds " + std::to_string(state_limit_) +
                    " states; reduce the grid, capacity, horizon or specification bounds");
  }
}

StateId MdpBuilder::add_state(std::span<const int> valuation) {
  auto [id, added] = intern_state(valuation);
  if (!added) {
    throw Error(ErrorCode::Model, "duplicate state valuation " + schema_.describe(valuation));
  }
  return id;
}

std::optional<StateId> MdpBuilder::find_state(std::span<const int> valuation) const {
  if (!schema_.in_range(valuation)) return std::nullopt;
  auto it = index_.find(schema_.encode(valuation));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::pair<StateId, bool> MdpBuilder::intern_state(std::span<const int> valuation) {
  StateKey k = schema_.encode(valuation);
  auto [it, added] = index_.try_emplace(k, static_cast<StateId>(keys_.size()));
  if (added) {
    if (keys_.size() >= std::numeric_limits<StateId>::max()) {
      throw Error(ErrorCode::StateLimit, "more than 2^32-1 states");
    }
    keys_.push_back(k);
    check_limit();
  }
  return {it->second, added};
}

void MdpBuilder::add_action(StateId from, std::string_view label, std::span<const Transition> dist) {
  if (from >= keys_.size()) {
    throw Error(ErrorCode::Model, "action '" + std::string(label) + "' added to unknown state");
  }
  auto describe_source = [&] {
    std::vector<int> source(schema_.size());
    schema_.decode(keys_[from], source);
    return schema_.describe(source);
  };
  check_distribution(describe_source, label, dist, keys_.size());

  auto [it, added] = label_index_.try_emplace(std::string(label), static_cast<std::uint32_t>(labels_.size()));
  if (added) labels_.emplace_back(label);
  action_state_.push_back(from);
  action_label_.push_back(it->second);
  transitions_.insert(transitions_.end(), dist.begin(), dist.end());
  action_transitions_.push_back(transitions_.size());
}

void MdpBuilder::mark_initial(StateId s) {
  if (s >= keys_.size()) throw Error(ErrorCode::Model, "initial state index out of range");
  initial_.push_back(s);
}

void MdpBuilder::set_initial(const StateFormula& formula) { initial_formula_ = formula; }

Mdp MdpBuilder::build() && {
  check_limit();
  const std::size_t n = keys_.size();
  if (n == 0) throw Error(ErrorCode::Model, "model has no states");

  // Row-major renumbering.
  std::vector<StateId> order(n);
  std::iota(order.begin(), order.end(), StateId{0});
  std::sort(order.begin(), order.end(), [&](StateId a, StateId b) { return keys_[a] < keys_[b]; });
  std::vector<StateId> new_id(n);
  for (StateId i = 0; i < n; ++i) new_id[order[i]] = i;

  Mdp m;
  m.schema_ = std::move(schema_);
  m.keys_.resize(n);
  for (StateId i = 0; i < n; ++i) m.keys_[i] = keys_[order[i]];

  // Group actions by new source id, keeping insertion order within a state.
  const std::size_t num_actions = action_state_.size();
  std::vector<std::size_t> count(n + 1, 0);
  for (StateId s : action_state_) ++count[new_id[s] + 1];
  std::uint32_t stall_label = 0;
  bool has_stall = false;
  for (StateId i = 0; i < n; ++i) {
    if (count[i + 1] == 0) {
      count[i + 1] = 1;
      if (!has_stall) {
        auto [it, added] = label_index_.try_emplace("stall", static_cast<std::uint32_t>(labels_.size()));
        if (added) labels_.emplace_back("stall");
        stall_label = it->second;
        has_stall = true;
      }
    }
  }
  std::partial_sum(count.begin(), count.end(), count.begin());
  m.state_actions_ = count;

  const std::size_t total_actions = count[n];
  std::vector<std::size_t> slot_of_action(num_actions);
  std::vector<std::size_t> cursor(count.begin(), count.end() - 1);
  for (std::size_t a = 0; a < num_actions; ++a) slot_of_action[a] = cursor[new_id[action_state_[a]]]++;

  std::vector<std::size_t> slot_size(total_actions, 1);  // stall loops have one edge
  std::vector<std::size_t> slot_source(total_actions, SIZE_MAX);
  for (std::size_t a = 0; a < num_actions; ++a) {
    slot_size[slot_of_action[a]] = action_transitions_[a + 1] - action_transitions_[a];
    slot_source[slot_of_action[a]] = a;
  }
  m.action_transitions_.assign(total_actions + 1, 0);
  for (std::size_t k = 0; k < total_actions; ++k) {
    m.action_transitions_[k + 1] = m.action_transitions_[k] + slot_size[k];
  }
  m.action_label_.assign(total_actions, stall_label);
  m.transitions_.resize(m.action_transitions_[total_actions]);

  std::vector<int> buf(m.schema_.size());
  for (StateId s = 0; s < n; ++s) {
    for (std::size_t k = m.state_actions_[s]; k < m.state_actions_[s + 1]; ++k) {
      Transition* out = m.transitions_.data() + m.action_transitions_[k];
      if (slot_source[k] == SIZE_MAX) {
        *out = Transition{s, 1.0};
        m.schema_.decode(m.keys_[s], buf);
        m.diagnostics_.push_back({s, "deadlock at " + m.schema_.describe(buf) +
                                         ": implicit 'stall' self-loop added"});
        continue;
      }
      std::size_t a = slot_source[k];
      m.action_label_[k] = action_label_[a];
      for (std::size_t t = action_transitions_[a]; t < action_transitions_[a + 1]; ++t) {
        *out++ = Transition{new_id[transitions_[t].target], transitions_[t].prob};
      }
    }
  }
  m.labels_ = std::move(labels_);

  std::vector<StateId> init;
  for (StateId s : initial_) init.push_back(new_id[s]);
  if (initial_formula_) {
    BoundFormula f(*initial_formula_, m.schema_);
    for (StateId s = 0; s < n; ++s) {
      m.schema_.decode(m.keys_[s], buf);
      if (f.evaluate(buf)) init.push_back(s);
    }
  }
  std::sort(init.begin(), init.end());
  init.erase(std::unique(init.begin(), init.end()), init.end());
  if (init.empty()) throw Error(ErrorCode::Model, "model has no initial state");
  m.initial_ = std::move(init);
  return m;
}

Mdp build_mdp(const VariableSchema& schema, const std::vector<std::vector<int>>& states,
              const std::vector<std::vector<ActionSpec>>& actions, const StateFormula& initial) {
  if (actions.size() > states.size()) {
    throw Error(ErrorCode::Model, "more action lists than states");
  }
  MdpBuilder b(schema);
  std::vector<StateId> ids;
  ids.reserve(states.size());
  for (const auto& v : states) ids.push_back(b.add_state(v));
  std::vector<Transition> dist;
  for (std::size_t s = 0; s < actions.size(); ++s) {
    for (const auto& act : actions[s]) {
      dist.clear();
      for (auto [target, p] : act.dist) {
        if (target >= ids.size()) {
          throw Error(ErrorCode::Model, "action '" + act.label + "' of state " +
                                            schema.describe(states[s]) + " targets unknown state index " +
                                            std::to_string(target));
        }
        dist.push_back({ids[target], p});
      }
      b.add_action(ids[s], act.label, dist);
    }
  }
  b.set_initial(initial);
  return std::move(b).build();
}

// ---------------------------------------------------------------------------

std::vector<StateId> reachable(const Mdp& mdp, std::span<const StateId> from) {
  std::vector<char> seen(mdp.num_states(), 0);
  std::vector<StateId> stack;
  for (StateId s : from) {
    if (s < mdp.num_states() && !seen[s]) {
      seen[s] = 1;
      stack.push_back(s);
    }
  }
  while (!stack.empty()) {
    StateId s = stack.back();
    stack.pop_back();
    for (std::size_t a = mdp.first_action(s); a < mdp.first_action(s + 1); ++a) {
      for (const auto& t : mdp.transitions(a)) {
        if (t.prob > 0.0 && !seen[t.target]) {
          seen[t.target] = 1;
          stack.push_back(t.target);
        }
      }
    }
  }
  std::vector<StateId> out;
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    if (seen[s]) out.push_back(s);
  }
  return out;
}

bool eval_formula(const Mdp& mdp, StateId s, const StateFormula& f) {
  BoundFormula bound(f, mdp.schema());
  return bound.evaluate(mdp.valuation(s));
}

std::vector<char> label_states(const Mdp& mdp, const StateFormula& f) {
  BoundFormula bound(f, mdp.schema());
  std::vector<char> out(mdp.num_states());
  std::vector<int> buf(mdp.schema().size());
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    mdp.valuation(s, buf);
    out[s] = bound.evaluate(buf) ? 1 : 0;
  }
  return out;
}

}  // namespace speclat
