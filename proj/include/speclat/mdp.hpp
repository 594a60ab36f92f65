#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "speclat/formula.hpp"

namespace speclat {

/// Dense index of a state within one Mdp.
using StateId = std::uint32_t;

/// Row-major rank of a full valuation under a schema.
using StateKey = std::uint64_t;

inline constexpr double kProbabilityTolerance = 1e-9;

struct VariableDomain {
  std::string name;
  int lo = 0;
  int hi = 0;  // inclusive
};

/// Ordered list of bounded integer variables. Valuations are ranked
/// row-major (the last variable varies fastest).
class VariableSchema {
 public:
  VariableSchema() = default;
  explicit VariableSchema(std::vector<VariableDomain> variables);

  std::size_t size() const { return variables_.size(); }
  const VariableDomain& variable(std::size_t i) const { return variables_[i]; }
  const std::vector<VariableDomain>& variables() const { return variables_; }

  std::optional<std::size_t> index_of(std::string_view name) const;
  std::size_t require_index(std::string_view name) const;  // throws Error(Formula)

  /// Number of distinct valuations.
  StateKey cardinality() const { return cardinality_; }

  bool in_range(std::span<const int> valuation) const;
  StateKey encode(std::span<const int> valuation) const;  // throws Error(Model)
  void decode(StateKey key, std::span<int> out) const;
  int component(StateKey key, std::size_t var) const;

  /// "(x=1, y=2)"; used in every diagnostic that names a state.
  std::string describe(std::span<const int> valuation) const;

 private:
  std::vector<VariableDomain> variables_;
  std::vector<StateKey> strides_;
  StateKey cardinality_ = 1;
};

struct Transition {
  StateId target;
  double prob;
};

struct Diagnostic {
  StateId state;
  std::string message;
};

class MdpBuilder;

/// Explicit finite MDP. Immutable once built; safe for concurrent reads.
///
/// States are numbered in row-major key order, so StateId order matches the
/// schema's valuation order regardless of how the builder discovered them.
class Mdp {
 public:
  const VariableSchema& schema() const { return schema_; }

  std::size_t num_states() const { return keys_.size(); }
  std::size_t num_actions() const { return action_label_.size(); }
  std::size_t num_transitions() const { return transitions_.size(); }

  StateKey key(StateId s) const { return keys_[s]; }
  std::vector<int> valuation(StateId s) const;
  void valuation(StateId s, std::span<int> out) const;
  int value(StateId s, std::size_t var) const { return schema_.component(keys_[s], var); }
  std::optional<StateId> find(std::span<const int> valuation) const;
  std::string describe(StateId s) const;

  /// Global action indices of state s are [first_action(s), first_action(s+1)).
  std::size_t first_action(StateId s) const { return state_actions_[s]; }
  std::size_t num_actions(StateId s) const { return state_actions_[s + 1] - state_actions_[s]; }
  const std::string& action_label(std::size_t action) const {
    return labels_[action_label_[action]];
  }
  std::span<const Transition> transitions(std::size_t action) const {
    return {transitions_.data() + action_transitions_[action],
            action_transitions_[action + 1] - action_transitions_[action]};
  }

  const std::vector<StateId>& initial_states() const { return initial_; }

  /// States that had no enabled action and received the implicit "stall" loop.
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

  /// Re-checks every structural invariant; throws Error(Model) on violation.
  void validate() const;

  /// Tab-separated debug dump: source, action, target, probability.
  void write_dump(std::ostream& out) const;

 private:
  friend class MdpBuilder;
  Mdp() = default;

  VariableSchema schema_;
  std::vector<StateKey> keys_;
  std::vector<std::size_t> state_actions_;
  std::vector<std::uint32_t> action_label_;
  std::vector<std::size_t> action_transitions_;
  std::vector<Transition> transitions_;
  std::vector<std::string> labels_;
  std::vector<StateId> initial_;
  std::vector<Diagnostic> diagnostics_;
};

/// Incremental construction. StateIds handed out by the builder are
/// provisional; build() renumbers into row-major order (use Mdp::find).
class MdpBuilder {
 public:
  explicit MdpBuilder(VariableSchema schema);

  const VariableSchema& schema() const { return schema_; }
  std::size_t num_states() const { return keys_.size(); }

  /// Throws on out-of-range or duplicate valuations.
  StateId add_state(std::span<const int> valuation);
  std::optional<StateId> find_state(std::span<const int> valuation) const;
  /// Returns the existing id, or adds the state; second = true if added.
  std::pair<StateId, bool> intern_state(std::span<const int> valuation);

  /// Checks the distribution immediately: positive probabilities, unique and
  /// valid targets, and a sum of 1 within kProbabilityTolerance.
  void add_action(StateId from, std::string_view label, std::span<const Transition> dist);

  void mark_initial(StateId s);
  /// Every state satisfying the formula at build time becomes initial.
  void set_initial(const StateFormula& formula);

  /// build() throws Error(StateLimit) beyond this many states.
  void set_state_limit(std::size_t limit) { state_limit_ = limit; }

  Mdp build() &&;

 private:
  void check_limit() const;

  VariableSchema schema_;
  std::vector<StateKey> keys_;
  std::unordered_map<StateKey, StateId> index_;
  std::vector<StateId> action_state_;
  std::vector<std::uint32_t> action_label_;
  std::vector<std::size_t> action_transitions_{0};
  std::vector<Transition> transitions_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::uint32_t> label_index_;
  std::vector<StateId> initial_;
  std::optional<StateFormula> initial_formula_;
  std::size_t state_limit_ = 0;  // 0 = unlimited
};

/// One enabled action given by label and (target index, probability) pairs,
/// where targets index the valuation list passed to build_mdp.
struct ActionSpec {
  std::string label;
  std::vector<std::pair<std::size_t, double>> dist;
};

/// One-shot construction from a valuation table.
Mdp build_mdp(const VariableSchema& schema, const std::vector<std::vector<int>>& states,
              const std::vector<std::vector<ActionSpec>>& actions, const StateFormula& initial);

/// Forward closure under every enabled action and positive-probability edge.
/// Result is sorted.
std::vector<StateId> reachable(const Mdp& mdp, std::span<const StateId> from);

/// Truth of f under the valuation of s. Throws Error(Formula) on unknown names.
bool eval_formula(const Mdp& mdp, StateId s, const StateFormula& f);

/// Indicator of f over all states, evaluated once per state.
std::vector<char> label_states(const Mdp& mdp, const StateFormula& f);

}  // namespace speclat
