#pragma once

#include <cstdint>
#include <vector>

#include "speclat/formula.hpp"
#include "speclat/mdp.hpp"

namespace speclat {

/// phi U<=horizon psi
struct BoundedUntilQuery {
  StateFormula phi;
  StateFormula psi;
  int horizon = 0;
};

enum class FilterMode { Min, Average };

struct FilterSpec {
  FilterMode mode = FilterMode::Min;
  StateFormula condition;
};

/// Per-state probabilities after `horizon` steps of backward induction.
struct ValueVector {
  std::vector<double> values;
  int horizon = 0;

  double operator[](StateId s) const { return values[s]; }
  std::size_t size() const { return values.size(); }
};

/// Step-indexed deterministic policy. `action(k, s)` is the local action index
/// (0-based among the enabled actions of s) to take after k elapsed steps,
/// i.e. with horizon - k steps remaining.
class PolicyTable {
 public:
  PolicyTable() = default;
  PolicyTable(int horizon, std::size_t num_states)
      : horizon_(horizon), num_states_(num_states),
        choice_(static_cast<std::size_t>(horizon) * num_states, 0) {}

  int horizon() const { return horizon_; }
  std::size_t num_states() const { return num_states_; }

  std::uint16_t action(int step, StateId s) const { return choice_[index(step, s)]; }
  void set(int step, StateId s, std::uint16_t a) { choice_[index(step, s)] = a; }

 private:
  std::size_t index(int step, StateId s) const {
    return static_cast<std::size_t>(step) * num_states_ + s;
  }
  int horizon_ = 0;
  std::size_t num_states_ = 0;
  std::vector<std::uint16_t> choice_;
};

struct CheckerOptions {
  /// Worker count for the per-step sweep. Results do not depend on it.
  unsigned threads = 1;
};

struct BoundedUntilResult {
  ValueVector values;
  PolicyTable policy;
};

/// Maximum probability, over all schedulers, of phi U<=horizon psi from every
/// state, by finite-horizon backward induction.
ValueVector pmax_bounded_until(const Mdp& mdp, const BoundedUntilQuery& q,
                               const CheckerOptions& opts = {});

/// Optimal step-indexed policy; ties go to the lowest action index.
PolicyTable extract_policy(const Mdp& mdp, const BoundedUntilQuery& q,
                           const CheckerOptions& opts = {});

/// Values and policy in one induction pass.
BoundedUntilResult solve_bounded_until(const Mdp& mdp, const BoundedUntilQuery& q,
                                       const CheckerOptions& opts = {});

/// min or unweighted mean of `values` over the states satisfying the filter
/// condition. Throws Error(Filter) when no state qualifies.
double filter_apply(const ValueVector& values, const FilterSpec& filter, const Mdp& mdp);

}  // namespace speclat
