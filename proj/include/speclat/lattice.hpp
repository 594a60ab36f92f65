#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "speclat/error.hpp"

namespace speclat {

/// One level of an attribute chain: a label (e.g. "p3") and its threshold.
struct ChainLevel {
  std::string label;
  int bound = 0;
};

/// Totally ordered family of upper-bound constraints on one attribute.
/// Level 1 is the strongest; bounds strictly increase with the level.
struct AttributeChain {
  std::string name;
  std::vector<ChainLevel> levels;

  /// Chain with levels prefix1..prefixN and the given bounds.
  static AttributeChain from_bounds(std::string name, const std::string& label_prefix,
                                    const std::vector<int>& bounds);
  void validate() const;
  std::size_t size() const { return levels.size(); }
};

/// A specification: one 1-based level index per chain.
struct SpecPoint {
  std::vector<int> index;

  friend bool operator==(const SpecPoint&, const SpecPoint&) = default;
  friend auto operator<=>(const SpecPoint&, const SpecPoint&) = default;
};

std::string to_string(const SpecPoint& p);

class SpecLattice {
 public:
  SpecLattice() = default;
  explicit SpecLattice(std::vector<AttributeChain> chains);

  const std::vector<AttributeChain>& chains() const { return chains_; }
  std::size_t dimension() const { return chains_.size(); }
  std::size_t size() const { return size_; }

  SpecPoint top() const;     // strongest: all indices 1
  SpecPoint bottom() const;  // weakest: all indices at their maximum
  bool contains(const SpecPoint& p) const;

  /// Row-major rank (last chain fastest) and its inverse.
  std::size_t rank(const SpecPoint& p) const;
  SpecPoint point(std::size_t rank) const;

  /// Every point, lexicographic by index vector.
  std::vector<SpecPoint> points() const;

  /// "p2 & q4" style rendering from the chain labels.
  std::string label(const SpecPoint& p) const;

 private:
  std::vector<AttributeChain> chains_;
  std::size_t size_ = 0;
};

/// True iff a is a weakening of b (a admits a superset of states): every
/// index of a is >= the corresponding index of b. Reflexive.
bool weakening_leq(const SpecPoint& a, const SpecPoint& b);

/// Immediate weakenings: one index incremented by one.
std::vector<SpecPoint> covers(const SpecLattice& lattice, const SpecPoint& a);

/// Probabilities over (part of) a lattice for one scenario.
class EvaluationGrid {
 public:
  EvaluationGrid() = default;
  EvaluationGrid(SpecLattice lattice, std::string scenario);

  const SpecLattice& lattice() const { return lattice_; }
  const std::string& scenario() const { return scenario_; }

  void set(const SpecPoint& p, double probability);
  bool has(const SpecPoint& p) const;
  double at(const SpecPoint& p) const;  // throws if missing
  bool complete() const;
  std::size_t count() const;

 private:
  SpecLattice lattice_;
  std::string scenario_;
  std::vector<double> values_;
  std::vector<char> present_;
};

struct Frontier {
  std::vector<SpecPoint> points;  // lexicographic order
  double rho = 0.0;
};

/// Strongest points (maximal under weakening_leq) among those with
/// probability >= rho. Grid must be complete.
Frontier frontier(const EvaluationGrid& grid, double rho);

/// Raised when a weaker point evaluates lower than a stronger one.
class MonotonicityError : public Error {
 public:
  MonotonicityError(SpecPoint weaker, double weaker_value, SpecPoint stronger, double stronger_value);

  const SpecPoint& weaker() const { return weaker_; }
  const SpecPoint& stronger() const { return stronger_; }
  double weaker_value() const { return weaker_value_; }
  double stronger_value() const { return stronger_value_; }

 private:
  SpecPoint weaker_;
  SpecPoint stronger_;
  double weaker_value_;
  double stronger_value_;
};

inline constexpr double kMonotonicityTolerance = 1e-9;

struct AdaptiveResult {
  Frontier frontier;
  std::size_t evaluations = 0;
  std::vector<std::pair<SpecPoint, double>> evaluated;  // in call order
};

using SpecEvaluator = std::function<double(const SpecPoint&)>;

/// Exact threshold frontier by staircase bisection over the product grid:
/// each evaluated point classifies its whole weaker (or stronger) orthant by
/// monotonicity, and only unclassified sub-boxes are searched further.
/// Throws MonotonicityError if two evaluated points contradict monotonicity.
AdaptiveResult adaptive_explore(const SpecLattice& lattice, const SpecEvaluator& evaluator, double rho);

}  // namespace speclat
