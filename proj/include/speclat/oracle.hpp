#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "speclat/checker.hpp"
#include "speclat/gridworld.hpp"
#include "speclat/mdp.hpp"

// Reference implementations used to cross-check the checker and the
// case-study builder. Nothing here calls into checker.cpp or gridworld.cpp
// beyond the shared data types.
namespace speclat::oracle {

inline constexpr std::size_t kDefaultNodeLimit = 10'000'000;
inline constexpr int kMaxBruteForceHorizon = 8;

/// Unmemoized recursive expansion of the bounded-until value from s.
/// Throws Error(OracleGuard) if the horizon exceeds 8 or the recursion tree
/// grows past node_limit nodes.
double brute_force_pmax(const Mdp& mdp, const BoundedUntilQuery& q, StateId s,
                        std::size_t node_limit = kDefaultNodeLimit);

struct SimulationReport {
  std::uint64_t samples = 0;
  std::uint64_t successes = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t seed = 0;
  std::string generator;  // algorithm identifier, for reruns elsewhere
};

inline constexpr const char* kGeneratorId = "mt19937_64/u53";

/// n rollouts of the step-indexed policy from `start`. A rollout succeeds
/// when psi is reached within the horizon with phi holding at every earlier
/// step. Deterministic for a given seed.
SimulationReport simulate_policy(const Mdp& mdp, const PolicyTable& policy, const BoundedUntilQuery& q,
                                 StateId start, std::uint64_t n, std::uint64_t seed);

/// Plain restatement of the case-study rules: for each enabled action label,
/// the successor states with their probabilities.
std::map<std::string, std::map<std::vector<int>, double>> gridworld_successors(
    const grid::GridConfig& cfg, const grid::SpecParams& spec, const std::vector<int>& valuation);

/// Breadth-first count of the states reachable from the case-study start
/// states, using gridworld_successors.
std::size_t gridworld_reachable_count(const grid::GridConfig& cfg, const grid::SpecParams& spec);

}  // namespace speclat::oracle
