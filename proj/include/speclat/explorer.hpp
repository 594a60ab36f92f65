#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "speclat/gridworld.hpp"
#include "speclat/lattice.hpp"

namespace speclat::explore {

enum class SweepMode { Exhaustive, Adaptive };

const char* to_string(SweepMode mode);
SweepMode parse_mode(std::string_view text);

/// Scenario parameter varied across the sweep, one grid per value. Values
/// keep their config spelling, which is also used in output file names.
struct SweepParameter {
  std::string name = "capacity";  // capacity | min_energy | horizon | arrival_prob | human_stay_prob
  std::vector<std::string> values;
};

/// Chain names understood by the case study.
inline constexpr const char* kVelocityChain = "velocity";
inline constexpr const char* kServiceTimeChain = "service_time";

struct SweepPlan {
  grid::GridConfig scenario;
  SweepParameter swept;
  SpecLattice lattice;
  std::vector<double> rho_list;
  SweepMode mode = SweepMode::Exhaustive;
  unsigned threads = 1;

  void validate() const;  // throws Error(Config)
};

/// The 7x7 energy sweep: capacities {25,20,15,10,5,4,3,2,1}, 6 velocity by
/// 10 service-time levels.
SweepPlan default_plan();

/// Key-value config text; see README for the schema. Throws Error(Config)
/// with the offending line number.
SweepPlan parse_plan(std::string_view text);
SweepPlan load_plan(const std::filesystem::path& path);

/// Scenario for one swept value.
grid::GridConfig scenario_for(const SweepPlan& plan, std::size_t value_index);

/// Case-study parameters selected by a lattice point.
grid::SpecParams spec_for(const SpecLattice& lattice, const SpecPoint& p);

struct RunRecord {
  std::size_t value_index = 0;
  SpecPoint point;
  double probability = 0.0;
  double nominal_probability = 0.0;
  std::size_t states = 0;
  std::size_t transitions = 0;
  double build_ms = 0.0;
  double check_ms = 0.0;
  double wall_ms = 0.0;
};

struct Violation {
  SpecPoint weaker;
  SpecPoint stronger;
  double weaker_value = 0.0;
  double stronger_value = 0.0;
};

struct AuditReport {
  std::vector<Violation> violations;
  bool pass() const { return violations.empty(); }
};

/// Every comparable pair (weaker below stronger by more than 1e-9).
AuditReport audit_monotonicity(const EvaluationGrid& grid);

struct SweepResult {
  SweepPlan plan;
  std::vector<EvaluationGrid> grids;                 // per swept value
  std::vector<std::vector<Frontier>> frontiers;      // [value][rho]
  std::vector<AuditReport> audits;                   // per value; exhaustive only
  std::vector<RunRecord> runs;                       // sorted by (value, point)
  std::size_t checker_calls = 0;
};

SweepResult run_sweep(const SweepPlan& plan);

struct EmitOptions {
  /// Off: no "# generated" header line and wall-clock columns written as NA,
  /// so identical plans give byte-identical files.
  bool timestamp = true;
};

/// Writes grid_<value>.csv, heatmap_<value>.csv (two-chain lattices),
/// frontier_rho<rho>.csv, audit.csv and runlog.csv into out_dir, each via a
/// temporary file and rename. Returns the paths written.
std::vector<std::filesystem::path> emit_outputs(const SweepResult& result,
                                                const std::filesystem::path& out_dir,
                                                const EmitOptions& opts = {});

/// Shortest round-trip decimal text of a double.
std::string format_number(double v);

struct OracleCheckReport {
  std::size_t comparisons = 0;
  double max_abs_diff = 0.0;
  std::vector<std::string> mismatches;
  bool pass() const { return mismatches.empty(); }
};

/// Checker against the brute-force oracle on small grids derived from the
/// plan's human model, every state, a spread of specification points.
OracleCheckReport oracle_self_check(const SweepPlan& plan);

}  // namespace speclat::explore
