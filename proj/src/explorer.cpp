#include "speclat/explorer.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "parallel.hpp"
#include "speclat/checker.hpp"
#include "speclat/error.hpp"
#include "speclat/oracle.hpp"

namespace speclat::explore {

const char* to_string(SweepMode mode) {
  return mode == SweepMode::Exhaustive ? "exhaustive" : "adaptive";
}

SweepMode parse_mode(std::string_view text) {
  if (text == "exhaustive") return SweepMode::Exhaustive;
  if (text == "adaptive") return SweepMode::Adaptive;
  throw Error(ErrorCode::Config, "unknown mode '" + std::string(text) + "' (exhaustive|adaptive)");
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

namespace {

std::string format_ms(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 3);
  return std::string(buf, ptr);
}

std::string trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

int parse_int(const std::string& s, const std::string& what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::Config, what + ": expected an integer, got '" + s + "'");
  }
  return v;
}

double parse_double(const std::string& s, const std::string& what) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::Config, what + ": expected a number, got '" + s + "'");
  }
  return v;
}

grid::Cell parse_cell(const std::string& s, const std::string& what) {
  auto parts = split(s, ',');
  if (parts.size() != 2) throw Error(ErrorCode::Config, what + ": expected 'x,y', got '" + s + "'");
  return {parse_int(parts[0], what), parse_int(parts[1], what)};
}

// "1,2,5..8" -> 1 2 5 6 7 8
std::vector<int> parse_int_list(const std::string& s, const std::string& what) {
  std::vector<int> out;
  for (const auto& item : split(s, ',')) {
    auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_int(item, what));
      continue;
    }
    int lo = parse_int(trim(item.substr(0, dots)), what);
    int hi = parse_int(trim(item.substr(dots + 2)), what);
    if (lo > hi) throw Error(ErrorCode::Config, what + ": empty range '" + item + "'");
    for (int v = lo; v <= hi; ++v) out.push_back(v);
  }
  return out;
}

const std::vector<std::string>& sweepable() {
  static const std::vector<std::string> names{"capacity", "min_energy", "horizon", "arrival_prob",
                                              "human_stay_prob"};
  return names;
}

void apply_value(grid::GridConfig& cfg, const std::string& name, const std::string& value) {
  const std::string what = "sweep value for " + name;
  if (name == "capacity") cfg.capacity = parse_int(value, what);
  else if (name == "min_energy") cfg.min_energy = parse_int(value, what);
  else if (name == "horizon") cfg.horizon = parse_int(value, what);
  else if (name == "arrival_prob") cfg.arrival_prob = parse_double(value, what);
  else if (name == "human_stay_prob") {
    if (value == "uniform") cfg.human_stay_prob.reset();
    else cfg.human_stay_prob = parse_double(value, what);
  } else {
    throw Error(ErrorCode::Config, "parameter '" + name + "' cannot be swept");
  }
}

std::string label_prefix(const std::string& chain) {
  if (chain == kVelocityChain) return "p";
  if (chain == kServiceTimeChain) return "q";
  return chain.substr(0, 1);
}

}  // namespace

void SweepPlan::validate() const {
  try {
    scenario.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, e.what());
  }
  if (std::find(sweepable().begin(), sweepable().end(), swept.name) == sweepable().end()) {
    throw Error(ErrorCode::Config, "parameter '" + swept.name + "' cannot be swept");
  }
  if (swept.values.empty()) throw Error(ErrorCode::Config, "sweep has no values");
  for (std::size_t i = 0; i < swept.values.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (swept.values[i] == swept.values[j]) {
        throw Error(ErrorCode::Config, "sweep value '" + swept.values[i] + "' listed twice");
      }
    }
    try {
      scenario_for(*this, i).validate();
    } catch (const Error& e) {
      throw Error(ErrorCode::Config, swept.name + "=" + swept.values[i] + ": " + e.what());
    }
  }
  for (double r : rho_list) {
    if (!(r >= 0.0 && r <= 1.0)) throw Error(ErrorCode::Config, "rho " + format_number(r) + " outside [0,1]");
  }
  if (lattice.dimension() != 2) {
    throw Error(ErrorCode::Config, "the case study needs exactly the chains '" + std::string(kVelocityChain) +
                                       "' and '" + kServiceTimeChain + "'");
  }
  bool has_v = false, has_t = false;
  for (const auto& c : lattice.chains()) {
    const int lo = c.levels.front().bound, hi = c.levels.back().bound;
    if (c.name == kVelocityChain) {
      has_v = true;
      if (lo < 1 || hi > grid::kMaxSpeed) throw Error(ErrorCode::Config, "velocity bounds must lie in 1..6");
    } else if (c.name == kServiceTimeChain) {
      has_t = true;
      if (lo < 1 || hi > grid::kMaxServiceTime) {
        throw Error(ErrorCode::Config, "service_time bounds must lie in 1..10");
      }
    } else {
      throw Error(ErrorCode::Config, "unknown chain '" + c.name + "'");
    }
  }
  if (!has_v || !has_t) {
    throw Error(ErrorCode::Config, "the case study needs both a velocity and a service_time chain");
  }
  if (threads < 1) throw Error(ErrorCode::Config, "threads must be at least 1");
}

SweepPlan default_plan() {
  SweepPlan plan;
  plan.swept = {"capacity", {"25", "20", "15", "10", "5", "4", "3", "2", "1"}};
  plan.lattice = SpecLattice({AttributeChain::from_bounds(kVelocityChain, "p", {1, 2, 3, 4, 5, 6}),
                              AttributeChain::from_bounds(kServiceTimeChain, "q", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10})});
  plan.rho_list = {0.5, 0.9};
  return plan;
}

SweepPlan parse_plan(std::string_view text) {
  SweepPlan plan = default_plan();
  plan.swept.values.clear();
  std::vector<AttributeChain> chains;
  bool rho_set = false;

  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    auto hash = raw.find('#');
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    auto eq = line.find('=');
    const std::string where = "line " + std::to_string(line_no);
    if (eq == std::string::npos) throw Error(ErrorCode::Config, where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string what = where + " (" + key + ")";
    auto& sc = plan.scenario;
    try {
      if (key == "width") sc.width = parse_int(value, what);
      else if (key == "height") sc.height = parse_int(value, what);
      else if (key == "robot") sc.robot0 = parse_cell(value, what);
      else if (key == "human") sc.human0 = parse_cell(value, what);
      else if (key == "station") sc.station = parse_cell(value, what);
      else if (key == "capacity") sc.capacity = parse_int(value, what);
      else if (key == "min_energy") sc.min_energy = parse_int(value, what);
      else if (key == "horizon") sc.horizon = parse_int(value, what);
      else if (key == "arrival_prob") sc.arrival_prob = parse_double(value, what);
      else if (key == "human_stay_prob") {
        if (value == "uniform") sc.human_stay_prob.reset();
        else sc.human_stay_prob = parse_double(value, what);
      } else if (key == "start") {
        if (value == "nominal") sc.start_anywhere = false;
        else if (value == "anywhere") sc.start_anywhere = true;
        else throw Error(ErrorCode::Config, what + ": expected 'nominal' or 'anywhere'");
      } else if (key == "max_states") {
        sc.max_states = static_cast<std::size_t>(parse_int(value, what));
      } else if (key == "sweep") {
        auto colon = value.find(':');
        if (colon == std::string::npos) throw Error(ErrorCode::Config, what + ": expected 'name: v1, v2, ...'");
        plan.swept.name = trim(value.substr(0, colon));
        plan.swept.values = split(value.substr(colon + 1), ',');
        for (const auto& v : plan.swept.values) {
          if (v.empty()) throw Error(ErrorCode::Config, what + ": empty sweep value");
        }
      } else if (key == "chain") {
        auto colon = value.find(':');
        if (colon == std::string::npos) throw Error(ErrorCode::Config, what + ": expected 'name: bounds'");
        std::string name = trim(value.substr(0, colon));
        chains.push_back(AttributeChain::from_bounds(name, label_prefix(name),
                                                     parse_int_list(trim(value.substr(colon + 1)), what)));
      } else if (key == "rho") {
        if (!rho_set) plan.rho_list.clear();
        rho_set = true;
        for (const auto& r : split(value, ',')) plan.rho_list.push_back(parse_double(r, what));
      } else if (key == "mode") {
        plan.mode = parse_mode(value);
      } else if (key == "threads") {
        int t = parse_int(value, what);
        if (t < 1) throw Error(ErrorCode::Config, what + ": threads must be at least 1");
        plan.threads = static_cast<unsigned>(t);
      } else {
        throw Error(ErrorCode::Config, where + ": unknown key '" + key + "'");
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Config) throw;
      throw Error(ErrorCode::Config, what + ": " + e.what());
    }
  }
  if (!chains.empty()) plan.lattice = SpecLattice(std::move(chains));
  if (plan.swept.values.empty()) {
    plan.swept.name = "capacity";
    plan.swept.values = {std::to_string(plan.scenario.capacity)};
  }
  plan.validate();
  return plan;
}

SweepPlan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_plan(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

grid::GridConfig scenario_for(const SweepPlan& plan, std::size_t value_index) {
  grid::GridConfig cfg = plan.scenario;
  apply_value(cfg, plan.swept.name, plan.swept.values.at(value_index));
  return cfg;
}

grid::SpecParams spec_for(const SpecLattice& lattice, const SpecPoint& p) {
  grid::SpecParams spec;
  for (std::size_t i = 0; i < lattice.dimension(); ++i) {
    const auto& chain = lattice.chains()[i];
    const int bound = chain.levels.at(static_cast<std::size_t>(p.index.at(i) - 1)).bound;
    if (chain.name == kVelocityChain) spec.vmax = bound;
    else if (chain.name == kServiceTimeChain) spec.tmax = bound;
    else throw Error(ErrorCode::Config, "unknown chain '" + chain.name + "'");
  }
  return spec;
}

AuditReport audit_monotonicity(const EvaluationGrid& grid) {
  AuditReport report;
  const auto points = grid.lattice().points();
  for (const auto& a : points) {
    if (!grid.has(a)) continue;
    for (const auto& b : points) {
      if (a == b || !grid.has(b) || !weakening_leq(a, b)) continue;
      // a is weaker than b
      if (grid.at(a) < grid.at(b) - kMonotonicityTolerance) {
        report.violations.push_back({a, b, grid.at(a), grid.at(b)});
      }
    }
  }
  return report;
}

namespace {

RunRecord run_check(const SweepPlan& plan, std::size_t value_index, const SpecPoint& p) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  RunRecord rec;
  rec.value_index = value_index;
  rec.point = p;
  try {
    auto cfg = scenario_for(plan, value_index);
    auto outcome = grid::check_spec(cfg, spec_for(plan.lattice, p));
    rec.probability = outcome.probability;
    rec.nominal_probability = outcome.nominal_probability;
    rec.states = outcome.states;
    rec.transitions = outcome.transitions;
    rec.build_ms = outcome.build_ms;
    rec.check_ms = outcome.check_ms;
  } catch (const Error& e) {
    throw Error(e.code(), plan.swept.name + "=" + plan.swept.values[value_index] + ", point " + to_string(p) +
                              " (" + plan.lattice.label(p) + "): " + e.what());
  }
  rec.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
  return rec;
}

}  // namespace

SweepResult run_sweep(const SweepPlan& plan) {
  plan.validate();
  SweepResult result;
  result.plan = plan;
  const std::size_t nvalues = plan.swept.values.size();
  const auto points = plan.lattice.points();

  std::vector<std::vector<RunRecord>> per_value(nvalues);
  result.frontiers.assign(nvalues, {});

  if (plan.mode == SweepMode::Exhaustive) {
    const std::size_t jobs = nvalues * points.size();
    std::vector<RunRecord> slots(jobs);
    detail::parallel_jobs(jobs, plan.threads, [&](std::size_t j) {
      slots[j] = run_check(plan, j / points.size(), points[j % points.size()]);
    });
    for (auto& r : slots) per_value[r.value_index].push_back(std::move(r));
  } else {
    detail::parallel_jobs(nvalues, plan.threads, [&](std::size_t v) {
      std::map<SpecPoint, RunRecord> cache;
      auto evaluator = [&](const SpecPoint& p) {
        auto it = cache.find(p);
        if (it == cache.end()) it = cache.emplace(p, run_check(plan, v, p)).first;
        return it->second.probability;
      };
      std::vector<Frontier> fronts;
      for (double rho : plan.rho_list) {
        try {
          fronts.push_back(adaptive_explore(plan.lattice, evaluator, rho).frontier);
        } catch (const MonotonicityError& e) {
          throw Error(ErrorCode::Monotonicity, plan.swept.name + "=" + plan.swept.values[v] + ": " + e.what());
        }
      }
      for (auto& [p, rec] : cache) per_value[v].push_back(rec);
      result.frontiers[v] = std::move(fronts);
    });
  }

  for (std::size_t v = 0; v < nvalues; ++v) {
    EvaluationGrid g(plan.lattice, plan.swept.name + "=" + plan.swept.values[v]);
    auto& recs = per_value[v];
    std::sort(recs.begin(), recs.end(), [](const RunRecord& a, const RunRecord& b) { return a.point < b.point; });
    for (const auto& r : recs) g.set(r.point, r.probability);
    result.checker_calls += recs.size();
    if (plan.mode == SweepMode::Exhaustive) {
      for (double rho : plan.rho_list) result.frontiers[v].push_back(frontier(g, rho));
      result.audits.push_back(audit_monotonicity(g));
    }
    result.grids.push_back(std::move(g));
    result.runs.insert(result.runs.end(), recs.begin(), recs.end());
  }
  return result;
}

// ---------------------------------------------------------------------------
// Output files

namespace {

std::string file_token(const std::string& s) {
  std::string out;
  for (char c : s) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_';
    out += ok ? c : '_';
  }
  return out;
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_atomically(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

}  // namespace

std::vector<std::filesystem::path> emit_outputs(const SweepResult& result, const std::filesystem::path& out_dir,
                                                const EmitOptions& opts) {
  const auto& plan = result.plan;
  if (result.grids.empty()) throw Error(ErrorCode::InvalidArgument, "no results to emit");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + out_dir.string() + ": " + ec.message());

  const std::string header_line = opts.timestamp ? "# generated " + utc_timestamp() + "\n" : "";
  auto ms_cell = [&](double v) { return opts.timestamp ? format_ms(v) : std::string("NA"); };
  std::string chain_cols;
  for (const auto& c : plan.lattice.chains()) chain_cols += "," + c.name;
  auto index_cols = [](const SpecPoint& p) {
    std::string s;
    for (int i : p.index) s += "," + std::to_string(i);
    return s;
  };

  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, const std::string& body) {
    auto path = out_dir / name;
    write_atomically(path, header_line + body);
    written.push_back(path);
  };

  // Per-value grids and heatmaps.
  std::map<std::size_t, std::map<SpecPoint, const RunRecord*>> by_value;
  for (const auto& r : result.runs) by_value[r.value_index][r.point] = &r;
  for (std::size_t v = 0; v < result.grids.size(); ++v) {
    const std::string value = plan.swept.values[v];
    std::string body = plan.swept.name + chain_cols + ",probability,wall_ms\n";
    for (const auto& [p, rec] : by_value[v]) {
      body += value + index_cols(p) + "," + format_number(rec->probability) + "," + ms_cell(rec->wall_ms) + "\n";
    }
    emit("grid_" + file_token(value) + ".csv", body);

    if (plan.lattice.dimension() == 2) {
      const auto& rows = plan.lattice.chains()[0];
      const auto& cols = plan.lattice.chains()[1];
      std::string hm = rows.name + "\\" + cols.name;
      for (const auto& l : cols.levels) hm += "," + l.label;
      hm += "\n";
      for (std::size_t i = 0; i < rows.size(); ++i) {
        hm += rows.levels[i].label;
        for (std::size_t j = 0; j < cols.size(); ++j) {
          SpecPoint p{{static_cast<int>(i + 1), static_cast<int>(j + 1)}};
          hm += ",";
          if (result.grids[v].has(p)) hm += format_number(result.grids[v].at(p));
        }
        hm += "\n";
      }
      emit("heatmap_" + file_token(value) + ".csv", hm);
    }
  }

  // Frontiers, one file per threshold.
  for (std::size_t k = 0; k < plan.rho_list.size(); ++k) {
    std::string body = plan.swept.name + chain_cols + ",label,probability\n";
    for (std::size_t v = 0; v < result.frontiers.size(); ++v) {
      for (const auto& p : result.frontiers[v].at(k).points) {
        std::string label = plan.lattice.label(p);
        label.erase(std::remove(label.begin(), label.end(), ' '), label.end());
        const double prob = result.grids[v].has(p) ? result.grids[v].at(p) : NAN;
        body += plan.swept.values[v] + index_cols(p) + "," + label + "," + format_number(prob) + "\n";
      }
    }
    emit("frontier_rho" + file_token(format_number(plan.rho_list[k])) + ".csv", body);
  }

  // Monotonicity audit.
  {
    std::string body = plan.swept.name + ",weaker,stronger,weaker_probability,stronger_probability\n";
    for (std::size_t v = 0; v < result.audits.size(); ++v) {
      for (const auto& viol : result.audits[v].violations) {
        auto compact = [&](const SpecPoint& p) {
          std::string l = plan.lattice.label(p);
          l.erase(std::remove(l.begin(), l.end(), ' '), l.end());
          return l;
        };
        body += plan.swept.values[v] + "," + compact(viol.weaker) + "," + compact(viol.stronger) + "," +
                format_number(viol.weaker_value) + "," + format_number(viol.stronger_value) + "\n";
      }
    }
    emit("audit.csv", body);
  }

  // Run log.
  {
    std::string body = plan.swept.name + chain_cols +
                       ",probability,nominal_probability,states,transitions,build_ms,check_ms,wall_ms\n";
    for (const auto& r : result.runs) {
      body += plan.swept.values[r.value_index] + index_cols(r.point) + "," + format_number(r.probability) + "," +
              format_number(r.nominal_probability) + "," + std::to_string(r.states) + "," +
              std::to_string(r.transitions) + "," + ms_cell(r.build_ms) + "," + ms_cell(r.check_ms) + "," +
              ms_cell(r.wall_ms) + "\n";
    }
    emit("runlog.csv", body);
  }
  return written;
}

// ---------------------------------------------------------------------------

OracleCheckReport oracle_self_check(const SweepPlan& plan) {
  OracleCheckReport report;
  grid::GridConfig cfg;
  cfg.width = 3;
  cfg.height = 3;
  cfg.robot0 = {0, 2};
  cfg.human0 = {2, 0};
  cfg.station = {0, 0};
  cfg.capacity = 3;
  cfg.min_energy = std::min(plan.scenario.min_energy, 2);
  cfg.horizon = 3;
  cfg.arrival_prob = plan.scenario.arrival_prob;
  cfg.human_stay_prob = plan.scenario.human_stay_prob;

  const std::vector<grid::SpecParams> specs{{1, 1}, {1, 3}, {2, 2}, {6, 1}, {6, 10}};
  for (const auto& spec : specs) {
    Mdp mdp = grid::build_model(cfg, spec);
    auto pq = grid::property_query(cfg, spec);
    auto values = pmax_bounded_until(mdp, pq.query);
    for (StateId s = 0; s < mdp.num_states(); ++s) {
      const double reference = oracle::brute_force_pmax(mdp, pq.query, s);
      const double diff = std::abs(reference - values[s]);
      report.max_abs_diff = std::max(report.max_abs_diff, diff);
      ++report.comparisons;
      if (diff > 1e-9) {
        std::ostringstream os;
        os.precision(17);
        os << "spec (vmax=" << spec.vmax << ", tmax=" << spec.tmax << ") state " << mdp.describe(s)
           << ": checker " << values[s] << " vs oracle " << reference;
        report.mismatches.push_back(os.str());
      }
    }
  }
  return report;
}

}  // namespace speclat::explore
