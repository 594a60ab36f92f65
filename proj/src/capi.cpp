#include "speclat/speclat.h"

#include <exception>
#include <new>
#include <string>

#include "speclat/error.hpp"
#include "speclat/explorer.hpp"

struct speclat_plan {
  speclat::explore::SweepPlan plan;
};

struct speclat_sweep {
  speclat::explore::SweepResult result;
};

namespace {

thread_local std::string last_error;

speclat_status status_of(speclat::ErrorCode code) {
  using speclat::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return SPECLAT_ERR_INVALID_ARGUMENT;
    case ErrorCode::Parse: return SPECLAT_ERR_PARSE;
    case ErrorCode::Formula: return SPECLAT_ERR_FORMULA;
    case ErrorCode::Model: return SPECLAT_ERR_MODEL;
    case ErrorCode::StateLimit: return SPECLAT_ERR_STATE_LIMIT;
    case ErrorCode::Filter: return SPECLAT_ERR_FILTER;
    case ErrorCode::Monotonicity: return SPECLAT_ERR_MONOTONICITY;
    case ErrorCode::OracleGuard: return SPECLAT_ERR_ORACLE_GUARD;
    case ErrorCode::OracleMismatch: return SPECLAT_ERR_ORACLE_MISMATCH;
    case ErrorCode::Config: return SPECLAT_ERR_CONFIG;
    case ErrorCode::Io: return SPECLAT_ERR_IO;
  }
  return SPECLAT_ERR_INTERNAL;
}

speclat_status fail(speclat_status s, std::string message) {
  last_error = std::move(message);
  return s;
}

template <class F>
speclat_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const speclat::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SPECLAT_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SPECLAT_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SPECLAT_ERR_INTERNAL, "unknown failure");
  }
}

speclat_status null_arg(const char* name) {
  return fail(SPECLAT_ERR_INVALID_ARGUMENT, std::string(name) + " is null");
}

}  // namespace

extern "C" {

const char* speclat_version(void) { return "0.1.0"; }

const char* speclat_last_error(void) { return last_error.c_str(); }

const char* speclat_status_name(speclat_status status) {
  switch (status) {
    case SPECLAT_OK: return "ok";
    case SPECLAT_ERR_INTERNAL: return "internal";
    default: break;
  }
  using speclat::ErrorCode;
  static const ErrorCode codes[] = {ErrorCode::InvalidArgument, ErrorCode::Parse,         ErrorCode::Formula,
                                    ErrorCode::Model,           ErrorCode::StateLimit,    ErrorCode::Filter,
                                    ErrorCode::Monotonicity,    ErrorCode::OracleGuard,   ErrorCode::OracleMismatch,
                                    ErrorCode::Config,          ErrorCode::Io};
  for (auto c : codes) {
    if (status_of(c) == status) return speclat::to_string(c);
  }
  return "unknown";
}

speclat_status speclat_plan_default(speclat_plan** out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new speclat_plan{speclat::explore::default_plan()};
    return SPECLAT_OK;
  });
}

speclat_status speclat_plan_load(const char* path, speclat_plan** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new speclat_plan{speclat::explore::load_plan(path)};
    return SPECLAT_OK;
  });
}

speclat_status speclat_plan_parse(const char* text, speclat_plan** out) {
  if (!text) return null_arg("text");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new speclat_plan{speclat::explore::parse_plan(text)};
    return SPECLAT_OK;
  });
}

speclat_status speclat_plan_set_mode(speclat_plan* plan, speclat_mode mode) {
  if (!plan) return null_arg("plan");
  if (mode != SPECLAT_MODE_EXHAUSTIVE && mode != SPECLAT_MODE_ADAPTIVE) {
    return fail(SPECLAT_ERR_INVALID_ARGUMENT, "unknown mode");
  }
  plan->plan.mode =
      mode == SPECLAT_MODE_EXHAUSTIVE ? speclat::explore::SweepMode::Exhaustive : speclat::explore::SweepMode::Adaptive;
  return SPECLAT_OK;
}

speclat_status speclat_plan_set_rho(speclat_plan* plan, const double* rho, size_t count) {
  if (!plan) return null_arg("plan");
  if (!rho && count > 0) return null_arg("rho");
  return guarded([&] {
    auto copy = plan->plan;
    copy.rho_list.assign(rho, rho + count);
    copy.validate();
    plan->plan = std::move(copy);
    return SPECLAT_OK;
  });
}

speclat_status speclat_plan_set_threads(speclat_plan* plan, unsigned threads) {
  if (!plan) return null_arg("plan");
  if (threads == 0) return fail(SPECLAT_ERR_INVALID_ARGUMENT, "threads must be at least 1");
  plan->plan.threads = threads;
  return SPECLAT_OK;
}

size_t speclat_plan_num_values(const speclat_plan* plan) { return plan ? plan->plan.swept.values.size() : 0; }

size_t speclat_plan_num_points(const speclat_plan* plan) { return plan ? plan->plan.lattice.size() : 0; }

void speclat_plan_free(speclat_plan* plan) { delete plan; }

speclat_status speclat_oracle_check(const speclat_plan* plan, size_t* comparisons, double* max_abs_diff) {
  if (!plan) return null_arg("plan");
  return guarded([&] {
    auto report = speclat::explore::oracle_self_check(plan->plan);
    if (comparisons) *comparisons = report.comparisons;
    if (max_abs_diff) *max_abs_diff = report.max_abs_diff;
    if (!report.pass()) {
      return fail(SPECLAT_ERR_ORACLE_MISMATCH, std::to_string(report.mismatches.size()) +
                                                   " oracle mismatches; first: " + report.mismatches.front());
    }
    return SPECLAT_OK;
  });
}

speclat_status speclat_check_point(const speclat_plan* plan, size_t value_index, int vmax, int tmax,
                                   double* probability, size_t* states) {
  if (!plan) return null_arg("plan");
  if (!probability) return null_arg("probability");
  return guarded([&] {
    if (value_index >= plan->plan.swept.values.size()) {
      return fail(SPECLAT_ERR_INVALID_ARGUMENT, "value index out of range");
    }
    auto cfg = speclat::explore::scenario_for(plan->plan, value_index);
    auto outcome = speclat::grid::check_spec(cfg, {vmax, tmax});
    *probability = outcome.probability;
    if (states) *states = outcome.states;
    return SPECLAT_OK;
  });
}

speclat_status speclat_sweep_run(const speclat_plan* plan, speclat_sweep** out) {
  if (!plan) return null_arg("plan");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new speclat_sweep{speclat::explore::run_sweep(plan->plan)};
    return SPECLAT_OK;
  });
}

speclat_status speclat_sweep_write(const speclat_sweep* sweep, const char* out_dir, int with_timestamp) {
  if (!sweep) return null_arg("sweep");
  if (!out_dir) return null_arg("out_dir");
  return guarded([&] {
    speclat::explore::EmitOptions opts;
    opts.timestamp = with_timestamp != 0;
    speclat::explore::emit_outputs(sweep->result, out_dir, opts);
    return SPECLAT_OK;
  });
}

size_t speclat_sweep_checker_calls(const speclat_sweep* sweep) { return sweep ? sweep->result.checker_calls : 0; }

size_t speclat_sweep_audit_violations(const speclat_sweep* sweep) {
  if (!sweep) return 0;
  size_t n = 0;
  for (const auto& a : sweep->result.audits) n += a.violations.size();
  return n;
}

speclat_status speclat_sweep_probability(const speclat_sweep* sweep, size_t value_index, int i, int j,
                                         double* probability) {
  if (!sweep) return null_arg("sweep");
  if (!probability) return null_arg("probability");
  return guarded([&] {
    const auto& grids = sweep->result.grids;
    if (value_index >= grids.size()) return fail(SPECLAT_ERR_INVALID_ARGUMENT, "value index out of range");
    speclat::SpecPoint p{{i, j}};
    if (!grids[value_index].lattice().contains(p) || !grids[value_index].has(p)) {
      return fail(SPECLAT_ERR_INVALID_ARGUMENT, "point " + speclat::to_string(p) + " was not evaluated");
    }
    *probability = grids[value_index].at(p);
    return SPECLAT_OK;
  });
}

void speclat_sweep_free(speclat_sweep* sweep) { delete sweep; }

}  // extern "C"
