#include "speclat/checker.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "parallel.hpp"
#include "speclat/error.hpp"

namespace speclat {

namespace {

enum : char { kNeither = 0, kPhi = 1, kPsi = 2 };

// kPsi if psi holds, kPhi if only phi holds, kNeither otherwise.
std::vector<char> classify(const Mdp& mdp, const BoundedUntilQuery& q) {
  if (q.horizon < 0) {
    throw Error(ErrorCode::InvalidArgument, "negative horizon " + std::to_string(q.horizon));
  }
  auto phi = label_states(mdp, q.phi);
  auto psi = label_states(mdp, q.psi);
  std::vector<char> cls(mdp.num_states());
  for (std::size_t s = 0; s < cls.size(); ++s) cls[s] = psi[s] ? kPsi : (phi[s] ? kPhi : kNeither);
  return cls;
}

BoundedUntilResult induction(const Mdp& mdp, const BoundedUntilQuery& q, const CheckerOptions& opts,
                             bool want_policy) {
  const auto cls = classify(mdp, q);
  const std::size_t n = mdp.num_states();
  const int horizon = q.horizon;

  std::vector<double> prev(n), cur(n);
  for (std::size_t s = 0; s < n; ++s) prev[s] = cls[s] == kPsi ? 1.0 : 0.0;

  PolicyTable policy = want_policy ? PolicyTable(horizon, n) : PolicyTable();

  // prev holds x^{k-1}; step k leaves x^k in cur. The policy row for
  // "horizon - k steps elapsed" is the argmax of step k.
  for (int k = 1; k <= horizon; ++k) {
    const int row = horizon - k;
    detail::parallel_chunks(n, opts.threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t s = begin; s < end; ++s) {
        if (cls[s] != kPhi) {
          cur[s] = prev[s];
          continue;
        }
        const auto sid = static_cast<StateId>(s);
        const std::size_t first = mdp.first_action(sid);
        const std::size_t last = mdp.first_action(sid + 1);
        double best = -1.0;
        std::size_t best_a = 0;
        for (std::size_t a = first; a < last; ++a) {
          double v = 0.0;
          for (const auto& t : mdp.transitions(a)) v += t.prob * prev[t.target];
          if (v > best) {
            best = v;
            best_a = a - first;
          }
        }
        cur[s] = std::clamp(best, 0.0, 1.0);
        if (want_policy) policy.set(row, sid, static_cast<std::uint16_t>(best_a));
      }
    });
    std::swap(prev, cur);
  }
  return {ValueVector{std::move(prev), horizon}, std::move(policy)};
}

}  // namespace

ValueVector pmax_bounded_until(const Mdp& mdp, const BoundedUntilQuery& q, const CheckerOptions& opts) {
  return induction(mdp, q, opts, false).values;
}

PolicyTable extract_policy(const Mdp& mdp, const BoundedUntilQuery& q, const CheckerOptions& opts) {
  return induction(mdp, q, opts, true).policy;
}

BoundedUntilResult solve_bounded_until(const Mdp& mdp, const BoundedUntilQuery& q,
                                       const CheckerOptions& opts) {
  return induction(mdp, q, opts, true);
}

double filter_apply(const ValueVector& values, const FilterSpec& filter, const Mdp& mdp) {
  if (values.size() != mdp.num_states()) {
    throw Error(ErrorCode::InvalidArgument, "value vector does not match the model");
  }
  const auto selected = label_states(mdp, filter.condition);
  double acc = filter.mode == FilterMode::Min ? std::numeric_limits<double>::infinity() : 0.0;
  std::size_t count = 0;
  for (std::size_t s = 0; s < selected.size(); ++s) {
    if (!selected[s]) continue;
    ++count;
    if (filter.mode == FilterMode::Min) acc = std::min(acc, values.values[s]);
    else acc += values.values[s];
  }
  if (count == 0) {
    throw Error(ErrorCode::Filter,
                "filter condition selects no state: " + filter.condition.to_string());
  }
  return filter.mode == FilterMode::Min ? acc : acc / static_cast<double>(count);
}

}  // namespace speclat
