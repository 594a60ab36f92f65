#include "speclat/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace speclat {

AttributeChain AttributeChain::from_bounds(std::string name, const std::string& label_prefix,
                                           const std::vector<int>& bounds) {
  AttributeChain c{std::move(name), {}};
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    c.levels.push_back({label_prefix + std::to_string(i + 1), bounds[i]});
  }
  c.validate();
  return c;
}

void AttributeChain::validate() const {
  if (name.empty()) throw Error(ErrorCode::InvalidArgument, "attribute chain without a name");
  if (levels.empty()) throw Error(ErrorCode::InvalidArgument, "attribute chain '" + name + "' has no levels");
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (levels[i].bound <= levels[i - 1].bound) {
      throw Error(ErrorCode::InvalidArgument,
                  "attribute chain '" + name + "': bounds must strictly increase (level " +
                      std::to_string(i + 1) + " has bound " + std::to_string(levels[i].bound) +
                      " after " + std::to_string(levels[i - 1].bound) + ")");
    }
  }
}

std::string to_string(const SpecPoint& p) {
  std::string out = "(";
  for (std::size_t i = 0; i < p.index.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(p.index[i]);
  }
  return out + ")";
}

// ---------------------------------------------------------------------------

SpecLattice::SpecLattice(std::vector<AttributeChain> chains) : chains_(std::move(chains)) {
  if (chains_.empty()) throw Error(ErrorCode::InvalidArgument, "lattice needs at least one chain");
  size_ = 1;
  for (const auto& c : chains_) {
    c.validate();
    size_ *= c.size();
  }
}

SpecPoint SpecLattice::top() const { return SpecPoint{std::vector<int>(chains_.size(), 1)}; }

SpecPoint SpecLattice::bottom() const {
  SpecPoint p;
  for (const auto& c : chains_) p.index.push_back(static_cast<int>(c.size()));
  return p;
}

bool SpecLattice::contains(const SpecPoint& p) const {
  if (p.index.size() != chains_.size()) return false;
  for (std::size_t i = 0; i < chains_.size(); ++i) {
    if (p.index[i] < 1 || p.index[i] > static_cast<int>(chains_[i].size())) return false;
  }
  return true;
}

std::size_t SpecLattice::rank(const SpecPoint& p) const {
  if (!contains(p)) throw Error(ErrorCode::InvalidArgument, "point " + to_string(p) + " not in lattice");
  std::size_t r = 0;
  for (std::size_t i = 0; i < chains_.size(); ++i) {
    r = r * chains_[i].size() + static_cast<std::size_t>(p.index[i] - 1);
  }
  return r;
}

SpecPoint SpecLattice::point(std::size_t rank) const {
  SpecPoint p{std::vector<int>(chains_.size())};
  for (std::size_t i = chains_.size(); i-- > 0;) {
    p.index[i] = static_cast<int>(rank % chains_[i].size()) + 1;
    rank /= chains_[i].size();
  }
  return p;
}

std::vector<SpecPoint> SpecLattice::points() const {
  std::vector<SpecPoint> out;
  out.reserve(size_);
  for (std::size_t r = 0; r < size_; ++r) out.push_back(point(r));
  return out;
}

std::string SpecLattice::label(const SpecPoint& p) const {
  std::string out;
  for (std::size_t i = 0; i < chains_.size() && i < p.index.size(); ++i) {
    if (i) out += " & ";
    out += chains_[i].levels.at(static_cast<std::size_t>(p.index[i] - 1)).label;
  }
  return out;
}

bool weakening_leq(const SpecPoint& a, const SpecPoint& b) {
  if (a.index.size() != b.index.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "dimension mismatch comparing " + to_string(a) + " and " + to_string(b));
  }
  for (std::size_t i = 0; i < a.index.size(); ++i) {
    if (a.index[i] < b.index[i]) return false;
  }
  return true;
}

std::vector<SpecPoint> covers(const SpecLattice& lattice, const SpecPoint& a) {
  if (!lattice.contains(a)) throw Error(ErrorCode::InvalidArgument, "point " + to_string(a) + " not in lattice");
  std::vector<SpecPoint> out;
  for (std::size_t i = 0; i < lattice.dimension(); ++i) {
    if (a.index[i] < static_cast<int>(lattice.chains()[i].size())) {
      SpecPoint b = a;
      ++b.index[i];
      out.push_back(std::move(b));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------

EvaluationGrid::EvaluationGrid(SpecLattice lattice, std::string scenario)
    : lattice_(std::move(lattice)), scenario_(std::move(scenario)),
      values_(lattice_.size(), 0.0), present_(lattice_.size(), 0) {}

void EvaluationGrid::set(const SpecPoint& p, double probability) {
  if (!(probability >= 0.0 && probability <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "probability out of [0,1] at " + to_string(p));
  }
  std::size_t r = lattice_.rank(p);
  values_[r] = probability;
  present_[r] = 1;
}

bool EvaluationGrid::has(const SpecPoint& p) const { return present_[lattice_.rank(p)] != 0; }

double EvaluationGrid::at(const SpecPoint& p) const {
  std::size_t r = lattice_.rank(p);
  if (!present_[r]) throw Error(ErrorCode::InvalidArgument, "no value recorded at " + to_string(p));
  return values_[r];
}

bool EvaluationGrid::complete() const {
  return std::all_of(present_.begin(), present_.end(), [](char c) { return c != 0; });
}

std::size_t EvaluationGrid::count() const {
  return static_cast<std::size_t>(std::count(present_.begin(), present_.end(), char{1}));
}

namespace {

// Maximal (strongest) elements of a set of points, lexicographic.
std::vector<SpecPoint> strongest(const std::vector<SpecPoint>& members) {
  std::vector<SpecPoint> out;
  for (const auto& p : members) {
    bool dominated = std::any_of(members.begin(), members.end(), [&](const SpecPoint& q) {
      return q != p && weakening_leq(p, q);
    });
    if (!dominated) out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Frontier frontier(const EvaluationGrid& grid, double rho) {
  if (!grid.complete()) {
    throw Error(ErrorCode::InvalidArgument, "frontier needs a complete grid (scenario " + grid.scenario() + ")");
  }
  std::vector<SpecPoint> sat;
  for (const auto& p : grid.lattice().points()) {
    if (grid.at(p) >= rho) sat.push_back(p);
  }
  return Frontier{strongest(sat), rho};
}

// ---------------------------------------------------------------------------

namespace {

std::string witness_message(const SpecPoint& weaker, double wv, const SpecPoint& stronger, double sv) {
  std::ostringstream os;
  os.precision(17);
  os << "monotonicity violated: weaker point " << to_string(weaker) << " = " << wv
     << " is below stronger point " << to_string(stronger) << " = " << sv;
  return os.str();
}

}  // namespace

MonotonicityError::MonotonicityError(SpecPoint weaker, double weaker_value, SpecPoint stronger,
                                     double stronger_value)
    : Error(ErrorCode::Monotonicity, witness_message(weaker, weaker_value, stronger, stronger_value)),
      weaker_(std::move(weaker)), stronger_(std::move(stronger)),
      weaker_value_(weaker_value), stronger_value_(stronger_value) {}

namespace {

class StaircaseSearch {
 public:
  StaircaseSearch(const SpecLattice& lattice, const SpecEvaluator& evaluator, double rho)
      : lattice_(lattice), evaluator_(evaluator), rho_(rho) {}

  AdaptiveResult run() {
    explore(lattice_.top().index, lattice_.bottom().index);
    std::vector<SpecPoint> sat;
    for (const auto& p : lattice_.points()) {
      if (classify(p) > 0) sat.push_back(p);
    }
    AdaptiveResult r;
    r.frontier = Frontier{strongest(sat), rho_};
    r.evaluations = evaluated_.size();
    r.evaluated = evaluated_;
    return r;
  }

 private:
  using Box = std::vector<int>;

  // +1 satisfied, -1 unsatisfied, 0 not implied by any evaluation yet.
  int classify(const SpecPoint& p) const {
    for (const auto& [q, v] : evaluated_) {
      if (v >= rho_ && weakening_leq(p, q)) return 1;
      if (v < rho_ && weakening_leq(q, p)) return -1;
    }
    return 0;
  }

  bool evaluate(const SpecPoint& p) {
    const double v = evaluator_(p);
    for (const auto& [q, w] : evaluated_) {
      if (weakening_leq(p, q) && v < w - kMonotonicityTolerance) throw MonotonicityError(p, v, q, w);
      if (weakening_leq(q, p) && w < v - kMonotonicityTolerance) throw MonotonicityError(q, w, p, v);
    }
    evaluated_.emplace_back(p, v);
    return v >= rho_;
  }

  void explore(const Box& lo, const Box& hi) {
    const std::size_t n = lo.size();
    for (std::size_t d = 0; d < n; ++d) {
      if (lo[d] > hi[d]) return;
    }
    if (classify(SpecPoint{lo}) > 0 || classify(SpecPoint{hi}) < 0) return;

    SpecPoint mid{Box(n)};
    for (std::size_t d = 0; d < n; ++d) mid.index[d] = lo[d] + (hi[d] - lo[d]) / 2;
    int c = classify(mid);
    const bool sat = c != 0 ? c > 0 : evaluate(mid);

    // Split the box minus the classified orthant of mid into disjoint boxes.
    for (std::size_t d = 0; d < n; ++d) {
      Box sub_lo = lo, sub_hi = hi;
      for (std::size_t j = 0; j < d; ++j) {
        if (sat) sub_lo[j] = mid.index[j];
        else sub_hi[j] = mid.index[j];
      }
      if (sat) sub_hi[d] = mid.index[d] - 1;
      else sub_lo[d] = mid.index[d] + 1;
      explore(sub_lo, sub_hi);
    }
  }

  const SpecLattice& lattice_;
  const SpecEvaluator& evaluator_;
  double rho_;
  std::vector<std::pair<SpecPoint, double>> evaluated_;
};

}  // namespace

AdaptiveResult adaptive_explore(const SpecLattice& lattice, const SpecEvaluator& evaluator, double rho) {
  if (lattice.dimension() == 0) throw Error(ErrorCode::InvalidArgument, "empty lattice");
  return StaircaseSearch(lattice, evaluator, rho).run();
}

}  // namespace speclat
