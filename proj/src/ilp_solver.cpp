#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "parkmesh/ilp.hpp"

namespace parkmesh::ilp {

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kFeasTol = 1e-6;
constexpr double kRoundTol = 1e-9;

struct Row {
  std::vector<Term> terms;
  Sense sense = Sense::less_equal;
  double rhs = 0.0;
  bool active = false;
};

// Rows of the form sum(x_j) >= 1 over binaries with nonnegative objective
// weights; disjoint open rows each force one more unit of cost.
struct CoveringRow {
  int row = 0;
};

// Rows of the form sum(x_j) = t over binaries.
struct CardinalityRow {
  int row = 0;
  int target = 0;
};

class Search {
 public:
  Search(const LinearModel& m, const SolveLimits& limits);
  SolveReport run();

 private:
  enum class Phase { improve, lexmin };
  enum class Limit { none, nodes, time };

  struct Change {
    int var;
    double lo;
    double hi;
  };

  bool node(Phase phase, int var, double lo, double hi, std::size_t parent_activated);
  bool explore(Phase phase, std::size_t parent_activated);
  bool propagate();
  bool propagate_row(int r);
  bool set_lower(int v, double value);
  bool set_upper(int v, double value);
  void enqueue_watchers(int v);
  void enqueue(int r);
  void undo(std::size_t mark);
  void clear_queue();
  double bound() const;
  double packing_bound(double base) const;
  double cardinality_bound(const CardinalityRow& card, double base) const;
  void fill_tentative(Phase phase);
  double violation(const Row& row) const;
  bool activate_violated_lazy();
  void activate(int r);
  void set_cutoff(double cutoff);
  bool limit_reached();

  const LinearModel& model_;
  SolveLimits limits_;
  Clock::time_point start_;
  int n_ = 0;
  std::vector<double> lo_, hi_, root_lo_, root_hi_;
  std::vector<double> obj_;
  double obj_const_ = 0.0;
  bool integral_objective_ = true;
  std::vector<Row> rows_;
  int obj_row_ = -1;
  std::vector<std::vector<int>> watch_;
  std::vector<int> lazy_pending_;
  std::vector<int> activated_;  // lazy rows in activation order
  std::vector<CoveringRow> covering_;
  std::vector<CardinalityRow> cardinality_;
  std::vector<Change> trail_;
  std::vector<int> queue_;
  std::vector<char> queued_;
  std::vector<double> tentative_;
  mutable std::vector<char> used_;
  double cutoff_ = kInfinity;
  std::optional<std::vector<double>> best_;
  double best_obj_ = kInfinity;
  std::int64_t nodes_ = 0;
  Limit limit_ = Limit::none;
};

Search::Search(const LinearModel& m, const SolveLimits& limits)
    : model_(m), limits_(limits), start_(Clock::now()), n_(m.variable_count()) {
  lo_.resize(n_);
  hi_.resize(n_);
  obj_.assign(n_, 0.0);
  for (int v = 0; v < n_; ++v) {
    const Variable& var = m.variable(v);
    if (var.kind == VarKind::continuous) {
      throw std::invalid_argument("solve: continuous variable '" + var.name +
                                  "' must be eliminated before branch-and-bound");
    }
    if (!std::isfinite(var.lower) || !std::isfinite(var.upper)) {
      throw std::invalid_argument("solve: integer variable '" + var.name + "' is unbounded");
    }
    lo_[v] = std::ceil(var.lower - kRoundTol);
    hi_[v] = std::floor(var.upper + kRoundTol);
  }
  for (const Term& t : m.objective().terms) {
    obj_[t.var] = t.coef;
    if (std::abs(t.coef - std::round(t.coef)) > kRoundTol) integral_objective_ = false;
  }
  obj_const_ = m.objective().constant;

  watch_.assign(n_, {});
  for (int r = 0; r < m.constraint_count(); ++r) {
    const Constraint& c = m.constraints()[r];
    rows_.push_back({c.terms, c.sense, c.rhs, false});
    if (c.lazy) {
      lazy_pending_.push_back(r);
    } else {
      rows_.back().active = true;
      for (const Term& t : c.terms) watch_[t.var].push_back(r);
    }
  }
  obj_row_ = static_cast<int>(rows_.size());
  rows_.push_back({m.objective().terms, Sense::less_equal, 0.0, false});
  for (const Term& t : m.objective().terms) watch_[t.var].push_back(obj_row_);

  auto unit_binary = [&](const Constraint& c) {
    return std::all_of(c.terms.begin(), c.terms.end(), [&](const Term& t) {
      return t.coef == 1.0 && m.variable(t.var).kind == VarKind::binary;
    });
  };
  for (int r = 0; r < m.constraint_count(); ++r) {
    const Constraint& c = m.constraints()[r];
    if (c.terms.empty() || !unit_binary(c)) continue;
    if (c.sense == Sense::greater_equal && c.rhs == 1.0 &&
        std::all_of(c.terms.begin(), c.terms.end(), [&](const Term& t) { return obj_[t.var] >= 0.0; })) {
      covering_.push_back({r});
    } else if (c.sense == Sense::equal && c.rhs == std::round(c.rhs)) {
      cardinality_.push_back({r, static_cast<int>(c.rhs)});
    }
  }
  std::stable_sort(covering_.begin(), covering_.end(), [&](CoveringRow a, CoveringRow b) {
    return rows_[a.row].terms.size() < rows_[b.row].terms.size();
  });
  queued_.assign(rows_.size(), 0);
  used_.assign(n_, 0);
  tentative_.assign(n_, 0.0);
}

bool Search::limit_reached() {
  if (limit_ != Limit::none) return true;
  if (nodes_ >= limits_.max_nodes) {
    limit_ = Limit::nodes;
    return true;
  }
  if ((nodes_ & 63) == 0) {
    const double secs = std::chrono::duration<double>(Clock::now() - start_).count();
    if (secs >= limits_.max_seconds) {
      limit_ = Limit::time;
      return true;
    }
  }
  return false;
}

void Search::enqueue(int r) {
  if (!rows_[r].active || queued_[r]) return;
  queued_[r] = 1;
  queue_.push_back(r);
}

void Search::enqueue_watchers(int v) {
  for (int r : watch_[v]) enqueue(r);
}

bool Search::set_lower(int v, double value) {
  value = std::ceil(value - kRoundTol);
  if (value <= lo_[v]) return true;
  if (value > hi_[v]) return false;
  trail_.push_back({v, lo_[v], hi_[v]});
  lo_[v] = value;
  enqueue_watchers(v);
  return true;
}

bool Search::set_upper(int v, double value) {
  value = std::floor(value + kRoundTol);
  if (value >= hi_[v]) return true;
  if (value < lo_[v]) return false;
  trail_.push_back({v, lo_[v], hi_[v]});
  hi_[v] = value;
  enqueue_watchers(v);
  return true;
}

void Search::clear_queue() {
  for (int r : queue_) queued_[r] = 0;
  queue_.clear();
}

void Search::undo(std::size_t mark) {
  while (trail_.size() > mark) {
    const Change& c = trail_.back();
    lo_[c.var] = c.lo;
    hi_[c.var] = c.hi;
    trail_.pop_back();
  }
}

bool Search::propagate_row(int r) {
  const Row& row = rows_[r];
  double min_act = 0.0, max_act = 0.0;
  for (const Term& t : row.terms) {
    if (t.coef > 0) {
      min_act += t.coef * lo_[t.var];
      max_act += t.coef * hi_[t.var];
    } else {
      min_act += t.coef * hi_[t.var];
      max_act += t.coef * lo_[t.var];
    }
  }
  if (row.sense != Sense::greater_equal) {
    if (min_act > row.rhs + kFeasTol) return false;
    const double slack = row.rhs - min_act;
    for (const Term& t : row.terms) {
      if (t.coef > 0) {
        if (!set_upper(t.var, lo_[t.var] + slack / t.coef)) return false;
      } else {
        if (!set_lower(t.var, hi_[t.var] + slack / t.coef)) return false;
      }
    }
  }
  if (row.sense != Sense::less_equal) {
    if (max_act < row.rhs - kFeasTol) return false;
    const double slack = row.rhs - max_act;
    for (const Term& t : row.terms) {
      if (t.coef > 0) {
        if (!set_lower(t.var, hi_[t.var] + slack / t.coef)) return false;
      } else {
        if (!set_upper(t.var, lo_[t.var] + slack / t.coef)) return false;
      }
    }
  }
  return true;
}

bool Search::propagate() {
  bool ok = true;
  std::size_t head = 0;
  while (head < queue_.size()) {
    const int r = queue_[head++];
    queued_[r] = 0;
    if (ok && !propagate_row(r)) ok = false;
    if (!ok) break;
  }
  queue_.erase(queue_.begin(), queue_.begin() + static_cast<std::ptrdiff_t>(head));
  clear_queue();
  return ok;
}

double Search::packing_bound(double base) const {
  double extra = 0.0;
  std::vector<int> touched;
  for (const CoveringRow& cov : covering_) {
    const Row& row = rows_[cov.row];
    if (!row.active) continue;
    bool satisfied = false, clash = false;
    double cheapest = kInfinity;
    for (const Term& t : row.terms) {
      if (lo_[t.var] >= 1.0) {
        satisfied = true;
        break;
      }
      if (hi_[t.var] < 1.0) continue;
      if (used_[t.var]) clash = true;
      cheapest = std::min(cheapest, obj_[t.var]);
    }
    if (satisfied || clash || cheapest == kInfinity) continue;
    extra += cheapest;
    for (const Term& t : row.terms) {
      if (hi_[t.var] >= 1.0) {
        used_[t.var] = 1;
        touched.push_back(t.var);
      }
    }
  }
  for (int v : touched) used_[v] = 0;
  return base + extra;
}

double Search::cardinality_bound(const CardinalityRow& card, double base) const {
  const Row& row = rows_[card.row];
  int ones = 0;
  std::vector<double> free_costs;
  double adjusted = base;
  for (const Term& t : row.terms) {
    if (lo_[t.var] >= 1.0) {
      ++ones;
    } else if (hi_[t.var] >= 1.0) {
      free_costs.push_back(obj_[t.var]);
      adjusted -= std::min(0.0, obj_[t.var]);
    }
  }
  const int need = card.target - ones;
  if (need < 0 || need > static_cast<int>(free_costs.size())) return kInfinity;
  std::partial_sort(free_costs.begin(), free_costs.begin() + need, free_costs.end());
  for (int i = 0; i < need; ++i) adjusted += free_costs[i];
  return adjusted;
}

double Search::bound() const {
  double base = obj_const_;
  for (const Term& t : model_.objective().terms) {
    base += t.coef > 0 ? t.coef * lo_[t.var] : t.coef * hi_[t.var];
  }
  double best = base;
  if (!covering_.empty()) best = std::max(best, packing_bound(base));
  for (const CardinalityRow& card : cardinality_) {
    if (rows_[card.row].active) best = std::max(best, cardinality_bound(card, base));
  }
  return best;
}

void Search::fill_tentative(Phase phase) {
  for (int v = 0; v < n_; ++v) {
    if (phase == Phase::improve && obj_[v] < 0.0) {
      tentative_[v] = hi_[v];
    } else {
      tentative_[v] = lo_[v];
    }
  }
}

// Positive amount means the tentative point violates the row; the sign of
// the returned value tells the direction (negative: activity too high).
double Search::violation(const Row& row) const {
  double act = 0.0;
  for (const Term& t : row.terms) act += t.coef * tentative_[t.var];
  if (row.sense != Sense::less_equal && act < row.rhs - kFeasTol) return row.rhs - act;
  if (row.sense != Sense::greater_equal && act > row.rhs + kFeasTol) return -(act - row.rhs);
  return 0.0;
}

void Search::activate(int r) {
  rows_[r].active = true;
  for (const Term& t : rows_[r].terms) watch_[t.var].push_back(r);
  activated_.push_back(r);
  enqueue(r);
}

bool Search::activate_violated_lazy() {
  bool any = false;
  for (auto it = lazy_pending_.begin(); it != lazy_pending_.end();) {
    if (violation(rows_[*it]) != 0.0) {
      activate(*it);
      it = lazy_pending_.erase(it);
      any = true;
    } else {
      ++it;
    }
  }
  return any;
}

void Search::set_cutoff(double cutoff) {
  cutoff_ = cutoff;
  rows_[obj_row_].rhs = cutoff - obj_const_;
  if (!rows_[obj_row_].active) {
    rows_[obj_row_].active = true;
  }
}

bool Search::node(Phase phase, int var, double lo, double hi, std::size_t parent_activated) {
  if (limit_reached()) return false;
  ++nodes_;
  const std::size_t mark = trail_.size();
  bool ok = set_lower(var, lo) && set_upper(var, hi);
  bool keep_going = true;
  if (ok) keep_going = explore(phase, parent_activated);
  clear_queue();
  undo(mark);
  return keep_going;
}

// Returns false when the whole search must stop (limit reached, or the
// lexicographic phase found its answer).
bool Search::explore(Phase phase, std::size_t parent_activated) {
  for (std::size_t i = parent_activated; i < activated_.size(); ++i) enqueue(activated_[i]);
  enqueue(obj_row_);
  for (;;) {
    if (!propagate()) return true;
    if (bound() > cutoff_ + (phase == Phase::lexmin ? kFeasTol : 0.0)) return true;
    fill_tentative(phase);

    int worst_row = -1;
    double worst = 0.0;
    for (int r = 0; r < static_cast<int>(rows_.size()); ++r) {
      if (!rows_[r].active) continue;
      const double viol = violation(rows_[r]);
      if (std::abs(viol) > std::abs(worst)) {
        worst = viol;
        worst_row = r;
      }
    }
    if (worst_row < 0) {
      if (activate_violated_lazy()) continue;
      double value = obj_const_;
      for (int v = 0; v < n_; ++v) value += obj_[v] * tentative_[v];
      if (phase == Phase::lexmin) {
        best_ = tentative_;
        best_obj_ = value;
        return false;
      }
      if (value < best_obj_) {
        best_ = tentative_;
        best_obj_ = value;
        set_cutoff(integral_objective_ ? value - 0.5 : value - 1e-6 * std::max(1.0, std::abs(value)));
      }
      return true;
    }

    const std::size_t snapshot = activated_.size();
    if (phase == Phase::lexmin) {
      int var = -1;
      for (int v = 0; v < n_; ++v) {
        if (lo_[v] < hi_[v]) {
          var = v;
          break;
        }
      }
      if (var < 0) return true;
      const double lo = lo_[var], hi = hi_[var];
      if (!node(phase, var, lo, lo, snapshot)) return false;
      return node(phase, var, lo + 1, hi, snapshot);
    }

    // Repair the most violated row with its smallest-index movable variable.
    const bool raise = worst > 0.0;
    int var = -1;
    bool move_up = false;
    for (const Term& t : rows_[worst_row].terms) {
      const double cur = tentative_[t.var];
      const bool up = (t.coef > 0) == raise;
      if (up ? cur < hi_[t.var] : cur > lo_[t.var]) {
        var = t.var;
        move_up = up;
        break;
      }
    }
    if (var < 0) return true;
    const double cur = tentative_[var];
    const double lo = lo_[var], hi = hi_[var];
    if (move_up) {
      if (!node(phase, var, cur + 1, hi, snapshot)) return false;
      return node(phase, var, lo, cur, snapshot);
    }
    if (!node(phase, var, lo, cur - 1, snapshot)) return false;
    return node(phase, var, cur, hi, snapshot);
  }
}

SolveReport Search::run() {
  SolveReport report;
  auto finish = [&] {
    report.nodes = nodes_;
    report.seconds = std::chrono::duration<double>(Clock::now() - start_).count();
    report.lazy_rows_activated = static_cast<int>(activated_.size());
    return report;
  };

  bool root_ok = true;
  for (int v = 0; v < n_; ++v) {
    if (lo_[v] > hi_[v]) root_ok = false;
  }
  for (int r = 0; r < obj_row_ && root_ok; ++r) enqueue(r);
  if (root_ok) root_ok = propagate();
  if (!root_ok) {
    report.status = SolveStatus::infeasible;
    return finish();
  }
  root_lo_ = lo_;
  root_hi_ = hi_;
  const std::size_t root_mark = trail_.size();

  // Phase 1: find and prove the optimal objective value.
  if (n_ == 0) {
    fill_tentative(Phase::improve);
    bool feasible = true;
    for (int r = 0; r < obj_row_; ++r) {
      if (violation(rows_[r]) != 0.0) feasible = false;
    }
    if (feasible) {
      best_ = tentative_;
      best_obj_ = obj_const_;
    }
  } else {
    ++nodes_;
    explore(Phase::improve, activated_.size());
    clear_queue();
    undo(root_mark);
  }

  if (limit_ != Limit::none) {
    report.status = limit_ == Limit::nodes ? SolveStatus::node_limit : SolveStatus::time_limit;
    if (best_) {
      report.incumbent = Assignment(*best_);
      report.objective = best_obj_;
    }
    return finish();
  }
  if (!best_) {
    report.status = SolveStatus::infeasible;
    return finish();
  }

  // Phase 2: smallest assignment in index order among optimal solutions.
  const std::vector<double> phase1 = *best_;
  const double optimum = best_obj_;
  if (n_ > 0) {
    set_cutoff(integral_objective_ ? optimum + 0.5 : optimum + 1e-6 * std::max(1.0, std::abs(optimum)));
    best_.reset();
    ++nodes_;
    explore(Phase::lexmin, 0);
    clear_queue();
    undo(root_mark);
  }
  report.status = SolveStatus::optimal;
  if (best_) {
    report.assignment = Assignment(*best_);
    report.objective = best_obj_;
  } else {
    report.assignment = Assignment(phase1);
    report.objective = optimum;
    report.tie_break_certified = false;
  }
  return finish();
}

}  // namespace

SolveReport solve(const LinearModel& m, const SolveLimits& limits) {
  if (!(limits.max_nodes > 0) || !(limits.max_seconds > 0.0)) {
    throw std::invalid_argument("solve: limits must be positive");
  }
  Search search(m, limits);
  return search.run();
}

}  // namespace parkmesh::ilp
