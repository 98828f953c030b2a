#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "parkmesh/coverage.hpp"
#include "parkmesh/errors.hpp"

namespace parkmesh::coverage {

namespace {

using Clock = std::chrono::steady_clock;

std::string x_name(int i) { return "x_" + std::to_string(i); }

void check_params(const StreetGraph& g, const CoverageParams& p) {
  if (p.max_sensors_per_ffd < 1) throw std::invalid_argument("M_ns must be at least 1");
  const double bound = 2.0 * p.max_sensors_per_ffd;
  for (const RoadSegment& seg : g.segments()) {
    if (seg.parking && seg.sensor_load() > bound + 1e-9) {
      throw InfeasibleError("segment " + std::to_string(seg.u) + "-" + std::to_string(seg.v) +
                            " carries " + std::to_string(seg.sensor_load()) +
                            " sensors, more than 2*M_ns = " + std::to_string(static_cast<int>(bound)));
    }
  }
}

// x_i + x_j >= 1 per parking segment and the necessary capacity cuts.
void add_cover_rows(ilp::LinearModel& m, const StreetGraph& g, const CoverageParams& p) {
  const int n = static_cast<int>(g.node_count());
  for (int i = 0; i < n; ++i) m.add_binary(x_name(i));
  for (const RoadSegment& seg : g.segments()) {
    if (!seg.parking) continue;
    m.add_constraint({{seg.u, 1.0}, {seg.v, 1.0}}, ilp::Sense::greater_equal, 1.0, "cover");
  }
  // If i has to manage every incident segment alone, its load is Σ L_ij:
  // Σ_j L_ij (1 - x_j) <= M_ns.
  for (int i = 0; i < n; ++i) {
    double total = 0.0;
    std::vector<ilp::Term> terms;
    for (int s : g.incident(i)) {
      const RoadSegment& seg = g.segment(s);
      if (!seg.parking || seg.sensor_load() <= 0.0) continue;
      total += seg.sensor_load();
      terms.push_back({seg.other(i), -seg.sensor_load()});
    }
    if (total > p.max_sensors_per_ffd + 1e-9) {
      m.add_constraint(std::move(terms), ilp::Sense::less_equal, p.max_sensors_per_ffd - total,
                       "maxsensor-ffd");
    }
  }
}

void add_budget_row(ilp::LinearModel& m, int n, int budget) {
  if (budget < 0 || budget > n) {
    throw std::invalid_argument("FFD budget " + std::to_string(budget) + " outside [0, " +
                                std::to_string(n) + "]");
  }
  std::vector<ilp::Term> terms;
  for (int i = 0; i < n; ++i) terms.push_back({i, 1.0});
  m.add_constraint(std::move(terms), ilp::Sense::equal, budget, "ffd-budget");
}

std::vector<int> ffd_of(const ilp::Assignment& a, int n) {
  std::vector<int> out;
  for (int i = 0; i < n; ++i) {
    if (a[i] > 0.5) out.push_back(i);
  }
  return out;
}

ilp::Assignment assignment_of(std::span<const int> ffd, int n) {
  std::vector<double> values(n, 0.0);
  for (int i : ffd) values[i] = 1.0;
  return ilp::Assignment(std::move(values));
}

// Dropping FFDs from an infeasible cover keeps it infeasible as long as a
// removed node could always absorb the fractional remainders of its shared
// segments.  Then a failed cover X also rules out every subset of X.
bool subset_cuts_valid(const StreetGraph& g, const CoverageParams& p) {
  for (int i = 0; i < static_cast<int>(g.node_count()); ++i) {
    double rem = 0.0;
    for (int s : g.incident(i)) rem += segment_sensors(g.segment(s)).remainder / 2;
    if (rem > p.max_sensors_per_ffd) return false;
  }
  return true;
}

// Repeatedly solves `model`, discarding covers whose Γ allocation fails.
CoverSolution solve_with_capacity_cuts(const StreetGraph& g, const CoverageParams& p,
                                       ilp::LinearModel model, const ilp::SolveLimits& limits) {
  const int n = static_cast<int>(g.node_count());
  const bool subset_cuts = subset_cuts_valid(g, p);
  const auto start = Clock::now();
  CoverSolution out;
  while (true) {
    ilp::SolveLimits left = limits;
    left.max_nodes = std::max<std::int64_t>(1, limits.max_nodes - out.nodes);
    const double spent = std::chrono::duration<double>(Clock::now() - start).count();
    left.max_seconds = std::max(1e-3, limits.max_seconds - spent);
    ilp::SolveReport report = ilp::solve(model, left);
    out.nodes += report.nodes;
    out.status = report.status;
    if (report.status != ilp::SolveStatus::optimal) {
      if (report.incumbent) out.ffd = ffd_of(*report.incumbent, n);
      break;
    }
    std::vector<int> ffd = ffd_of(*report.assignment, n);
    if (auto alloc = try_allocate_gamma(g, ffd, p)) {
      out.ffd = std::move(ffd);
      out.allocation = std::move(alloc);
      out.assignment = std::move(report.assignment);
      break;
    }
    std::vector<ilp::Term> terms;
    double rhs = 1.0;
    std::vector<char> on(n, 0);
    for (int i : ffd) on[i] = 1;
    for (int i = 0; i < n; ++i) {
      if (!on[i]) {
        terms.push_back({i, 1.0});
      } else if (!subset_cuts) {
        terms.push_back({i, -1.0});
        rhs -= 1.0;
      }
    }
    model.add_constraint(std::move(terms), ilp::Sense::greater_equal, rhs, "maxsensor-ffd");
    ++out.capacity_cuts;
  }
  out.model = std::move(model);
  return out;
}

bool lex_less(std::span<const int> a, std::span<const int> b, int n) {
  // Compares the 0/1 vectors of two FFD sets.
  std::vector<char> va(n, 0), vb(n, 0);
  for (int i : a) va[i] = 1;
  for (int i : b) vb[i] = 1;
  return va < vb;
}

}  // namespace

ilp::LinearModel build_cover_model(const StreetGraph& g, const CoverageParams& p) {
  check_params(g, p);
  ilp::LinearModel m;
  m.set_name("ffd_cover");
  add_cover_rows(m, g, p);
  const int n = static_cast<int>(g.node_count());
  if (p.ffd_budget) {
    add_budget_row(m, n, *p.ffd_budget);
    m.set_objective({});
  } else {
    std::vector<ilp::Term> obj;
    for (int i = 0; i < n; ++i) obj.push_back({i, 1.0});
    m.set_objective(std::move(obj));
  }
  return m;
}

ilp::LinearModel build_energy_model(const StreetGraph& g, const CoverageParams& p, int budget) {
  check_params(g, p);
  ilp::LinearModel m;
  m.set_name("ffd_energy");
  add_cover_rows(m, g, p);
  const int n = static_cast<int>(g.node_count());
  add_budget_row(m, n, budget);

  // On a cover, energy = Σ_s shared(s) + Σ_{i not FFD} w_i with
  // w_i = Σ_{s at i} (single(s) - shared(s)).  With Σ x = budget the weights
  // are shifted to be nonnegative.
  std::vector<double> w(n, 0.0);
  double constant = 0.0;
  for (const RoadSegment& seg : g.segments()) {
    if (!seg.parking) continue;
    const double c1 = single_end_energy(seg);
    const double c2 = shared_energy(seg);
    constant += c2;
    w[seg.u] += c1 - c2;
    w[seg.v] += c1 - c2;
  }
  const double w_max = n > 0 ? *std::max_element(w.begin(), w.end()) : 0.0;
  std::vector<ilp::Term> obj;
  for (int i = 0; i < n; ++i) {
    constant += w[i];
    obj.push_back({i, w_max - w[i]});
  }
  constant -= w_max * budget;
  m.set_objective(std::move(obj), constant);
  return m;
}

CoverSolution solve_min_cover(const StreetGraph& g, const CoverageParams& p,
                              const ilp::SolveLimits& limits) {
  return solve_with_capacity_cuts(g, p, build_cover_model(g, p), limits);
}

CoverSolution best_cover_at_budget(const StreetGraph& g, const CoverageParams& p, int budget,
                                   const ilp::SolveLimits& limits) {
  const int n = static_cast<int>(g.node_count());
  if (n > kExhaustiveCoverNodes) {
    ilp::LinearModel model = build_energy_model(g, p, budget);
    CoverSolution out = solve_with_capacity_cuts(g, p, std::move(model), limits);
    if (out.allocation) {
      const double predicted = ilp::objective_value(out.model, *out.assignment);
      out.energy_exact = std::abs(predicted - out.allocation->energy) < 1e-6;
    }
    return out;
  }

  CoverageParams fixed = p;
  fixed.ffd_budget = budget;
  CoverSolution out;
  out.model = build_cover_model(g, fixed);
  // Visit every size-`budget` subset; keep the lowest energy, then the
  // lexicographically smallest 0/1 vector.
  std::vector<char> pick(n, 0);
  std::fill(pick.end() - budget, pick.end(), 1);
  do {
    std::vector<int> ffd;
    for (int i = 0; i < n; ++i) {
      if (pick[i]) ffd.push_back(i);
    }
    ++out.nodes;
    if (!is_cover(g, ffd)) continue;
    auto alloc = try_allocate_gamma(g, ffd, p);
    if (!alloc) continue;
    const bool better = !out.allocation || alloc->energy < out.allocation->energy - 1e-9 ||
                        (alloc->energy < out.allocation->energy + 1e-9 && lex_less(ffd, out.ffd, n));
    if (better) {
      out.ffd = std::move(ffd);
      out.allocation = std::move(alloc);
    }
  } while (std::next_permutation(pick.begin(), pick.end()));
  if (out.allocation) {
    out.status = ilp::SolveStatus::optimal;
    out.assignment = assignment_of(out.ffd, n);
  }
  return out;
}

}  // namespace parkmesh::coverage
