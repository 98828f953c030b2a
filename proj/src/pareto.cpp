#include "parkmesh/pareto.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "parkmesh/errors.hpp"

namespace parkmesh::pareto {

namespace {

using Clock = std::chrono::steady_clock;

// Splits one overall limit across a sequence of solves.
class Budget {
 public:
  explicit Budget(const ilp::SolveLimits& limits) : limits_(limits), start_(Clock::now()) {}
  ilp::SolveLimits remaining() const {
    ilp::SolveLimits left = limits_;
    left.max_nodes = std::max<std::int64_t>(1, limits_.max_nodes - nodes_);
    const double spent = std::chrono::duration<double>(Clock::now() - start_).count();
    left.max_seconds = std::max(1e-3, limits_.max_seconds - spent);
    return left;
  }
  void spend(std::int64_t nodes) { nodes_ += nodes; }

 private:
  ilp::SolveLimits limits_;
  Clock::time_point start_;
  std::int64_t nodes_ = 0;
};

bool is_limit(ilp::SolveStatus s) {
  return s == ilp::SolveStatus::node_limit || s == ilp::SolveStatus::time_limit;
}

}  // namespace

bool dominates(const ParetoPoint& a, const ParetoPoint& b) {
  if (a.objectives.size() != b.objectives.size()) {
    throw std::invalid_argument("dominates: objective tuples differ in arity");
  }
  bool strict = false;
  for (std::size_t i = 0; i < a.objectives.size(); ++i) {
    if (a.objectives[i] > b.objectives[i]) return false;
    if (a.objectives[i] < b.objectives[i]) strict = true;
  }
  return strict;
}

Front dominance_filter(std::vector<ParetoPoint> points) {
  for (const ParetoPoint& p : points) {
    if (p.objectives.size() != points.front().objectives.size()) {
      throw std::invalid_argument("dominance_filter: objective tuples differ in arity");
    }
  }
  std::stable_sort(points.begin(), points.end(),
                   [](const ParetoPoint& a, const ParetoPoint& b) { return a.objectives < b.objectives; });
  std::vector<char> keep(points.size(), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i > 0 && points[i].objectives == points[i - 1].objectives) continue;
    bool dominated = false;
    for (std::size_t j = 0; j < points.size() && !dominated; ++j) {
      dominated = j != i && dominates(points[j], points[i]);
    }
    keep[i] = !dominated;
  }
  Front out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (keep[i]) out.points.push_back(std::move(points[i]));
  }
  return out;
}

EnergyFront front_energy_vs_ffd(const StreetGraph& g, const plan::PlanParams& params,
                                const ilp::SolveLimits& limits) {
  Budget budget(limits);
  EnergyFront out;
  const coverage::CoverageParams cp = params.coverage();
  coverage::CoverSolution min = coverage::solve_min_cover(g, cp, budget.remaining());
  budget.spend(min.nodes);
  out.status.status = min.status;
  if (min.status != ilp::SolveStatus::optimal) return out;
  out.min_cover = static_cast<int>(min.ffd.size());

  std::vector<ParetoPoint> points;
  const int n = static_cast<int>(g.node_count());
  for (int t = out.min_cover; t <= n; ++t) {
    coverage::CoverSolution sol = coverage::best_cover_at_budget(g, cp, t, budget.remaining());
    budget.spend(sol.nodes);
    if (is_limit(sol.status)) {
      out.status.status = sol.status;
      break;
    }
    if (sol.status != ilp::SolveStatus::optimal) continue;
    out.status.energy_exact = out.status.energy_exact && sol.energy_exact;
    auto plan = std::make_shared<plan::DeploymentPlan>(
        plan::make_plan(g, params, sol.ffd, *sol.allocation, std::nullopt));
    plan->metadata["energy_exact"] = sol.energy_exact ? "true" : "false";
    plan->metadata["cover_search"] = n <= coverage::kExhaustiveCoverNodes ? "exhaustive" : "model";
    points.push_back({{static_cast<double>(t), sol.allocation->energy}, std::move(plan)});
  }
  out.front = dominance_filter(std::move(points));
  return out;
}

std::vector<int> default_levels(int min_cover, int node_count) {
  const int mediocre = std::max(min_cover, static_cast<int>(std::ceil(0.8 * node_count - 1e-9)));
  std::vector<int> levels{min_cover, mediocre, node_count};
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  return levels;
}

std::vector<HopFront> front_hop_vs_gateways(const StreetGraph& g, const WirelessLinkSet& w,
                                            std::span<const int> levels, const plan::PlanParams& params,
                                            const ilp::SolveLimits& limits) {
  Budget budget(limits);
  const int n = static_cast<int>(g.node_count());
  const coverage::CoverageParams cp = params.coverage();
  std::vector<HopFront> out;
  for (int level : levels) {
    if (level < 1 || level > n) {
      throw std::invalid_argument("FFD level " + std::to_string(level) + " outside [1, " + std::to_string(n) + "]");
    }
    HopFront hf;
    hf.level = level;
    coverage::CoverSolution cover = coverage::best_cover_at_budget(g, cp, level, budget.remaining());
    budget.spend(cover.nodes);
    hf.status.status = cover.status;
    if (cover.status != ilp::SolveStatus::optimal) {
      out.push_back(std::move(hf));
      if (is_limit(cover.status)) break;
      continue;
    }
    hf.status.energy_exact = cover.energy_exact;
    hf.ffd = cover.ffd;
    hf.components = static_cast<int>(connected_components(w, hf.ffd).size());
    const backbone::TrafficVector f = backbone::packet_rates(g, cover.allocation->counts, params.per_sensor_rate);

    std::vector<ParetoPoint> points;
    bool any = false;
    for (int k = hf.components; k <= level; ++k) {
      backbone::BackboneParams bp = params.backbone();
      bp.gw_budget = k;
      backbone::BackboneResult r = backbone::solve_backbone(
          w, hf.ffd, f, bp, backbone::BackboneObjective::fixed_gw_min_hops, budget.remaining());
      budget.spend(r.nodes);
      if (is_limit(r.status)) {
        hf.status.status = r.status;
        break;
      }
      if (r.status != ilp::SolveStatus::optimal) continue;
      any = true;
      auto plan = std::make_shared<plan::DeploymentPlan>(
          plan::make_plan(g, params, hf.ffd, *cover.allocation, r.topology));
      plan->metadata["energy_exact"] = cover.energy_exact ? "true" : "false";
      plan->metadata["backbone_search"] =
          r.method_used == backbone::BackboneMethod::combinatorial ? "combinatorial" : "generic";
      points.push_back({{static_cast<double>(k), backbone::avg_hop(*r.topology)}, std::move(plan)});
    }
    if (!any && hf.status.status == ilp::SolveStatus::optimal) hf.status.status = ilp::SolveStatus::infeasible;
    hf.front = dominance_filter(std::move(points));
    const bool stop = is_limit(hf.status.status);
    out.push_back(std::move(hf));
    if (stop) break;
  }
  return out;
}

}  // namespace parkmesh::pareto
