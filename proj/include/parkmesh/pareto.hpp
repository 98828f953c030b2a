#pragma once

#include <memory>
#include <span>
#include <vector>

#include "parkmesh/plan.hpp"

namespace parkmesh::pareto {

struct ParetoPoint {
  std::vector<double> objectives;
  std::shared_ptr<const plan::DeploymentPlan> plan;
};

// a is no worse everywhere and strictly better somewhere.  Throws
// std::invalid_argument on an arity mismatch.
bool dominates(const ParetoPoint& a, const ParetoPoint& b);

struct Front {
  std::vector<ParetoPoint> points;  // sorted by first objective, then lexicographically
};

// Keeps exactly the non-dominated points; of identical tuples the first one
// in input order survives.
Front dominance_filter(std::vector<ParetoPoint> points);

struct SweepStatus {
  ilp::SolveStatus status = ilp::SolveStatus::optimal;
  // False when some point's energy came from the model objective and the
  // capacity-aware allocation disagreed.
  bool energy_exact = true;
};

struct EnergyFront {
  Front front;  // (φx, φΩ)
  SweepStatus status;
  int min_cover = 0;
};

// For every FFD budget from the minimum cover size to |N|, the minimum
// sensor energy over covers of that size.
EnergyFront front_energy_vs_ffd(const StreetGraph& g, const plan::PlanParams& params,
                                const ilp::SolveLimits& limits = {});

struct HopFront {
  int level = 0;
  std::vector<int> ffd;  // minimum-energy cover at this level
  int components = 0;    // W-components of the cover, the least feasible gateway count
  Front front;           // (φy, avg hop)
  SweepStatus status;
};

// Worst, mediocre and best FFD levels: the minimum cover size, 80% of the
// intersections (rounded up) and every intersection.  Duplicates removed.
std::vector<int> default_levels(int min_cover, int node_count);

// For each level, the minimum-energy cover at that size, then the minimum
// average hop count for every gateway budget from its W-component count up
// to the level.
std::vector<HopFront> front_hop_vs_gateways(const StreetGraph& g, const WirelessLinkSet& w,
                                            std::span<const int> levels, const plan::PlanParams& params,
                                            const ilp::SolveLimits& limits = {});

}  // namespace parkmesh::pareto
