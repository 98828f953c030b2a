#pragma once

#include <optional>
#include <span>
#include <vector>

#include "parkmesh/ilp.hpp"
#include "parkmesh/street_graph.hpp"

namespace parkmesh::coverage {

struct CoverageParams {
  // Maximum sensors one FFD may manage (M_ns).
  int max_sensors_per_ffd = 256;
  // When set, fixes the number of deployed FFDs.
  std::optional<int> ffd_budget;
};

// Directed segment ends are indexed 2*s (the end at segment.u, i.e. Γ_{u,v})
// and 2*s+1 (the end at segment.v).
inline int end_index(const RoadSegment& seg, int s, int at_node) {
  return 2 * s + (at_node == seg.u ? 0 : 1);
}

struct GammaAssignment {
  std::vector<double> managed_m;  // Γ per directed end, meters
  double at(const StreetGraph& g, int from, int to) const;
};

struct SensorCounts {
  std::vector<int> k;  // sensors managed per directed end
  int at(const StreetGraph& g, int from, int to) const;
  int node_total(const StreetGraph& g, int node) const;
};

struct Allocation {
  GammaAssignment gamma;
  SensorCounts counts;
  double energy = 0.0;
  std::vector<double> node_load;  // Σ_j Γ_ij ρ_ij per node
};

// Whole sensors on a segment and the fractional remainder of d*ρ.
struct SegmentSensors {
  int whole = 0;
  double remainder = 0.0;
};
SegmentSensors segment_sensors(const RoadSegment& seg);

// floor(Γ·ρ), robust to representation error in the product.
int sensor_count(double gamma_m, double density_per_m);

// Σ ½·k·(k+1) over every directed end.
double total_energy(const SensorCounts& counts);
double end_energy(int k);

// Energy of a parking segment covered from one end only, and from both ends
// with the balanced split.
double single_end_energy(const RoadSegment& seg);
double shared_energy(const RoadSegment& seg);

// Binary model over x_i: x_u + x_v >= 1 per parking segment, plus the
// necessary M_ns cuts Σ_j L_ij (1 - x_j) <= M_ns.  Objective Σ x_i, or the
// constant 0 with Σ x_i = budget when ffd_budget is set.  Throws
// InfeasibleError when a segment carries more than 2·M_ns sensors.
ilp::LinearModel build_cover_model(const StreetGraph& g, const CoverageParams& p);

// Cover model with Σ x_i = budget whose objective is the sensor energy of
// the cover under balanced splits (exact when M_ns does not bind).
ilp::LinearModel build_energy_model(const StreetGraph& g, const CoverageParams& p, int budget);

// Minimum-energy Γ for a fixed FFD set.  Exact: solved as a convex-cost flow
// from segments to the FFD ends that may manage them.
std::optional<Allocation> try_allocate_gamma(const StreetGraph& g, std::span<const int> ffd,
                                             const CoverageParams& p);
// Same, throwing InfeasibleError when no split respects coverage and M_ns.
Allocation allocate_gamma(const StreetGraph& g, std::span<const int> ffd, const CoverageParams& p);

bool is_cover(const StreetGraph& g, std::span<const int> ffd);

struct CoverSolution {
  ilp::SolveStatus status = ilp::SolveStatus::infeasible;
  std::vector<int> ffd;
  std::optional<Allocation> allocation;
  // Model whose assignment certifies the cover (cover rows, cuts, budget).
  ilp::LinearModel model;
  std::optional<ilp::Assignment> assignment;
  std::int64_t nodes = 0;
  int capacity_cuts = 0;
  // False when the chosen cover minimizes the balanced-split energy but the
  // capacity-aware allocation came out higher.
  bool energy_exact = true;
};

// Minimum φx.  Capacity feasibility of each candidate cover is confirmed by
// allocation; infeasible candidates are cut off and the model re-solved.
CoverSolution solve_min_cover(const StreetGraph& g, const CoverageParams& p,
                              const ilp::SolveLimits& limits = {});

// Minimum-energy cover with exactly `budget` FFDs.  Exhaustive for graphs
// of up to kExhaustiveCoverNodes intersections, model-based otherwise.
inline constexpr int kExhaustiveCoverNodes = 12;
CoverSolution best_cover_at_budget(const StreetGraph& g, const CoverageParams& p, int budget,
                                   const ilp::SolveLimits& limits = {});

}  // namespace parkmesh::coverage
