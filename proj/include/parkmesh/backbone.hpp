#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "parkmesh/coverage.hpp"
#include "parkmesh/ilp.hpp"
#include "parkmesh/street_graph.hpp"

namespace parkmesh::backbone {

struct BackboneParams {
  int max_hops = 10;                 // M_hop
  double router_capacity = 100.0;    // M_rt, packets/s
  double gateway_capacity = 1000.0;  // M_gw, packets/s
  double per_sensor_rate = 0.01;     // packets/s per sensor
  std::optional<int> gw_budget;      // fixes φy
};

// Throws std::invalid_argument unless M_gw >= M_rt > 0 and M_hop >= 1.
void validate_params(const BackboneParams& p);

enum class BackboneObjective {
  min_gateways,       // fewest gateways, then fewest total hops
  min_total_hops,     // Σ h, with Σ y = gw_budget when a budget is set
  fixed_gw_min_hops,  // Σ h with Σ y = gw_budget (budget required)
  min_links,          // Σ b; constant for a fixed gateway count
};
std::string_view to_string(BackboneObjective o);
BackboneObjective parse_objective(std::string_view text);

// Packets/s aggregated at each intersection; zero where no FFD is installed.
struct TrafficVector {
  std::vector<double> f;
};

// f_i = per_sensor_rate * Σ_j k_ij.
TrafficVector packet_rates(const StreetGraph& g, const coverage::SensorCounts& k, double per_sensor_rate);

struct BackboneTopology {
  std::vector<int> ffd;                        // ascending
  std::vector<int> gateways;                   // ascending
  std::map<int, int> parents;                  // router -> parent
  std::map<int, std::vector<int>> ancestors;   // node -> ancestors incl. itself, ascending
  std::map<int, int> gateway_of;
  std::map<int, int> hop;                      // h_i = |ancestors(i)|
  std::vector<std::vector<int>> clusters;      // one block per gateway, in gateway order
};

// Σ h_i / |FFD|.  Throws std::invalid_argument on an empty topology.
double avg_hop(const BackboneTopology& t);
int total_hops(const BackboneTopology& t);

// Variable handles of the relation model.  Node ids are global
// intersection ids; -1 marks a variable the model does not contain.
struct BackboneModel {
  ilp::LinearModel model;
  std::vector<int> nodes;  // ascending ids covered by the model
  std::vector<int> x, y, h;
  std::vector<int> b, a, g;  // row-major over nodes.size()^2, (child, parent) order

  int local(int id) const;  // position in `nodes`, or -1
  int var_b(int i, int j) const { return pair_var(b, i, j); }
  int var_a(int i, int j) const { return pair_var(a, i, j); }
  int var_g(int i, int j) const { return pair_var(g, i, j); }
  int var_x(int i) const { return single_var(x, i); }
  int var_y(int i) const { return single_var(y, i); }
  int var_h(int i) const { return single_var(h, i); }

 private:
  int pair_var(const std::vector<int>& vars, int i, int j) const;
  int single_var(const std::vector<int>& vars, int i) const;
};

struct RelationModelOptions {
  // Fix x_i = 1 on every model node (solve) or leave x free (validation).
  bool fix_x = true;
  // Create b_ij for every ordered pair, including b_ii, instead of W pairs only.
  bool all_pairs = false;
  // Mark the O(n^3) transitivity rows lazy.
  bool lazy_triples = true;
};

// Relation rows over `nodes`: parent (b), ancestor (a), gateway (g),
// hop count and capacity, tagged by constraint family.  No objective.
BackboneModel build_relation_model(const WirelessLinkSet& w, std::span<const int> nodes,
                                   const TrafficVector& f, const BackboneParams& p,
                                   const RelationModelOptions& opt);

// Relation model over the FFD set plus the objective.  Throws
// InfeasibleError when gw_budget is below the number of W-components of the
// FFD set, and std::invalid_argument when the budget is missing for
// fixed_gw_min_hops or exceeds the FFD count.
BackboneModel build_backbone_model(const WirelessLinkSet& w, std::span<const int> ffd,
                                   const TrafficVector& f, const BackboneParams& p,
                                   BackboneObjective objective);

// Raised when an assignment does not decode to a valid forest.
class TopologyError : public std::runtime_error {
 public:
  TopologyError(std::string tag, const std::string& what)
      : std::runtime_error(what), tag_(std::move(tag)) {}
  const std::string& tag() const { return tag_; }

 private:
  std::string tag_;
};

// Decodes the relations of an assignment.  Every row of the model is checked
// first; the decoded parents must form a forest whose closure matches a, g
// and h exactly.  Throws TopologyError tagged with the first violated row's
// family; the message lists every violated family.
BackboneTopology extract_topology(const BackboneModel& m, const ilp::Assignment& a);

// Inverse of extract_topology for a model built over the same FFD set.
ilp::Assignment encode_topology(const BackboneModel& m, const BackboneTopology& t);

enum class BackboneMethod {
  automatic,      // combinatorial search, generic solver where it cannot decide
  generic,        // branch-and-bound on the relation model
  combinatorial,  // gateway-set search with shortest-path forests
};

struct BackboneResult {
  ilp::SolveStatus status = ilp::SolveStatus::infeasible;
  std::optional<BackboneTopology> topology;
  BackboneModel model;
  std::optional<ilp::Assignment> assignment;
  double objective = ilp::kInfinity;
  std::int64_t nodes = 0;
  double seconds = 0.0;
  BackboneMethod method_used = BackboneMethod::generic;
};

// Exact optimum of `objective`.  Among optimal backbones the one whose
// (y, b) vector is lexicographically smallest is returned, for either method.
BackboneResult solve_backbone(const WirelessLinkSet& w, std::span<const int> ffd,
                              const TrafficVector& f, const BackboneParams& p,
                              BackboneObjective objective, const ilp::SolveLimits& limits = {},
                              BackboneMethod method = BackboneMethod::automatic);

}  // namespace parkmesh::backbone
