#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "parkmesh/backbone.hpp"
#include "parkmesh/coverage.hpp"
#include "parkmesh/ilp.hpp"
#include "parkmesh/street_graph.hpp"

namespace parkmesh::plan {

inline constexpr const char* kPlanFormat = "parkmesh-plan/1";

struct PlanParams {
  int max_sensors_per_ffd = 256;
  int max_hops = 10;
  double router_capacity = 100.0;
  double gateway_capacity = 1000.0;
  double per_sensor_rate = 0.01;
  double radio_range_m = 150.0;
  LinkMode link_mode = LinkMode::euclidean;

  coverage::CoverageParams coverage() const;
  backbone::BackboneParams backbone() const;
};

// Γ_ij and k_ij for one directed segment end.
struct GammaEntry {
  int from = 0;
  int to = 0;
  double managed_m = 0.0;
  int sensors = 0;
};

struct Objectives {
  int phi_x = 0;
  double phi_omega = 0.0;
  int phi_y = 0;
  double phi_hx = 0.0;  // Σ h / φx
  int sum_h = 0;
};

struct DeploymentPlan {
  PlanParams params;
  std::string status = "optimal";
  std::vector<int> ffd;
  std::vector<GammaEntry> gamma;
  // False for coverage-only plans (energy front points); the relation
  // families are then not checked.
  bool has_backbone = true;
  std::vector<int> gateways;
  std::map<int, int> parents;
  std::map<int, std::vector<int>> ancestors;
  std::map<int, int> gateway_of;
  std::map<int, int> hops;
  std::map<int, double> traffic;  // f_i, packets/s
  Objectives objectives;
  std::map<std::string, std::string> metadata;
};

DeploymentPlan make_plan(const StreetGraph& g, const PlanParams& params, std::span<const int> ffd,
                         const coverage::Allocation& alloc,
                         const std::optional<backbone::BackboneTopology>& topology);

std::string serialize_plan(const DeploymentPlan& p);
// Throws ParseError on malformed documents.
DeploymentPlan parse_plan(std::string_view text);
DeploymentPlan load_plan(const std::string& path);

struct PlanViolation {
  std::string tag;
  std::string message;
  std::vector<std::string> variables;  // model variables in the violated row
};

// The plan as assignments to two models: coverage (x over every
// intersection, Γ per parking segment end) and relations (x, y, b, a, g, h
// over every node the plan mentions, all ordered pairs).  The reported φx,
// φy and Σh are rows of these models.
struct PlanModels {
  ilp::LinearModel coverage;
  ilp::Assignment coverage_values;
  std::optional<backbone::BackboneModel> relations;
  std::optional<ilp::Assignment> relation_values;
};

// Throws ParseError when the plan references unknown intersections or segments.
PlanModels plan_models(const StreetGraph& g, const DeploymentPlan& p);

// Every violated row of both models, with the variables of each row.
std::vector<PlanViolation> check_models(const PlanModels& models);

// check_models plus the derived quantities (k_ij, energy, φh/x, f_i), each
// tagged by constraint family.
std::vector<PlanViolation> validate_plan(const StreetGraph& g, const DeploymentPlan& p);

}  // namespace parkmesh::plan
