#pragma once

// Single-relation mutations of a plan's model assignments, and the families
// a validator must report for each kind.

#include <random>
#include <string>
#include <vector>

#include "parkmesh/plan.hpp"

namespace oracle {

struct Mutation {
  std::string kind;      // b, a, g, x, y, gamma or h
  std::string variable;  // model variable that was changed
  std::vector<std::string> families;
};

// Changes exactly one relation in `models` (x in both models when present).
Mutation mutate(parkmesh::plan::PlanModels& models, std::mt19937& rng);

// True when some violation names the mutated variable under one of its families.
bool caught(const std::vector<parkmesh::plan::PlanViolation>& violations, const Mutation& m);

// Minimum cover, minimum-gateway backbone over the default W-graph.
parkmesh::plan::DeploymentPlan solved_plan(const parkmesh::StreetGraph& g, const parkmesh::plan::PlanParams& params);

}  // namespace oracle
