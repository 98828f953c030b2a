#include "mutation.hpp"

#include <algorithm>
#include <stdexcept>

namespace oracle {

using namespace parkmesh;

namespace {

const std::vector<std::string>& families_of(const std::string& kind) {
  static const std::map<std::string, std::vector<std::string>> table = {
      {"b",
       {"eq:parent-node-bii", "eq:parent-node-bij", "eq:sum-bij", "eq:parent-node-bij-sum", "eq:multihop-bna"}},
      {"a",
       {"eq:ancestor-node-aii", "eq:ancestor-node-aij-xi-xj", "eq:ancestor-node-aij", "eq:multihop-bna",
        "ancestor-inherit", "eq:multihop-ang", "eq:gateway-node-gij-aij", "eq:hop_count", "eq:trafficload"}},
      {"g",
       {"eq:gateway-node-gii", "eq:gateway-node-gij-yj", "eq:gateway-node-gij", "eq:gateway-node-gij-aij",
        "eq:gateway-node-gij-sum", "eq:multihop-ang"}},
      {"x",
       {"eq:phi_x", "eq:xi-gammaij-dmax", "eq:gwFromFFD", "eq:ancestor-node-aii", "eq:ancestor-node-aij-xi-xj",
        "eq:parent-node-bij-sum", "eq:gateway-node-gij-sum"}},
      {"y",
       {"eq:gwFromFFD", "eq:gateway-node-gii", "eq:gateway-node-gij-yj", "eq:parent-node-bij-sum", "eq:phi_y",
        "eq:trafficload"}},
      {"gamma", {"eq:sumofgamma", "eq:gamma-dij", "eq:xi-gammaij-dmax", "eq:maxsensor-ffd"}},
      {"h", {"eq:hop_count", "eq:hop_max", "eq:average_delay"}},
  };
  return table.at(kind);
}

template <class T>
T pick(const std::vector<T>& v, std::mt19937& rng) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

void flip(ilp::Assignment& a, int var) { a.set(var, a[var] > 0.5 ? 0.0 : 1.0); }

}  // namespace

Mutation mutate(plan::PlanModels& models, std::mt19937& rng) {
  const ilp::LinearModel& cm = models.coverage;
  std::vector<int> xs, gammas;
  for (int v = 0; v < cm.variable_count(); ++v) {
    (cm.variable(v).name[0] == 'x' ? xs : gammas).push_back(v);
  }
  std::vector<std::string> kinds{"x"};
  if (!gammas.empty()) kinds.push_back("gamma");
  if (models.relations) kinds.insert(kinds.end(), {"b", "a", "g", "y", "h"});

  Mutation m;
  m.kind = pick(kinds, rng);
  m.families = families_of(m.kind);
  if (m.kind == "x") {
    const int v = pick(xs, rng);
    flip(models.coverage_values, v);
    m.variable = cm.variable(v).name;
    if (models.relations) {
      if (auto rv = models.relations->model.find(m.variable)) flip(*models.relation_values, *rv);
    }
    return m;
  }
  if (m.kind == "gamma") {
    const int v = pick(gammas, rng);
    const double delta = std::uniform_real_distribution<double>(0.5, 50.0)(rng);
    const double old = models.coverage_values[v];
    // Stay non-negative where possible so that only the length row can catch it.
    models.coverage_values.set(v, old >= delta && rng() % 2 ? old - delta : old + delta);
    m.variable = cm.variable(v).name;
    return m;
  }
  const backbone::BackboneModel& bm = *models.relations;
  const std::vector<int>& pool = m.kind == "b" ? bm.b : m.kind == "a" ? bm.a : m.kind == "g" ? bm.g
                                 : m.kind == "y"                       ? bm.y
                                                                       : bm.h;
  std::vector<int> vars;
  std::copy_if(pool.begin(), pool.end(), std::back_inserter(vars), [](int v) { return v >= 0; });
  if (vars.empty()) throw std::logic_error("mutate: no variables of kind " + m.kind);
  const int v = pick(vars, rng);
  if (m.kind == "h") {
    models.relation_values->set(v, (*models.relation_values)[v] + 1);
  } else {
    flip(*models.relation_values, v);
  }
  m.variable = bm.model.variable(v).name;
  return m;
}

bool caught(const std::vector<plan::PlanViolation>& violations, const Mutation& m) {
  for (const plan::PlanViolation& v : violations) {
    if (std::find(m.families.begin(), m.families.end(), v.tag) == m.families.end()) continue;
    if (std::find(v.variables.begin(), v.variables.end(), m.variable) != v.variables.end()) return true;
  }
  return false;
}

plan::DeploymentPlan solved_plan(const StreetGraph& g, const plan::PlanParams& params) {
  const coverage::CoverSolution cover = coverage::solve_min_cover(g, params.coverage());
  if (cover.status != ilp::SolveStatus::optimal) throw std::runtime_error("solved_plan: no cover");
  const WirelessLinkSet w = derive_wireless_links(g, params.radio_range_m, params.link_mode);
  const backbone::TrafficVector f = backbone::packet_rates(g, cover.allocation->counts, params.per_sensor_rate);
  const backbone::BackboneResult bb =
      backbone::solve_backbone(w, cover.ffd, f, params.backbone(), backbone::BackboneObjective::min_gateways);
  if (bb.status != ilp::SolveStatus::optimal) throw std::runtime_error("solved_plan: no backbone");
  return plan::make_plan(g, params, cover.ffd, *cover.allocation, bb.topology);
}

}  // namespace oracle
