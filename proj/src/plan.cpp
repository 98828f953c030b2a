#include "parkmesh/plan.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "parkmesh/errors.hpp"

namespace parkmesh::plan {

namespace {

using nlohmann::json;

json pairs_json(const std::map<int, int>& m) {
  json out = json::array();
  for (const auto& [k, v] : m) out.push_back({k, v});
  return out;
}

std::map<int, int> pairs_from(const json& j, const char* what) {
  std::map<int, int> out;
  for (const json& pair : j) {
    if (!pair.is_array() || pair.size() != 2) {
      throw ParseError(std::string("plan: '") + what + "' entries must be [id, id] pairs");
    }
    const int key = pair[0].get<int>();
    if (!out.emplace(key, pair[1].get<int>()).second) {
      throw ParseError(std::string("plan: duplicate entry for ") + std::to_string(key) + " in '" + what + "'");
    }
  }
  return out;
}

const json& field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(std::string("plan: missing required field '") + key + "'");
  return *it;
}

}  // namespace

coverage::CoverageParams PlanParams::coverage() const {
  coverage::CoverageParams p;
  p.max_sensors_per_ffd = max_sensors_per_ffd;
  return p;
}

backbone::BackboneParams PlanParams::backbone() const {
  backbone::BackboneParams p;
  p.max_hops = max_hops;
  p.router_capacity = router_capacity;
  p.gateway_capacity = gateway_capacity;
  p.per_sensor_rate = per_sensor_rate;
  return p;
}

DeploymentPlan make_plan(const StreetGraph& g, const PlanParams& params, std::span<const int> ffd,
                         const coverage::Allocation& alloc,
                         const std::optional<backbone::BackboneTopology>& topology) {
  DeploymentPlan p;
  p.params = params;
  p.ffd.assign(ffd.begin(), ffd.end());
  std::sort(p.ffd.begin(), p.ffd.end());
  for (int s = 0; s < static_cast<int>(g.segment_count()); ++s) {
    const RoadSegment& seg = g.segment(s);
    if (!seg.parking) continue;
    p.gamma.push_back({seg.u, seg.v, alloc.gamma.managed_m[2 * s], alloc.counts.k[2 * s]});
    p.gamma.push_back({seg.v, seg.u, alloc.gamma.managed_m[2 * s + 1], alloc.counts.k[2 * s + 1]});
  }
  for (int i : p.ffd) p.traffic[i] = params.per_sensor_rate * alloc.counts.node_total(g, i);
  p.objectives.phi_x = static_cast<int>(p.ffd.size());
  p.objectives.phi_omega = alloc.energy;
  p.has_backbone = topology.has_value();
  if (topology) {
    p.gateways = topology->gateways;
    p.parents = topology->parents;
    p.ancestors = topology->ancestors;
    p.gateway_of = topology->gateway_of;
    p.hops = topology->hop;
    p.objectives.phi_y = static_cast<int>(p.gateways.size());
    p.objectives.sum_h = backbone::total_hops(*topology);
    p.objectives.phi_hx = p.ffd.empty() ? 0.0 : static_cast<double>(p.objectives.sum_h) / p.ffd.size();
  }
  return p;
}

std::string serialize_plan(const DeploymentPlan& p) {
  json doc;
  doc["format"] = kPlanFormat;
  doc["status"] = p.status;
  doc["params"] = {{"M_ns", p.params.max_sensors_per_ffd},
                   {"M_hop", p.params.max_hops},
                   {"M_rt", p.params.router_capacity},
                   {"M_gw", p.params.gateway_capacity},
                   {"per_sensor_rate", p.params.per_sensor_rate},
                   {"radio_range_m", p.params.radio_range_m},
                   {"link_mode", std::string(to_string(p.params.link_mode))}};
  doc["ffd"] = p.ffd;
  json gamma = json::array();
  for (const GammaEntry& e : p.gamma) {
    gamma.push_back({{"from", e.from}, {"to", e.to}, {"managed_m", e.managed_m}, {"sensors", e.sensors}});
  }
  doc["gamma"] = std::move(gamma);
  doc["has_backbone"] = p.has_backbone;
  if (p.has_backbone) {
    doc["gateways"] = p.gateways;
    doc["parents"] = pairs_json(p.parents);
    json anc = json::array();
    for (const auto& [i, list] : p.ancestors) {
      for (int j : list) anc.push_back({i, j});
    }
    doc["ancestors"] = std::move(anc);
    doc["gateway_of"] = pairs_json(p.gateway_of);
    doc["hops"] = pairs_json(p.hops);
  }
  json traffic = json::array();
  for (const auto& [i, f] : p.traffic) traffic.push_back({i, f});
  doc["traffic"] = std::move(traffic);
  doc["objectives"] = {{"phi_x", p.objectives.phi_x},
                       {"phi_omega", p.objectives.phi_omega},
                       {"phi_y", p.objectives.phi_y},
                       {"phi_hx", p.objectives.phi_hx},
                       {"sum_h", p.objectives.sum_h}};
  doc["metadata"] = p.metadata;
  return doc.dump(2) + "\n";
}

DeploymentPlan parse_plan(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("plan: ") + e.what());
  }
  DeploymentPlan p;
  try {
    if (!doc.is_object()) throw ParseError("plan: document must be an object");
    if (field(doc, "format").get<std::string>() != kPlanFormat) {
      throw ParseError("plan: unsupported format tag");
    }
    p.status = field(doc, "status").get<std::string>();
    const json& params = field(doc, "params");
    p.params.max_sensors_per_ffd = field(params, "M_ns").get<int>();
    p.params.max_hops = field(params, "M_hop").get<int>();
    p.params.router_capacity = field(params, "M_rt").get<double>();
    p.params.gateway_capacity = field(params, "M_gw").get<double>();
    p.params.per_sensor_rate = field(params, "per_sensor_rate").get<double>();
    p.params.radio_range_m = field(params, "radio_range_m").get<double>();
    p.params.link_mode = parse_link_mode(field(params, "link_mode").get<std::string>());
    p.ffd = field(doc, "ffd").get<std::vector<int>>();
    for (const json& e : field(doc, "gamma")) {
      p.gamma.push_back({field(e, "from").get<int>(), field(e, "to").get<int>(),
                         field(e, "managed_m").get<double>(), field(e, "sensors").get<int>()});
    }
    p.has_backbone = field(doc, "has_backbone").get<bool>();
    if (p.has_backbone) {
      p.gateways = field(doc, "gateways").get<std::vector<int>>();
      p.parents = pairs_from(field(doc, "parents"), "parents");
      for (const json& pair : field(doc, "ancestors")) {
        if (!pair.is_array() || pair.size() != 2) throw ParseError("plan: 'ancestors' entries must be pairs");
        p.ancestors[pair[0].get<int>()].push_back(pair[1].get<int>());
      }
      for (auto& [i, list] : p.ancestors) std::sort(list.begin(), list.end());
      p.gateway_of = pairs_from(field(doc, "gateway_of"), "gateway_of");
      p.hops = pairs_from(field(doc, "hops"), "hops");
    }
    for (const json& pair : field(doc, "traffic")) {
      if (!pair.is_array() || pair.size() != 2) throw ParseError("plan: 'traffic' entries must be pairs");
      p.traffic[pair[0].get<int>()] = pair[1].get<double>();
    }
    const json& obj = field(doc, "objectives");
    p.objectives.phi_x = field(obj, "phi_x").get<int>();
    p.objectives.phi_omega = field(obj, "phi_omega").get<double>();
    p.objectives.phi_y = field(obj, "phi_y").get<int>();
    p.objectives.phi_hx = field(obj, "phi_hx").get<double>();
    p.objectives.sum_h = field(obj, "sum_h").get<int>();
    if (auto it = doc.find("metadata"); it != doc.end()) {
      p.metadata = it->get<std::map<std::string, std::string>>();
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("plan: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("plan: ") + e.what());
  }
  return p;
}

DeploymentPlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open plan file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_plan(text.str());
}

}  // namespace parkmesh::plan
