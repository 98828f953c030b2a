#include <algorithm>
#include <cmath>
#include <set>

#include "parkmesh/backbone.hpp"
#include "parkmesh/errors.hpp"

namespace parkmesh::backbone {

namespace {

std::string id_name(char prefix, int i) { return std::string(1, prefix) + "_" + std::to_string(i); }
std::string pair_name(char prefix, int i, int j) {
  return std::string(1, prefix) + "_" + std::to_string(i) + "_" + std::to_string(j);
}

std::vector<int> sorted_unique(std::span<const int> ids) {
  std::vector<int> out(ids.begin(), ids.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

void validate_params(const BackboneParams& p) {
  if (p.max_hops < 1) throw std::invalid_argument("M_hop must be at least 1");
  if (!(p.router_capacity > 0.0)) throw std::invalid_argument("M_rt must be positive");
  if (!(p.gateway_capacity >= p.router_capacity)) throw std::invalid_argument("M_gw must be at least M_rt");
  if (!(p.per_sensor_rate >= 0.0)) throw std::invalid_argument("per-sensor rate must be nonnegative");
  if (p.gw_budget && *p.gw_budget < 1) throw std::invalid_argument("gateway budget must be at least 1");
}

std::string_view to_string(BackboneObjective o) {
  switch (o) {
    case BackboneObjective::min_gateways: return "min_gateways";
    case BackboneObjective::min_total_hops: return "min_total_hops";
    case BackboneObjective::fixed_gw_min_hops: return "fixed_gw_min_hops";
    case BackboneObjective::min_links: return "min_links";
  }
  return "?";
}

BackboneObjective parse_objective(std::string_view text) {
  for (auto o : {BackboneObjective::min_gateways, BackboneObjective::min_total_hops,
                 BackboneObjective::fixed_gw_min_hops, BackboneObjective::min_links}) {
    if (text == to_string(o)) return o;
  }
  throw std::invalid_argument("unknown backbone objective '" + std::string(text) + "'");
}

TrafficVector packet_rates(const StreetGraph& g, const coverage::SensorCounts& k, double per_sensor_rate) {
  if (per_sensor_rate < 0.0) throw std::invalid_argument("per-sensor rate must be nonnegative");
  TrafficVector out;
  out.f.assign(g.node_count(), 0.0);
  for (int i = 0; i < static_cast<int>(g.node_count()); ++i) {
    out.f[i] = per_sensor_rate * k.node_total(g, i);
  }
  return out;
}

int total_hops(const BackboneTopology& t) {
  int sum = 0;
  for (const auto& [id, h] : t.hop) sum += h;
  return sum;
}

double avg_hop(const BackboneTopology& t) {
  if (t.ffd.empty()) throw std::invalid_argument("avg_hop: empty FFD set");
  return static_cast<double>(total_hops(t)) / static_cast<double>(t.ffd.size());
}

int BackboneModel::local(int id) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), id);
  if (it == nodes.end() || *it != id) return -1;
  return static_cast<int>(it - nodes.begin());
}

int BackboneModel::pair_var(const std::vector<int>& vars, int i, int j) const {
  const int li = local(i), lj = local(j);
  if (li < 0 || lj < 0) return -1;
  return vars[static_cast<std::size_t>(li) * nodes.size() + static_cast<std::size_t>(lj)];
}

int BackboneModel::single_var(const std::vector<int>& vars, int i) const {
  const int li = local(i);
  return li < 0 ? -1 : vars[li];
}

BackboneModel build_relation_model(const WirelessLinkSet& w, std::span<const int> nodes,
                                   const TrafficVector& f, const BackboneParams& p,
                                   const RelationModelOptions& opt) {
  validate_params(p);
  using ilp::Sense;
  BackboneModel bm;
  bm.nodes = sorted_unique(nodes);
  const int m = static_cast<int>(bm.nodes.size());
  for (int id : bm.nodes) {
    if (id < 0 || static_cast<std::size_t>(id) >= w.node_count()) {
      throw std::out_of_range("backbone: node id " + std::to_string(id) + " out of range");
    }
  }
  auto rate = [&](int id) {
    return static_cast<std::size_t>(id) < f.f.size() ? f.f[id] : 0.0;
  };
  auto at = [m](int li, int lj) { return static_cast<std::size_t>(li) * m + lj; };
  const std::vector<int>& ids = bm.nodes;
  ilp::LinearModel& lm = bm.model;
  lm.set_name("backbone");

  bm.x.resize(m);
  bm.y.resize(m);
  bm.h.resize(m);
  bm.b.assign(static_cast<std::size_t>(m) * m, -1);
  bm.a.assign(static_cast<std::size_t>(m) * m, -1);
  bm.g.assign(static_cast<std::size_t>(m) * m, -1);
  for (int i = 0; i < m; ++i) {
    bm.x[i] = lm.add_binary(id_name('x', ids[i]));
    if (opt.fix_x) lm.fix(bm.x[i], 1.0);
  }
  for (int i = 0; i < m; ++i) bm.y[i] = lm.add_binary(id_name('y', ids[i]));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const bool wanted = opt.all_pairs || (i != j && w.linked(ids[i], ids[j]));
      if (wanted) bm.b[at(i, j)] = lm.add_binary(pair_name('b', ids[i], ids[j]));
    }
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) bm.a[at(i, j)] = lm.add_binary(pair_name('a', ids[i], ids[j]));
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) bm.g[at(i, j)] = lm.add_binary(pair_name('g', ids[i], ids[j]));
  }
  for (int i = 0; i < m; ++i) bm.h[i] = lm.add_integer(id_name('h', ids[i]), 0, m);

  for (int i = 0; i < m; ++i) {
    lm.add_constraint({{bm.y[i], 1}, {bm.x[i], -1}}, Sense::less_equal, 0, "eq:gwFromFFD");
  }
  for (int i = 0; i < m; ++i) {
    if (bm.b[at(i, i)] >= 0) lm.add_constraint({{bm.b[at(i, i)], 1}}, Sense::equal, 0, "eq:parent-node-bii");
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j || bm.b[at(i, j)] < 0) continue;
      lm.add_constraint({{bm.b[at(i, j)], 1}, {bm.a[at(i, j)], -1}}, Sense::less_equal, 0,
                        "eq:parent-node-bij");
    }
  }
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      std::vector<ilp::Term> terms;
      if (bm.b[at(i, j)] >= 0) terms.push_back({bm.b[at(i, j)], 1});
      if (bm.b[at(j, i)] >= 0) terms.push_back({bm.b[at(j, i)], 1});
      if (terms.empty()) continue;
      lm.add_constraint(std::move(terms), Sense::less_equal, w.linked(ids[i], ids[j]) ? 1 : 0, "eq:sum-bij");
    }
  }
  for (int i = 0; i < m; ++i) {
    std::vector<ilp::Term> terms;
    for (int j = 0; j < m; ++j) {
      if (bm.b[at(i, j)] >= 0) terms.push_back({bm.b[at(i, j)], 1});
    }
    terms.push_back({bm.x[i], -1});
    terms.push_back({bm.y[i], 1});
    lm.add_constraint(std::move(terms), Sense::equal, 0, "eq:parent-node-bij-sum");
  }
  for (int i = 0; i < m; ++i) {
    lm.add_constraint({{bm.a[at(i, i)], 1}, {bm.x[i], -1}}, Sense::equal, 0, "eq:ancestor-node-aii");
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      lm.add_constraint({{bm.a[at(i, j)], 1}, {bm.x[i], -1}}, Sense::less_equal, 0,
                        "eq:ancestor-node-aij-xi-xj");
      lm.add_constraint({{bm.a[at(i, j)], 1}, {bm.x[j], -1}}, Sense::less_equal, 0,
                        "eq:ancestor-node-aij-xi-xj");
    }
  }
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      lm.add_constraint({{bm.a[at(i, j)], 1}, {bm.a[at(j, i)], 1}}, Sense::less_equal, 1,
                        "eq:ancestor-node-aij");
    }
  }
  for (int i = 0; i < m; ++i) {
    lm.add_constraint({{bm.g[at(i, i)], 1}, {bm.y[i], -1}}, Sense::equal, 0, "eq:gateway-node-gii");
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      lm.add_constraint({{bm.g[at(i, j)], 1}, {bm.y[j], -1}}, Sense::less_equal, 0,
                        "eq:gateway-node-gij-yj");
    }
  }
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      lm.add_constraint({{bm.g[at(i, j)], 1}, {bm.g[at(j, i)], 1}}, Sense::less_equal, 1,
                        "eq:gateway-node-gij");
    }
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      lm.add_constraint({{bm.g[at(i, j)], 1}, {bm.a[at(i, j)], -1}}, Sense::less_equal, 0,
                        "eq:gateway-node-gij-aij");
    }
  }
  for (int i = 0; i < m; ++i) {
    std::vector<ilp::Term> terms;
    for (int j = 0; j < m; ++j) terms.push_back({bm.g[at(i, j)], 1});
    terms.push_back({bm.x[i], -1});
    lm.add_constraint(std::move(terms), Sense::equal, 0, "eq:gateway-node-gij-sum");
  }

  // Transitivity.  If j is the parent of i, the ancestors of i other than i
  // are ancestors of j, and the ancestors of j are ancestors of i.
  const bool lazy = opt.lazy_triples;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const int bij = bm.b[at(i, j)];
      if (i == j || bij < 0) continue;
      for (int k = 0; k < m; ++k) {
        if (k == i) continue;
        lm.add_constraint({{bij, 1}, {bm.a[at(i, k)], 1}, {bm.a[at(j, k)], -1}}, Sense::less_equal, 1,
                          "eq:multihop-bna", lazy);
      }
      for (int k = 0; k < m; ++k) {
        if (k == i) continue;
        lm.add_constraint({{bij, 1}, {bm.a[at(j, k)], 1}, {bm.a[at(i, k)], -1}}, Sense::less_equal, 1,
                          "ancestor-inherit", lazy);
      }
    }
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      for (int k = 0; k < m; ++k) {
        lm.add_constraint({{bm.a[at(i, j)], 1}, {bm.g[at(i, k)], 1}, {bm.g[at(j, k)], -1}},
                          Sense::less_equal, 1, "eq:multihop-ang", lazy);
      }
    }
  }

  for (int i = 0; i < m; ++i) {
    std::vector<ilp::Term> terms;
    for (int j = 0; j < m; ++j) terms.push_back({bm.a[at(i, j)], 1});
    terms.push_back({bm.h[i], -1});
    lm.add_constraint(std::move(terms), Sense::equal, 0, "eq:hop_count");
  }
  for (int i = 0; i < m; ++i) {
    lm.add_constraint({{bm.h[i], 1}}, Sense::less_equal, p.max_hops, "eq:hop_max");
  }
  for (int j = 0; j < m; ++j) {
    std::vector<ilp::Term> terms;
    for (int i = 0; i < m; ++i) terms.push_back({bm.a[at(i, j)], rate(ids[i])});
    terms.push_back({bm.y[j], -(p.gateway_capacity - p.router_capacity)});
    lm.add_constraint(std::move(terms), Sense::less_equal, p.router_capacity, "eq:trafficload");
  }
  return bm;
}

BackboneModel build_backbone_model(const WirelessLinkSet& w, std::span<const int> ffd,
                                   const TrafficVector& f, const BackboneParams& p,
                                   BackboneObjective objective) {
  validate_params(p);
  const std::vector<int> nodes = sorted_unique(ffd);
  if (nodes.empty()) throw std::invalid_argument("backbone: FFD set is empty");
  const int m = static_cast<int>(nodes.size());
  if (objective == BackboneObjective::fixed_gw_min_hops && !p.gw_budget) {
    throw std::invalid_argument("backbone: fixed_gw_min_hops needs a gateway budget");
  }
  BackboneModel bm = build_relation_model(w, nodes, f, p, {});
  if (p.gw_budget) {
    const int budget = *p.gw_budget;
    if (budget > m) {
      throw std::invalid_argument("backbone: gateway budget " + std::to_string(budget) + " exceeds " +
                                  std::to_string(m) + " FFDs");
    }
    const auto comps = connected_components(w, nodes).size();
    if (static_cast<std::size_t>(budget) < comps) {
      throw InfeasibleError("backbone: gateway budget " + std::to_string(budget) + " is below the " +
                            std::to_string(comps) + " wireless components of the FFD set");
    }
    std::vector<ilp::Term> terms;
    for (int v : bm.y) terms.push_back({v, 1});
    bm.model.add_constraint(std::move(terms), ilp::Sense::equal, budget, "gw-budget");
  }

  std::vector<ilp::Term> obj;
  switch (objective) {
    case BackboneObjective::min_gateways: {
      const double weight = static_cast<double>(m) * m + 1.0;
      for (int v : bm.y) obj.push_back({v, weight});
      for (int v : bm.h) obj.push_back({v, 1});
      break;
    }
    case BackboneObjective::min_total_hops:
    case BackboneObjective::fixed_gw_min_hops:
      for (int v : bm.h) obj.push_back({v, 1});
      break;
    case BackboneObjective::min_links:
      for (int v : bm.b) {
        if (v >= 0) obj.push_back({v, 1});
      }
      break;
  }
  bm.model.set_objective(std::move(obj));
  return bm;
}

BackboneTopology extract_topology(const BackboneModel& m, const ilp::Assignment& a) {
  if (a.size() != static_cast<std::size_t>(m.model.variable_count())) {
    throw std::invalid_argument("extract_topology: assignment size does not match the model");
  }
  const auto violations = ilp::check(m.model, a);
  if (!violations.empty()) {
    std::vector<std::string> tags;
    for (const ilp::Violation& v : violations) {
      if (std::find(tags.begin(), tags.end(), v.tag) == tags.end()) tags.push_back(v.tag);
    }
    std::string what = "extract_topology: " + violations.front().message + "; violated families:";
    for (const std::string& tag : tags) what += " " + tag;
    throw TopologyError(violations.front().tag, what);
  }
  auto on = [&](int var) { return var >= 0 && a[var] > 0.5; };

  BackboneTopology t;
  for (int id : m.nodes) {
    if (on(m.var_x(id))) t.ffd.push_back(id);
    if (on(m.var_y(id))) t.gateways.push_back(id);
  }
  for (int i : t.ffd) {
    for (int j : t.ffd) {
      if (i != j && on(m.var_b(i, j))) t.parents[i] = j;
      if (on(m.var_a(i, j))) t.ancestors[i].push_back(j);
      if (on(m.var_g(i, j))) t.gateway_of[i] = j;
    }
    t.hop[i] = static_cast<int>(std::lround(a[m.var_h(i)]));
  }

  // Independent decoding: walk parents to the root and compare with a, g, h.
  const std::set<int> gateways(t.gateways.begin(), t.gateways.end());
  for (int i : t.ffd) {
    std::vector<int> chain{i};
    int cur = i;
    while (!gateways.count(cur)) {
      auto it = t.parents.find(cur);
      if (it == t.parents.end()) throw TopologyError("eq:parent-node-bij-sum", "router without parent");
      cur = it->second;
      if (std::find(chain.begin(), chain.end(), cur) != chain.end()) {
        throw TopologyError("eq:ancestor-node-aij", "parent cycle through " + std::to_string(cur));
      }
      chain.push_back(cur);
    }
    std::sort(chain.begin(), chain.end());
    if (chain != t.ancestors[i]) {
      throw TopologyError("eq:multihop-bna", "ancestors of " + std::to_string(i) + " differ from its parent chain");
    }
    if (t.gateway_of[i] != cur) {
      throw TopologyError("eq:multihop-ang", "gateway of " + std::to_string(i) + " is not its root");
    }
    if (t.hop[i] != static_cast<int>(chain.size())) {
      throw TopologyError("eq:hop_count", "hop count of " + std::to_string(i) + " is not its depth");
    }
  }
  for (int gw : t.gateways) {
    std::vector<int> block;
    for (int i : t.ffd) {
      if (t.gateway_of[i] == gw) block.push_back(i);
    }
    t.clusters.push_back(std::move(block));
  }
  return t;
}

ilp::Assignment encode_topology(const BackboneModel& m, const BackboneTopology& t) {
  std::vector<double> values(m.model.variable_count(), 0.0);
  auto set = [&](int var, double v, const char* tag) {
    if (var < 0) throw TopologyError(tag, "encode_topology: relation has no model variable");
    values[var] = v;
  };
  for (int i : t.ffd) set(m.var_x(i), 1, "eq:gwFromFFD");
  for (int i : t.gateways) set(m.var_y(i), 1, "eq:gwFromFFD");
  for (const auto& [child, parent] : t.parents) set(m.var_b(child, parent), 1, "eq:sum-bij");
  for (const auto& [i, anc] : t.ancestors) {
    for (int j : anc) set(m.var_a(i, j), 1, "eq:ancestor-node-aij");
  }
  for (const auto& [i, gw] : t.gateway_of) set(m.var_g(i, gw), 1, "eq:gateway-node-gij");
  for (const auto& [i, h] : t.hop) set(m.var_h(i), h, "eq:hop_count");
  return ilp::Assignment(std::move(values));
}

}  // namespace parkmesh::backbone
