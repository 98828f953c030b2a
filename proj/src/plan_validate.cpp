#include <cmath>
#include <set>

#include "parkmesh/errors.hpp"
#include "parkmesh/plan.hpp"

namespace parkmesh::plan {

namespace {

constexpr double kTol = 1e-6;

bool close(double a, double b) { return std::abs(a - b) <= kTol * std::max(1.0, std::abs(b)); }

void require_node(const StreetGraph& g, int id, const char* where) {
  if (id < 0 || static_cast<std::size_t>(id) >= g.node_count()) {
    throw ParseError(std::string("plan: ") + where + " references unknown intersection " + std::to_string(id));
  }
}

std::string gamma_name(int from, int to) { return "G_" + std::to_string(from) + "_" + std::to_string(to); }

std::vector<int> support_of(const DeploymentPlan& p) {
  std::set<int> s(p.ffd.begin(), p.ffd.end());
  s.insert(p.gateways.begin(), p.gateways.end());
  for (const auto& [i, j] : p.parents) s.insert({i, j});
  for (const auto& [i, list] : p.ancestors) {
    s.insert(i);
    s.insert(list.begin(), list.end());
  }
  for (const auto& [i, j] : p.gateway_of) s.insert({i, j});
  for (const auto& [i, h] : p.hops) s.insert(i);
  for (const auto& [i, f] : p.traffic) s.insert(i);
  return {s.begin(), s.end()};
}

}  // namespace

PlanModels plan_models(const StreetGraph& g, const DeploymentPlan& p) {
  const int n = static_cast<int>(g.node_count());
  for (int i : p.ffd) require_node(g, i, "ffd");
  for (int i : support_of(p)) require_node(g, i, "backbone");

  PlanModels out;
  ilp::LinearModel& cm = out.coverage;
  cm.set_name("coverage_check");
  for (int i = 0; i < n; ++i) cm.add_binary("x_" + std::to_string(i));
  std::vector<int> gamma_var(2 * g.segment_count(), -1);
  for (int s = 0; s < static_cast<int>(g.segment_count()); ++s) {
    const RoadSegment& seg = g.segment(s);
    if (!seg.parking) continue;
    gamma_var[2 * s] = cm.add_continuous(gamma_name(seg.u, seg.v), -ilp::kInfinity, ilp::kInfinity);
    gamma_var[2 * s + 1] = cm.add_continuous(gamma_name(seg.v, seg.u), -ilp::kInfinity, ilp::kInfinity);
  }
  for (int s = 0; s < static_cast<int>(g.segment_count()); ++s) {
    const RoadSegment& seg = g.segment(s);
    if (!seg.parking) continue;
    const int gu = gamma_var[2 * s], gv = gamma_var[2 * s + 1];
    // Exact coverage: the two managed lengths add up to the segment.
    cm.add_constraint({{gu, 1}, {gv, 1}}, ilp::Sense::equal, seg.length_m, "eq:sumofgamma");
    for (int gvar : {gu, gv}) {
      cm.add_constraint({{gvar, 1}}, ilp::Sense::less_equal, seg.length_m, "eq:gamma-dij");
      cm.add_constraint({{gvar, 1}}, ilp::Sense::greater_equal, 0.0, "eq:gamma-dij");
    }
    cm.add_constraint({{seg.u, g.d_max()}, {gu, -1}}, ilp::Sense::greater_equal, 0.0, "eq:xi-gammaij-dmax");
    cm.add_constraint({{seg.v, g.d_max()}, {gv, -1}}, ilp::Sense::greater_equal, 0.0, "eq:xi-gammaij-dmax");
  }
  for (int i = 0; i < n; ++i) {
    std::vector<ilp::Term> terms;
    for (int s : g.incident(i)) {
      const RoadSegment& seg = g.segment(s);
      if (!seg.parking) continue;
      terms.push_back({gamma_var[coverage::end_index(seg, s, i)], seg.density_per_m});
    }
    if (!terms.empty()) {
      cm.add_constraint(std::move(terms), ilp::Sense::less_equal, p.params.max_sensors_per_ffd, "eq:maxsensor-ffd");
    }
  }

  {
    std::vector<ilp::Term> terms;
    for (int i = 0; i < n; ++i) terms.push_back({i, 1});
    cm.add_constraint(std::move(terms), ilp::Sense::equal, p.objectives.phi_x, "eq:phi_x");
  }

  std::vector<double> cv(cm.variable_count(), 0.0);
  for (int i : p.ffd) cv[i] = 1.0;
  std::set<std::pair<int, int>> seen;
  for (const GammaEntry& e : p.gamma) {
    require_node(g, e.from, "gamma");
    require_node(g, e.to, "gamma");
    auto s = g.find_segment(e.from, e.to);
    if (!s || !g.segment(*s).parking) {
      throw ParseError("plan: gamma entry " + std::to_string(e.from) + "->" + std::to_string(e.to) +
                       " is not a parking segment");
    }
    if (!seen.insert({e.from, e.to}).second) {
      throw ParseError("plan: duplicate gamma entry " + std::to_string(e.from) + "->" + std::to_string(e.to));
    }
    cv[gamma_var[coverage::end_index(g.segment(*s), *s, e.from)]] = e.managed_m;
  }
  out.coverage_values = ilp::Assignment(std::move(cv));

  if (!p.has_backbone) return out;
  const WirelessLinkSet w = derive_wireless_links(g, p.params.radio_range_m, p.params.link_mode);
  backbone::TrafficVector f;
  f.f.assign(n, 0.0);
  for (const auto& [i, rate] : p.traffic) f.f[i] = rate;
  backbone::RelationModelOptions opt;
  opt.fix_x = false;
  opt.all_pairs = true;
  opt.lazy_triples = false;
  const std::vector<int> support = support_of(p);
  backbone::BackboneModel bm = build_relation_model(w, support, f, p.params.backbone(), opt);
  // The reported objectives become rows so that every relation they count is tied to them.
  std::vector<ilp::Term> ys, hs;
  for (std::size_t i = 0; i < support.size(); ++i) {
    ys.push_back({bm.y[i], 1});
    hs.push_back({bm.h[i], 1});
  }
  bm.model.add_constraint(std::move(ys), ilp::Sense::equal, p.objectives.phi_y, "eq:phi_y");
  bm.model.add_constraint(std::move(hs), ilp::Sense::equal, p.objectives.sum_h, "eq:average_delay");
  std::vector<double> rv(bm.model.variable_count(), 0.0);
  for (int i : p.ffd) rv[bm.var_x(i)] = 1.0;
  for (int i : p.gateways) rv[bm.var_y(i)] = 1.0;
  for (const auto& [i, j] : p.parents) rv[bm.var_b(i, j)] = 1.0;
  for (const auto& [i, list] : p.ancestors) {
    for (int j : list) rv[bm.var_a(i, j)] = 1.0;
  }
  for (const auto& [i, j] : p.gateway_of) rv[bm.var_g(i, j)] = 1.0;
  for (const auto& [i, h] : p.hops) rv[bm.var_h(i)] = h;
  out.relation_values = ilp::Assignment(std::move(rv));
  out.relations = std::move(bm);
  return out;
}

std::vector<PlanViolation> check_models(const PlanModels& models) {
  std::vector<PlanViolation> out;
  auto report_rows = [&](const ilp::LinearModel& m, const ilp::Assignment& a) {
    for (const ilp::Violation& v : ilp::check(m, a)) {
      PlanViolation pv{v.tag, v.message, {}};
      if (v.constraint >= 0) {
        for (const ilp::Term& t : m.constraints()[v.constraint].terms) pv.variables.push_back(m.variable(t.var).name);
      } else if (v.variable >= 0) {
        pv.variables.push_back(m.variable(v.variable).name);
      }
      out.push_back(std::move(pv));
    }
  };
  report_rows(models.coverage, models.coverage_values);
  if (models.relations) report_rows(models.relations->model, *models.relation_values);
  return out;
}

std::vector<PlanViolation> validate_plan(const StreetGraph& g, const DeploymentPlan& p) {
  std::vector<PlanViolation> out = check_models(plan_models(g, p));

  // Derived quantities.
  std::map<int, int> sensors_at;
  double energy = 0.0;
  std::map<int, int> sensors_on_segment;
  for (const GammaEntry& e : p.gamma) {
    const int s = *g.find_segment(e.from, e.to);
    const RoadSegment& seg = g.segment(s);
    const int expect = coverage::sensor_count(e.managed_m, seg.density_per_m);
    if (e.sensors != expect) {
      out.push_back({"eq:kij",
                     "k_" + std::to_string(e.from) + "_" + std::to_string(e.to) + " = " + std::to_string(e.sensors) +
                         " but floor(Γ·ρ) = " + std::to_string(expect),
                     {gamma_name(e.from, e.to)}});
    }
    sensors_at[e.from] += e.sensors;
    sensors_on_segment[s] += e.sensors;
    energy += coverage::end_energy(e.sensors);
  }
  for (int s = 0; s < static_cast<int>(g.segment_count()); ++s) {
    const RoadSegment& seg = g.segment(s);
    if (!seg.parking) continue;
    const int whole = coverage::segment_sensors(seg).whole;
    if (sensors_on_segment[s] != whole) {
      out.push_back({"eq:kij",
                     "segment " + std::to_string(seg.u) + "-" + std::to_string(seg.v) + " manages " +
                         std::to_string(sensors_on_segment[s]) + " of " + std::to_string(whole) + " sensors",
                     {gamma_name(seg.u, seg.v), gamma_name(seg.v, seg.u)}});
    }
  }
  if (!close(p.objectives.phi_omega, energy)) {
    out.push_back({"eq:energy-consumption",
                   "phi_omega = " + std::to_string(p.objectives.phi_omega) + " but Σ ½k(k+1) = " + std::to_string(energy),
                   {}});
  }
  const std::set<int> ffd(p.ffd.begin(), p.ffd.end());
  if (ffd.size() != p.ffd.size()) {
    out.push_back({"eq:phi_x", "the FFD list repeats an intersection", {}});
  }
  if (!p.has_backbone) return out;

  const double avg = ffd.empty() ? 0.0 : static_cast<double>(p.objectives.sum_h) / ffd.size();
  if (!close(p.objectives.phi_hx, avg)) {
    out.push_back({"eq:average_delay", "phi_hx = " + std::to_string(p.objectives.phi_hx) + " but Σh / φx = " +
                                           std::to_string(avg), {}});
  }
  for (const auto& [i, rate] : p.traffic) {
    const double expect = ffd.count(i) ? p.params.per_sensor_rate * sensors_at[i] : 0.0;
    if (!close(rate, expect)) {
      out.push_back({"packet-rate", "f_" + std::to_string(i) + " = " + std::to_string(rate) + " but rate·Σk = " +
                                        std::to_string(expect), {}});
    }
  }
  for (int i : ffd) {
    if (!p.traffic.count(i) && sensors_at[i] > 0 && p.params.per_sensor_rate > 0) {
      out.push_back({"packet-rate", "f_" + std::to_string(i) + " is missing", {}});
    }
  }
  return out;
}

}  // namespace parkmesh::plan
