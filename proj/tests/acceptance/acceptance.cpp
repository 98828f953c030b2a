// One pass/fail line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "mutation.hpp"
#include "oracles.hpp"
#include "parkmesh/backbone.hpp"
#include "parkmesh/coverage.hpp"
#include "parkmesh/errors.hpp"
#include "parkmesh/pareto.hpp"

using namespace parkmesh;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  std::string first_failure;

  void fail(const std::string& why) {
    if (pass) first_failure = why;
    pass = false;
  }
};

std::vector<int> subset(int n, unsigned mask) {
  std::vector<int> out;
  for (int i = 0; i < n; ++i) {
    if (mask >> i & 1u) out.push_back(i);
  }
  return out;
}

std::string edges_str(const oracle::EdgeList& e) {
  std::ostringstream s;
  for (const auto& [u, v] : e) s << u << "-" << v << " ";
  return s.str();
}

const std::vector<double> kLengths{100, 45, 70, 120};
constexpr double kRho = 0.1;
// 120 m at 0.1/m is 12 sensors: M_ns = 12 binds on every vertex with two
// long segments and forces splits or extra FFDs.
const int kMns[] = {256, 12};

Outcome cover_oracle() {
  Outcome o;
  int instances = 0, binding = 0;
  for (int n = 2; n <= 6; ++n) {
    for (const oracle::EdgeList& edges : oracle::connected_graphs(n)) {
      const StreetGraph g = oracle::street_graph(n, edges, kLengths, kRho);
      std::optional<int> slack;
      for (int m_ns : kMns) {
        ++instances;
        const std::optional<int> expect = oracle::brute_min_cover(g, m_ns);
        if (m_ns == kMns[0]) slack = expect;
        else if (expect != slack) ++binding;
        coverage::CoverageParams p;
        p.max_sensors_per_ffd = m_ns;
        std::optional<int> got;
        try {
          const coverage::CoverSolution s = coverage::solve_min_cover(g, p);
          if (s.status == ilp::SolveStatus::optimal) got = static_cast<int>(s.ffd.size());
          else if (s.status != ilp::SolveStatus::infeasible) o.fail("limit status on " + edges_str(edges));
        } catch (const InfeasibleError&) {
        }
        if (got != expect) {
          o.fail("n=" + std::to_string(n) + " M_ns=" + std::to_string(m_ns) + " edges " + edges_str(edges) +
                 " solver " + (got ? std::to_string(*got) : "infeasible") + " brute " +
                 (expect ? std::to_string(*expect) : "infeasible"));
        }
      }
    }
  }
  o.detail = std::to_string(instances) + " instances, " + std::to_string(binding) + " where the tight M_ns changes φx";
  return o;
}

Outcome energy_oracle() {
  Outcome o;
  int covers = 0;
  for (int n = 2; n <= 6; ++n) {
    for (const oracle::EdgeList& edges : oracle::connected_graphs(n)) {
      const StreetGraph g = oracle::street_graph(n, edges, kLengths, kRho);
      for (int m_ns : kMns) {
        coverage::CoverageParams p;
        p.max_sensors_per_ffd = m_ns;
        for (unsigned mask = 1; mask < (1u << n); ++mask) {
          const std::vector<int> ffd = subset(n, mask);
          if (!coverage::is_cover(g, ffd)) continue;
          ++covers;
          const std::optional<double> expect = oracle::brute_energy(g, ffd, m_ns);
          const std::optional<coverage::Allocation> got = coverage::try_allocate_gamma(g, ffd, p);
          const bool same = got.has_value() == expect.has_value() && (!expect || got->energy == *expect);
          if (!same) {
            o.fail("edges " + edges_str(edges) + "mask " + std::to_string(mask) + " M_ns=" + std::to_string(m_ns) +
                   " allocate " + (got ? std::to_string(got->energy) : "none") + " brute " +
                   (expect ? std::to_string(*expect) : "none"));
          }
        }
      }
    }
  }
  o.detail = std::to_string(covers) + " covers";
  return o;
}

Outcome backbone_oracle() {
  Outcome o;
  int solves = 0;
  for (int n = 1; n <= 5; ++n) {
    for (const oracle::EdgeList& edges : oracle::labeled_connected_graphs(n)) {
      const WirelessLinkSet w = oracle::link_set(n, edges);
      std::vector<int> ffd(n);
      for (int i = 0; i < n; ++i) ffd[i] = i;
      const backbone::TrafficVector f{std::vector<double>(n, 0.1)};
      for (int k = 1; k <= 5; ++k) {
        backbone::BackboneParams p;
        p.gw_budget = k;
        const std::optional<int> expect = k <= n ? oracle::brute_min_hops(w, ffd, f.f, p, k) : std::nullopt;
        for (backbone::BackboneMethod method : {backbone::BackboneMethod::generic, backbone::BackboneMethod::combinatorial}) {
          ++solves;
          std::optional<int> got;
          try {
            const backbone::BackboneResult r =
                backbone::solve_backbone(w, ffd, f, p, backbone::BackboneObjective::fixed_gw_min_hops, {}, method);
            if (r.status == ilp::SolveStatus::optimal) got = backbone::total_hops(*r.topology);
          } catch (const InfeasibleError&) {
          } catch (const std::invalid_argument&) {
            // Budget above the FFD count.
          }
          if (got != expect) {
            o.fail("n=" + std::to_string(n) + " k=" + std::to_string(k) + " edges " + edges_str(edges) +
                   (method == backbone::BackboneMethod::generic ? "generic " : "combinatorial ") +
                   (got ? std::to_string(*got) : "none") + " brute " + (expect ? std::to_string(*expect) : "none"));
          }
        }
      }
    }
  }
  o.detail = std::to_string(solves) + " solves";
  return o;
}

Outcome cluster_bound() {
  Outcome o;
  const StreetGraph g = gen_grid(5, 5, 100, 0.1);
  // Neighbour links only, so random FFD sets split into several blocks.
  const WirelessLinkSet w = derive_wireless_links(g, 100);
  std::mt19937 rng(2016);
  std::bernoulli_distribution pick(0.4);
  std::vector<int> counts;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> ffd;
    while (ffd.empty()) {
      for (int i = 0; i < 25; ++i) {
        if (pick(rng)) ffd.push_back(i);
      }
    }
    const int comps = oracle::closure_components(w, ffd);
    counts.push_back(comps);
    if (static_cast<int>(connected_components(w, ffd).size()) != comps) o.fail("component count disagrees");
    const backbone::TrafficVector f{std::vector<double>(25, 0.1)};
    backbone::BackboneParams p;
    // Below the bound: the relation rows alone must be infeasible.
    if (comps > 1) {
      backbone::BackboneModel m = backbone::build_relation_model(w, ffd, f, p, {});
      std::vector<ilp::Term> ys;
      for (int v : m.y) ys.push_back({v, 1});
      m.model.add_constraint(std::move(ys), ilp::Sense::equal, comps - 1, "gw-budget");
      const ilp::SolveReport r = ilp::solve(m.model);
      if (r.status != ilp::SolveStatus::infeasible) {
        o.fail("trial " + std::to_string(trial) + ": " + std::to_string(comps - 1) + " gateways not infeasible");
      }
      p.gw_budget = comps - 1;
      try {
        backbone::build_backbone_model(w, ffd, f, p, backbone::BackboneObjective::fixed_gw_min_hops);
        o.fail("trial " + std::to_string(trial) + ": budget below the bound accepted");
      } catch (const InfeasibleError&) {
      }
    }
    p.gw_budget = comps;
    const backbone::BackboneResult at =
        backbone::solve_backbone(w, ffd, f, p, backbone::BackboneObjective::fixed_gw_min_hops, {},
                                 backbone::BackboneMethod::generic);
    if (at.status != ilp::SolveStatus::optimal) o.fail("trial " + std::to_string(trial) + ": budget = comps infeasible");
    p.gw_budget.reset();
    const backbone::BackboneResult fewest =
        backbone::solve_backbone(w, ffd, f, p, backbone::BackboneObjective::min_gateways);
    if (fewest.status != ilp::SolveStatus::optimal || static_cast<int>(fewest.topology->gateways.size()) != comps) {
      o.fail("trial " + std::to_string(trial) + ": min_gateways differs from the component count");
    }
  }
  std::ostringstream s;
  s << "20 sets, components";
  for (int c : counts) s << " " << c;
  o.detail = s.str();
  return o;
}

Outcome monotonicity() {
  Outcome o;
  struct Fixture {
    std::string name;
    StreetGraph g;
  };
  std::vector<Fixture> fixtures;
  fixtures.push_back({"2x2", gen_grid(2, 2, 100, 0.1)});
  fixtures.push_back({"3x3", gen_grid(3, 3, 100, 0.1)});
  fixtures.push_back({"5x5", gen_grid(5, 5, 100, 0.1)});
  fixtures.push_back({"three_spine", load_street_graph(PARKMESH_FIXTURE_DIR "/three_spine.json")});
  int checks = 0;
  const plan::PlanParams params;
  for (const Fixture& fx : fixtures) {
    const coverage::CoverSolution min = coverage::solve_min_cover(fx.g, params.coverage());
    if (min.status != ilp::SolveStatus::optimal) {
      o.fail(fx.name + ": no minimum cover");
      continue;
    }
    const int n = static_cast<int>(fx.g.node_count());
    double prev = ilp::kInfinity;
    for (int t = static_cast<int>(min.ffd.size()); t <= n; ++t) {
      const coverage::CoverSolution s = coverage::best_cover_at_budget(fx.g, params.coverage(), t);
      if (s.status != ilp::SolveStatus::optimal) {
        o.fail(fx.name + ": no cover at " + std::to_string(t));
        continue;
      }
      ++checks;
      if (s.allocation->energy > prev) o.fail(fx.name + ": energy rises at " + std::to_string(t) + " FFDs");
      prev = s.allocation->energy;
    }
    const WirelessLinkSet w = derive_wireless_links(fx.g, params.radio_range_m);
    for (int level : pareto::default_levels(static_cast<int>(min.ffd.size()), n)) {
      const coverage::CoverSolution c = coverage::best_cover_at_budget(fx.g, params.coverage(), level);
      const backbone::TrafficVector f = backbone::packet_rates(fx.g, c.allocation->counts, params.per_sensor_rate);
      const int comps = static_cast<int>(connected_components(w, c.ffd).size());
      double prev_hop = ilp::kInfinity;
      for (int k = comps; k <= level; ++k) {
        backbone::BackboneParams bp = params.backbone();
        bp.gw_budget = k;
        const backbone::BackboneResult r =
            backbone::solve_backbone(w, c.ffd, f, bp, backbone::BackboneObjective::fixed_gw_min_hops);
        if (r.status != ilp::SolveStatus::optimal) {
          o.fail(fx.name + ": no backbone at level " + std::to_string(level) + ", " + std::to_string(k) + " gateways");
          continue;
        }
        ++checks;
        const double avg = backbone::avg_hop(*r.topology);
        if (avg > prev_hop) {
          o.fail(fx.name + ": avg hop rises at level " + std::to_string(level) + ", " + std::to_string(k) +
                 " gateways");
        }
        prev_hop = avg;
      }
    }
  }
  o.detail = std::to_string(checks) + " sweep values over 4 fixtures";
  return o;
}

Outcome validator_completeness() {
  Outcome o;
  const plan::PlanParams params;
  std::vector<std::pair<std::string, StreetGraph>> fixtures;
  fixtures.emplace_back("path", gen_grid(1, 3, 100, 0.1));
  fixtures.emplace_back("2x2", gen_grid(2, 2, 100, 0.1));
  fixtures.emplace_back("3x3", gen_grid(3, 3, 100, 0.1));
  fixtures.emplace_back("5x5", gen_grid(5, 5, 100, 0.1));
  fixtures.emplace_back("three_spine", load_street_graph(PARKMESH_FIXTURE_DIR "/three_spine.json"));
  std::mt19937 rng(467);
  int mutations = 0;
  for (const auto& [name, g] : fixtures) {
    const plan::DeploymentPlan p = oracle::solved_plan(g, params);
    const plan::PlanModels clean = plan::plan_models(g, p);
    if (!plan::validate_plan(g, p).empty()) {
      o.fail(name + ": solved plan does not validate");
      continue;
    }
    for (int i = 0; i < 100; ++i) {
      plan::PlanModels m = clean;
      const oracle::Mutation mu = oracle::mutate(m, rng);
      ++mutations;
      if (!oracle::caught(plan::check_models(m), mu)) o.fail(name + ": " + mu.kind + " mutation of " + mu.variable);
    }
  }
  o.detail = std::to_string(mutations) + " mutations over 5 fixtures";
  return o;
}

Outcome desk_scale() {
  Outcome o;
  const auto start = Clock::now();
  const StreetGraph g = gen_grid(5, 5, 100, 0.1);
  const plan::PlanParams params;
  const pareto::EnergyFront energy = pareto::front_energy_vs_ffd(g, params);
  if (energy.status.status != ilp::SolveStatus::optimal || !energy.status.energy_exact) o.fail("energy sweep not exact");
  const std::vector<int> levels = pareto::default_levels(energy.min_cover, 25);
  const auto hops = pareto::front_hop_vs_gateways(g, derive_wireless_links(g, params.radio_range_m), levels, params);
  std::size_t points = energy.front.points.size();
  for (const pareto::HopFront& hf : hops) {
    if (hf.status.status != ilp::SolveStatus::optimal || !hf.status.energy_exact) {
      o.fail("hop sweep at level " + std::to_string(hf.level) + " not exact");
    }
    points += hf.front.points.size();
  }
  const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  if (seconds >= 600) o.fail("took " + std::to_string(seconds) + " s");
  std::ostringstream s;
  s.precision(3);
  s << points << " front points in " << seconds << " s";
  o.detail = s.str();
  return o;
}

Outcome fixed_values() {
  Outcome o;
  const StreetGraph grid = gen_grid(2, 2, 100, 0.1);
  const pareto::EnergyFront e = pareto::front_energy_vs_ffd(grid, {});
  std::vector<std::vector<double>> got;
  for (const pareto::ParetoPoint& p : e.front.points) got.push_back(p.objectives);
  const std::vector<std::vector<double>> want{{2, 220}, {3, 170}, {4, 120}};
  if (got != want) o.fail("2x2 energy front differs");
  for (const auto& pt : want) {
    if (oracle::brute_energy_at_budget(grid, 256, static_cast<int>(pt[0])) != pt[1]) o.fail("2x2 brute disagrees");
  }

  const StreetGraph path = gen_grid(1, 3, 100, 0.1);
  const std::vector<int> level{3};
  const auto fronts = pareto::front_hop_vs_gateways(path, derive_wireless_links(path, 150), level, {});
  got.clear();
  for (const pareto::ParetoPoint& p : fronts.at(0).front.points) got.push_back(p.objectives);
  const std::vector<std::vector<double>> want_hops{{1, 5.0 / 3.0}, {2, 4.0 / 3.0}, {3, 1}};
  if (got != want_hops) o.fail("path hop front differs");
  const WirelessLinkSet w = oracle::link_set(3, {{0, 1}, {1, 2}});
  for (const auto& pt : want_hops) {
    const auto h = oracle::brute_min_hops(w, {0, 1, 2}, std::vector<double>(3, 0.1), {}, static_cast<int>(pt[0]));
    if (!h || *h / 3.0 != pt[1]) o.fail("path brute disagrees");
  }
  o.detail = "{(2,220),(3,170),(4,120)} and {(1,5/3),(2,4/3),(3,1)}";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
    double limit_seconds;  // 0: no separate bound
  };
  const std::vector<Criterion> criteria{
      {1, "cover oracle equivalence", cover_oracle, 60},
      {2, "gamma/energy oracle equivalence", energy_oracle, 120},
      {3, "backbone oracle equivalence", backbone_oracle, 120},
      {4, "cluster lower bound", cluster_bound, 0},
      {5, "monotonicity", monotonicity, 0},
      {6, "validator completeness", validator_completeness, 0},
      {7, "desk-scale performance", desk_scale, 0},
      {8, "fixed-point values", fixed_values, 0},
  };
  bool all = true;
  for (const Criterion& c : criteria) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (c.limit_seconds > 0 && seconds >= c.limit_seconds) o.fail("over the time limit");
    all = all && o.pass;
    std::printf("[%s] criterion %d: %s (%s; %.2f s)%s%s\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), seconds, o.pass ? "" : " first failure: ", o.first_failure.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
