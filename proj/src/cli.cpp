#include "parkmesh/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "parkmesh/errors.hpp"
#include "parkmesh/pareto.hpp"

namespace parkmesh::cli {

namespace {

using Clock = std::chrono::steady_clock;

struct RunConfig {
  std::string input;
  std::string grid;  // "RxC"
  double edge_len = 100.0;
  double density = 0.1;
  plan::PlanParams params;
  std::string link_mode = "euclidean";
  std::int64_t max_nodes = ilp::SolveLimits{}.max_nodes;
  double max_seconds = ilp::SolveLimits{}.max_seconds;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  std::optional<int> ffd_budget;
  std::optional<int> gw_budget;
  std::string objective = "min_gateways";
  std::string method = "automatic";
};

void add_input_options(CLI::App* sub, RunConfig& cfg) {
  auto* input = sub->add_option("--input", cfg.input, "street graph document");
  auto* grid = sub->add_option("--grid", cfg.grid, "synthetic grid, e.g. 5x5");
  input->excludes(grid);
  sub->add_option("--edge-len", cfg.edge_len, "grid edge length in meters")->check(CLI::PositiveNumber);
  sub->add_option("--density", cfg.density, "grid sensor density per meter")->check(CLI::NonNegativeNumber);
}

void add_param_options(CLI::App* sub, RunConfig& cfg) {
  plan::PlanParams& p = cfg.params;
  sub->add_option("--m-ns", p.max_sensors_per_ffd, "maximum sensors per FFD")->check(CLI::PositiveNumber);
  sub->add_option("--m-hop", p.max_hops, "maximum hop count")->check(CLI::PositiveNumber);
  sub->add_option("--m-rt", p.router_capacity, "router capacity, packets/s")->check(CLI::PositiveNumber);
  sub->add_option("--m-gw", p.gateway_capacity, "gateway capacity, packets/s")->check(CLI::PositiveNumber);
  sub->add_option("--per-sensor-rate", p.per_sensor_rate, "packets/s per sensor")->check(CLI::NonNegativeNumber);
  sub->add_option("--radio-range", p.radio_range_m, "radio range in meters")->check(CLI::PositiveNumber);
  sub->add_option("--link-mode", cfg.link_mode, "euclidean or street")
      ->check(CLI::IsMember({"euclidean", "street"}));
  sub->add_option("--max-nodes", cfg.max_nodes, "search node limit")->check(CLI::PositiveNumber);
  sub->add_option("--max-seconds", cfg.max_seconds, "wall-clock limit")->check(CLI::PositiveNumber);
  sub->add_option("--seed", cfg.seed, "seed for randomized generation");
}

StreetGraph load_graph(const RunConfig& cfg) {
  if (cfg.input.empty() == cfg.grid.empty()) {
    throw std::invalid_argument("give exactly one of --input or --grid");
  }
  if (!cfg.input.empty()) return load_street_graph(cfg.input);
  int rows = 0, cols = 0;
  char sep = 0;
  std::istringstream in(cfg.grid);
  if (!(in >> rows >> sep >> cols) || (sep != 'x' && sep != 'X') || !in.eof()) {
    throw std::invalid_argument("--grid expects RxC, got '" + cfg.grid + "'");
  }
  return gen_grid(rows, cols, cfg.edge_len, cfg.density);
}

ilp::SolveLimits limits_of(const RunConfig& cfg) { return {cfg.max_nodes, cfg.max_seconds}; }

std::filesystem::path out_path(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  return std::filesystem::path(cfg.out_dir) / name;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::string fixed4(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4) << v;
  return out.str();
}

std::string join(const std::vector<int>& ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) s += (i ? ", " : "") + std::to_string(ids[i]);
  return "[" + s + "]";
}

bool is_limit(ilp::SolveStatus s) {
  return s == ilp::SolveStatus::node_limit || s == ilp::SolveStatus::time_limit;
}

// Shares one node/time allowance across the stages of a command.
class Allowance {
 public:
  explicit Allowance(ilp::SolveLimits limits) : limits_(limits), start_(Clock::now()) {}
  ilp::SolveLimits left() const {
    ilp::SolveLimits l = limits_;
    l.max_nodes = std::max<std::int64_t>(1, limits_.max_nodes - spent_);
    l.max_seconds = std::max(1e-4, limits_.max_seconds - std::chrono::duration<double>(Clock::now() - start_).count());
    return l;
  }
  void spend(std::int64_t nodes) { spent_ += nodes; }

 private:
  ilp::SolveLimits limits_;
  Clock::time_point start_;
  std::int64_t spent_ = 0;
};

int cmd_gen_grid(int rows, int cols, const RunConfig& cfg, double jitter, const std::string& out_file,
                 std::ostream& out) {
  StreetGraph g = gen_grid(rows, cols, cfg.edge_len, cfg.density);
  if (jitter > 0.0) {
    // Moves intersections only; segment lengths keep the nominal edge length.
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> shift(-jitter, jitter);
    std::vector<Intersection> nodes = g.intersections();
    for (Intersection& it : nodes) {
      it.x += shift(rng);
      it.y += shift(rng);
    }
    g = StreetGraph(std::move(nodes), g.segments());
  }
  const std::string text = serialize_street_graph(g);
  if (out_file.empty()) {
    out << text;
  } else {
    write_file(out_file, text);
    out << "wrote " << out_file << " (" << g.node_count() << " intersections, " << g.segment_count()
        << " segments)\n";
  }
  return kExitOk;
}

int cmd_solve(RunConfig cfg, std::ostream& out, std::ostream& err) {
  cfg.params.link_mode = parse_link_mode(cfg.link_mode);
  const StreetGraph g = load_graph(cfg);
  Allowance allowance(limits_of(cfg));
  const coverage::CoverageParams cp = cfg.params.coverage();

  // φx first (or the given budget), then the least energy at that size.
  int budget = 0;
  std::string cover_note = "minimum cover";
  if (cfg.ffd_budget) {
    budget = *cfg.ffd_budget;
    cover_note = "fixed budget";
  } else {
    coverage::CoverSolution min = coverage::solve_min_cover(g, cp, allowance.left());
    allowance.spend(min.nodes);
    if (is_limit(min.status)) {
      err << "limit reached while minimizing the FFD count";
      if (!min.ffd.empty()) err << "; incumbent uses " << min.ffd.size() << " FFDs " << join(min.ffd);
      err << "\n";
      return kExitLimit;
    }
    if (min.status != ilp::SolveStatus::optimal) {
      err << "infeasible: no FFD placement satisfies coverage and M_ns = " << cp.max_sensors_per_ffd << "\n";
      return kExitInfeasible;
    }
    budget = static_cast<int>(min.ffd.size());
  }
  coverage::CoverSolution cover = coverage::best_cover_at_budget(g, cp, budget, allowance.left());
  allowance.spend(cover.nodes);
  if (is_limit(cover.status)) {
    err << "limit reached while minimizing sensor energy at " << budget << " FFDs\n";
    return kExitLimit;
  }
  if (cover.status != ilp::SolveStatus::optimal) {
    err << "infeasible: no cover with " << budget << " FFDs satisfies coverage and M_ns = "
        << cp.max_sensors_per_ffd << "\n";
    return kExitInfeasible;
  }

  const WirelessLinkSet w = derive_wireless_links(g, cfg.params.radio_range_m, cfg.params.link_mode);
  const backbone::TrafficVector f =
      backbone::packet_rates(g, cover.allocation->counts, cfg.params.per_sensor_rate);
  backbone::BackboneParams bp = cfg.params.backbone();
  bp.gw_budget = cfg.gw_budget;
  const auto objective = backbone::parse_objective(cfg.objective);
  backbone::BackboneMethod method = backbone::BackboneMethod::automatic;
  if (cfg.method == "generic") method = backbone::BackboneMethod::generic;
  if (cfg.method == "combinatorial") method = backbone::BackboneMethod::combinatorial;
  backbone::BackboneResult bb = backbone::solve_backbone(w, cover.ffd, f, bp, objective, allowance.left(), method);
  if (is_limit(bb.status)) {
    err << "limit reached while solving the backbone over " << cover.ffd.size() << " FFDs "
        << join(cover.ffd) << "\n";
    return kExitLimit;
  }
  if (bb.status != ilp::SolveStatus::optimal) {
    err << "infeasible: no backbone over " << join(cover.ffd) << " satisfies M_hop = " << bp.max_hops
        << ", M_rt = " << bp.router_capacity << ", M_gw = " << bp.gateway_capacity << "\n";
    return kExitInfeasible;
  }

  plan::DeploymentPlan p = plan::make_plan(g, cfg.params, cover.ffd, *cover.allocation, bb.topology);
  p.metadata["cover"] = cover_note;
  p.metadata["cover_search"] = g.node_count() <= static_cast<std::size_t>(coverage::kExhaustiveCoverNodes)
                                   ? "exhaustive"
                                   : "model";
  p.metadata["energy_exact"] = cover.energy_exact ? "true" : "false";
  p.metadata["backbone_objective"] = std::string(backbone::to_string(objective));
  p.metadata["backbone_search"] =
      bb.method_used == backbone::BackboneMethod::combinatorial ? "combinatorial" : "generic";
  p.metadata["hop_convention"] = "h counts the node itself; a gateway has h = 1";
  const auto path = out_path(cfg, "plan.json");
  write_file(path, plan::serialize_plan(p));

  out << "status: optimal\n";
  out << "FFDs (phi_x): " << p.objectives.phi_x << " " << join(p.ffd) << "\n";
  out << "sensor energy (phi_omega): " << p.objectives.phi_omega << "\n";
  out << "gateways (phi_y): " << p.objectives.phi_y << " " << join(p.gateways) << "\n";
  out << "average hop (phi_h/x): " << fixed4(p.objectives.phi_hx) << " (sum h = " << p.objectives.sum_h << ")\n";
  out << "plan: " << path.string() << "\n";
  return kExitOk;
}

int cmd_pareto(RunConfig cfg, const std::string& which, const std::vector<int>& levels_arg, std::ostream& out,
               std::ostream& err) {
  cfg.params.link_mode = parse_link_mode(cfg.link_mode);
  const StreetGraph g = load_graph(cfg);
  std::ostringstream csv;
  ilp::SolveStatus status = ilp::SolveStatus::optimal;
  bool exact = true;
  std::size_t rows = 0;
  std::string infeasible_reason;
  try {
    if (which == "energy") {
      csv << "budget,objective\n";
      pareto::EnergyFront front = pareto::front_energy_vs_ffd(g, cfg.params, limits_of(cfg));
      status = front.status.status;
      exact = front.status.energy_exact;
      for (const pareto::ParetoPoint& pt : front.front.points) {
        csv << static_cast<int>(pt.objectives[0]) << "," << fixed4(pt.objectives[1]) << "\n";
        ++rows;
      }
    } else {
      csv << "gateways,avg_hop,ffd_level\n";
      std::vector<int> levels = levels_arg;
      if (levels.empty()) {
        coverage::CoverSolution min = coverage::solve_min_cover(g, cfg.params.coverage(), limits_of(cfg));
        if (min.status != ilp::SolveStatus::optimal) {
          status = min.status;
        } else {
          levels = pareto::default_levels(static_cast<int>(min.ffd.size()), static_cast<int>(g.node_count()));
        }
      }
      const WirelessLinkSet w = derive_wireless_links(g, cfg.params.radio_range_m, cfg.params.link_mode);
      auto fronts = pareto::front_hop_vs_gateways(g, w, levels, cfg.params, limits_of(cfg));
      for (const pareto::HopFront& hf : fronts) {
        exact = exact && hf.status.energy_exact;
        if (hf.status.status != ilp::SolveStatus::optimal && status == ilp::SolveStatus::optimal) {
          status = hf.status.status;
        }
        if (is_limit(hf.status.status)) status = hf.status.status;
        for (const pareto::ParetoPoint& pt : hf.front.points) {
          csv << static_cast<int>(pt.objectives[0]) << "," << fixed4(pt.objectives[1]) << "," << hf.level << "\n";
          ++rows;
        }
      }
    }
  } catch (const InfeasibleError& e) {
    // The sweep range is empty; the CSV keeps its header.
    status = ilp::SolveStatus::infeasible;
    infeasible_reason = e.what();
  }
  const auto path = out_path(cfg, "pareto_" + which + ".csv");
  write_file(path, csv.str());
  out << csv.str();
  if (!exact) err << "note: some energies come from the balanced-split model and M_ns binds there\n";
  if (is_limit(status)) {
    err << "limit reached; the front is incomplete\n";
    return kExitLimit;
  }
  if (rows == 0 || status == ilp::SolveStatus::infeasible) {
    err << "infeasible: "
        << (!infeasible_reason.empty() ? infeasible_reason
            : rows == 0                ? "no feasible front point"
                                       : "some levels have no feasible point")
        << "\n";
    return kExitInfeasible;
  }
  return kExitOk;
}

int cmd_validate(RunConfig cfg, const std::string& plan_file, const std::string& graph_file, std::ostream& out) {
  if (!graph_file.empty()) cfg.input = graph_file;
  const StreetGraph g = load_graph(cfg);
  const plan::DeploymentPlan p = plan::load_plan(plan_file);
  const auto violations = plan::validate_plan(g, p);
  for (const plan::PlanViolation& v : violations) out << v.tag << ": " << v.message << "\n";
  out << (violations.empty() ? "valid" : std::to_string(violations.size()) + " violation(s)") << "\n";
  return violations.empty() ? kExitOk : kExitError;
}

int cmd_export_lp(RunConfig cfg, const std::string& which, const std::string& out_file, std::ostream& out,
                  std::ostream& err) {
  cfg.params.link_mode = parse_link_mode(cfg.link_mode);
  const StreetGraph g = load_graph(cfg);
  coverage::CoverageParams cp = cfg.params.coverage();
  ilp::LinearModel model;
  if (which == "cover") {
    cp.ffd_budget = cfg.ffd_budget;
    model = coverage::build_cover_model(g, cp);
  } else if (which == "energy") {
    if (!cfg.ffd_budget) throw std::invalid_argument("--model energy needs --ffd-budget");
    model = coverage::build_energy_model(g, cp, *cfg.ffd_budget);
  } else {
    // Backbone over the minimum-energy cover of the requested (or minimum) size.
    int budget = 0;
    if (cfg.ffd_budget) {
      budget = *cfg.ffd_budget;
    } else {
      coverage::CoverSolution min = coverage::solve_min_cover(g, cp, limits_of(cfg));
      if (min.status != ilp::SolveStatus::optimal) {
        err << "no cover found: " << ilp::to_string(min.status) << "\n";
        return is_limit(min.status) ? kExitLimit : kExitInfeasible;
      }
      budget = static_cast<int>(min.ffd.size());
    }
    coverage::CoverSolution cover = coverage::best_cover_at_budget(g, cp, budget, limits_of(cfg));
    if (cover.status != ilp::SolveStatus::optimal) {
      err << "no cover found: " << ilp::to_string(cover.status) << "\n";
      return is_limit(cover.status) ? kExitLimit : kExitInfeasible;
    }
    const WirelessLinkSet w = derive_wireless_links(g, cfg.params.radio_range_m, cfg.params.link_mode);
    backbone::BackboneParams bp = cfg.params.backbone();
    bp.gw_budget = cfg.gw_budget;
    model = backbone::build_backbone_model(
                w, cover.ffd, backbone::packet_rates(g, cover.allocation->counts, bp.per_sensor_rate), bp,
                backbone::parse_objective(cfg.objective))
                .model;
  }
  const std::string text = ilp::export_lp(model);
  const std::filesystem::path path = out_file.empty() ? out_path(cfg, which + ".lp") : std::filesystem::path(out_file);
  write_file(path, text);
  out << "wrote " << path.string() << " (" << model.variable_count() << " variables, " << model.constraint_count()
      << " rows)\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Street-parking sensor network deployment planner"};
  app.name("parkmesh");
  app.require_subcommand(1);
  RunConfig cfg;

  auto* gen = app.add_subcommand("gen-grid", "write a rows x cols street grid document");
  int rows = 0, cols = 0;
  double jitter = 0.0;
  std::string gen_out;
  gen->add_option("--rows", rows, "grid rows")->required()->check(CLI::PositiveNumber);
  gen->add_option("--cols", cols, "grid columns")->required()->check(CLI::PositiveNumber);
  gen->add_option("--edge-len", cfg.edge_len, "edge length in meters")->check(CLI::PositiveNumber);
  gen->add_option("--density", cfg.density, "sensor density per meter")->check(CLI::NonNegativeNumber);
  gen->add_option("--jitter", jitter, "uniform coordinate jitter in meters")->check(CLI::NonNegativeNumber);
  gen->add_option("--seed", cfg.seed, "jitter seed");
  gen->add_option("--out", gen_out, "output file (default: stdout)");

  auto* solve = app.add_subcommand("solve", "minimum FFDs, energy, gateways and hops; writes plan.json");
  add_input_options(solve, cfg);
  add_param_options(solve, cfg);
  solve->add_option("--out-dir", cfg.out_dir, "output directory");
  solve->add_option("--ffd-budget", cfg.ffd_budget, "fix the FFD count")->check(CLI::PositiveNumber);
  solve->add_option("--gw-budget", cfg.gw_budget, "fix the gateway count")->check(CLI::PositiveNumber);
  solve->add_option("--objective", cfg.objective, "backbone objective")
      ->check(CLI::IsMember({"min_gateways", "min_total_hops", "fixed_gw_min_hops", "min_links"}));
  solve->add_option("--backbone-method", cfg.method, "automatic, generic or combinatorial")
      ->check(CLI::IsMember({"automatic", "generic", "combinatorial"}));

  auto* par = app.add_subcommand("pareto", "energy-vs-FFD or hop-vs-gateway fronts as CSV");
  std::string which = "energy";
  std::vector<int> levels;
  add_input_options(par, cfg);
  add_param_options(par, cfg);
  par->add_option("--out-dir", cfg.out_dir, "output directory");
  par->add_option("--which", which, "energy or hops")->check(CLI::IsMember({"energy", "hops"}));
  par->add_option("--levels", levels, "FFD levels for the hop fronts (default: worst, 80%, all)")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);

  auto* val = app.add_subcommand("validate", "re-check a plan against every constraint family");
  std::string plan_file, graph_file;
  val->add_option("--plan", plan_file, "plan document")->required();
  auto* graph_opt = val->add_option("--graph", graph_file, "street graph document");
  auto* grid_opt = val->add_option("--grid", cfg.grid, "synthetic grid the plan was built on");
  graph_opt->excludes(grid_opt);
  val->add_option("--edge-len", cfg.edge_len, "grid edge length")->check(CLI::PositiveNumber);
  val->add_option("--density", cfg.density, "grid density")->check(CLI::NonNegativeNumber);

  auto* lp = app.add_subcommand("export-lp", "write a model in LP format");
  std::string lp_model = "cover", lp_out;
  add_input_options(lp, cfg);
  add_param_options(lp, cfg);
  lp->add_option("--out-dir", cfg.out_dir, "output directory");
  lp->add_option("--out", lp_out, "output file");
  lp->add_option("--model", lp_model, "cover, energy or backbone")
      ->check(CLI::IsMember({"cover", "energy", "backbone"}));
  lp->add_option("--ffd-budget", cfg.ffd_budget, "FFD count for budgeted models")->check(CLI::PositiveNumber);
  lp->add_option("--gw-budget", cfg.gw_budget, "gateway count for the backbone model")->check(CLI::PositiveNumber);
  lp->add_option("--objective", cfg.objective, "backbone objective")
      ->check(CLI::IsMember({"min_gateways", "min_total_hops", "fixed_gw_min_hops", "min_links"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (gen->parsed()) return cmd_gen_grid(rows, cols, cfg, jitter, gen_out, out);
    if (solve->parsed()) return cmd_solve(cfg, out, err);
    if (par->parsed()) return cmd_pareto(cfg, which, levels, out, err);
    if (val->parsed()) return cmd_validate(cfg, plan_file, graph_file, out);
    if (lp->parsed()) return cmd_export_lp(cfg, lp_model, lp_out, out, err);
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace parkmesh::cli
