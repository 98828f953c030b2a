#include <algorithm>
#include <chrono>
#include <deque>
#include <limits>
#include <numeric>

#include "parkmesh/backbone.hpp"
#include "parkmesh/errors.hpp"

namespace parkmesh::backbone {

namespace {

using Clock = std::chrono::steady_clock;
constexpr int kUnreachable = std::numeric_limits<int>::max() / 4;

// Gateway-set branch-and-bound.  For a fixed gateway set Y the cheapest
// backbone puts every FFD at its W-distance from Y, so Σ h = Σ_v (1 + d(v, Y));
// the search enumerates Y in lexicographic order of the y vector.
class GatewaySearch {
 public:
  GatewaySearch(const WirelessLinkSet& w, std::vector<int> ids, const TrafficVector& f,
                const BackboneParams& p, const ilp::SolveLimits& limits, Clock::time_point start)
      : ids_(std::move(ids)), m_(static_cast<int>(ids_.size())), p_(p), limits_(limits), start_(start) {
    rate_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      rate_[i] = static_cast<std::size_t>(ids_[i]) < f.f.size() ? f.f[ids_[i]] : 0.0;
    }
    total_rate_ = std::accumulate(rate_.begin(), rate_.end(), 0.0);
    adj_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < m_; ++j) {
        if (i != j && w.linked(ids_[i], ids_[j])) adj_[i].push_back(j);
      }
    }
    dist_.assign(m_, std::vector<int>(m_, kUnreachable));
    comp_.assign(m_, -1);
    for (int s = 0; s < m_; ++s) {
      std::deque<int> queue{s};
      dist_[s][s] = 0;
      while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (int u : adj_[v]) {
          if (dist_[s][u] == kUnreachable) {
            dist_[s][u] = dist_[s][v] + 1;
            queue.push_back(u);
          }
        }
      }
      if (comp_[s] < 0) {
        for (int u = 0; u < m_; ++u) {
          if (dist_[s][u] != kUnreachable) comp_[u] = components_;
        }
        ++components_;
      }
    }
    // suffix minima of distances to candidates u >= idx, with and without v itself
    suf_.assign(m_ + 1, std::vector<int>(m_, kUnreachable));
    suf_ex_.assign(m_ + 1, std::vector<int>(m_, kUnreachable));
    for (int idx = m_ - 1; idx >= 0; --idx) {
      for (int v = 0; v < m_; ++v) {
        suf_[idx][v] = std::min(suf_[idx + 1][v], dist_[idx][v]);
        suf_ex_[idx][v] = v == idx ? suf_ex_[idx + 1][v] : std::min(suf_ex_[idx + 1][v], dist_[idx][v]);
      }
    }
  }

  int components() const { return components_; }
  int size() const { return m_; }

  struct Outcome {
    ilp::SolveStatus status = ilp::SolveStatus::infeasible;
    long long cost = 0;
    std::vector<char> y;
    std::vector<int> parent;  // local index, -1 for gateways
    // Cheapest gateway set whose shortest-path forests all break capacity.
    long long blocked = std::numeric_limits<long long>::max();
  };

  Outcome solve_fixed(int k) {
    k_ = k;
    best_ = Outcome{};
    best_cost_ = std::numeric_limits<long long>::max();
    seed_ = std::numeric_limits<long long>::max();
    if (k < components_ || k > m_) return best_;
    seed_ = greedy_seed();
    chosen_.assign(m_, 0);
    std::vector<int> d(m_, kUnreachable);
    branch(0, 0, d);
    if (limit_) {
      best_.status = limit_ == 1 ? ilp::SolveStatus::node_limit : ilp::SolveStatus::time_limit;
    } else if (best_cost_ != std::numeric_limits<long long>::max()) {
      best_.status = ilp::SolveStatus::optimal;
      best_.cost = best_cost_;
    }
    return best_;
  }

  std::int64_t nodes() const { return nodes_; }

 private:
  bool over_limit() {
    if (limit_) return true;
    if (nodes_ >= limits_.max_nodes) {
      limit_ = 1;
    } else if ((nodes_ & 255) == 0 &&
               std::chrono::duration<double>(Clock::now() - start_).count() >= limits_.max_seconds) {
      limit_ = 2;
    }
    return limit_ != 0;
  }

  long long cutoff() const { return best_cost_ == std::numeric_limits<long long>::max() ? seed_ + 1 : best_cost_; }

  // Upper bound from a greedy gateway set: every component first, then the
  // largest saving.
  long long greedy_seed() const {
    std::vector<int> d(m_, kUnreachable);
    std::vector<char> taken(m_, 0), served(components_, 0);
    int open = components_;
    for (int picks = 0; picks < k_; ++picks) {
      const bool must_open = open >= k_ - picks;
      int best_v = -1;
      long long best_c = std::numeric_limits<long long>::max();
      for (int v = 0; v < m_; ++v) {
        if (taken[v] || (must_open && served[comp_[v]])) continue;
        long long c = 0;
        for (int u = 0; u < m_; ++u) c += 1 + std::min(std::min(d[u], dist_[v][u]), m_);
        if (c < best_c) {
          best_c = c;
          best_v = v;
        }
      }
      if (best_v < 0) break;
      taken[best_v] = 1;
      if (!served[comp_[best_v]]) --open;
      served[comp_[best_v]] = 1;
      for (int u = 0; u < m_; ++u) d[u] = std::min(d[u], dist_[best_v][u]);
    }
    long long c = 0;
    for (int u = 0; u < m_; ++u) {
      if (d[u] >= kUnreachable || 1 + d[u] > p_.max_hops) return std::numeric_limits<long long>::max() - 1;
      c += 1 + d[u];
    }
    return c;
  }

  void branch(int idx, int count, std::vector<int>& d) {
    if (over_limit()) return;
    ++nodes_;
    const int remaining = k_ - count;
    if (remaining < 0 || m_ - idx < remaining) return;
    if (remaining == 0 || idx == m_) {
      if (remaining == 0) leaf(d);
      return;
    }
    // Components without a chosen gateway must still have a candidate.
    // The bound below also sees them as unreachable.
    long long bound = 0;
    std::vector<int> savings;
    savings.reserve(m_ - idx);
    for (int v = 0; v < m_; ++v) {
      if (v < idx) {
        if (chosen_[v]) {
          bound += 1;
          continue;
        }
        const int reach = std::min(d[v], suf_[idx][v]);
        if (reach >= kUnreachable || 1 + reach > p_.max_hops) return;
        bound += 1 + reach;
      } else {
        const int reach = std::min(d[v], suf_ex_[idx][v]);
        if (reach >= kUnreachable) {
          // v can only be reached by becoming a gateway
          bound += 1;
          savings.push_back(-1);  // marks a forced pick
          continue;
        }
        bound += 1 + reach;
        savings.push_back(reach);
      }
    }
    const int forced = static_cast<int>(std::count(savings.begin(), savings.end(), -1));
    if (forced > remaining) return;
    std::sort(savings.begin(), savings.end(), std::greater<>());
    for (int t = 0; t < remaining - forced && t < static_cast<int>(savings.size()); ++t) {
      if (savings[t] > 0) bound -= savings[t];
    }
    if (bound >= cutoff()) return;

    branch(idx + 1, count, d);
    if (limit_) return;
    std::vector<int> saved = d;
    chosen_[idx] = 1;
    for (int v = 0; v < m_; ++v) d[v] = std::min(d[v], dist_[idx][v]);
    branch(idx + 1, count + 1, d);
    chosen_[idx] = 0;
    d = std::move(saved);
  }

  void leaf(const std::vector<int>& d) {
    long long cost = 0;
    for (int v = 0; v < m_; ++v) {
      if (d[v] >= kUnreachable || 1 + d[v] > p_.max_hops) return;
      cost += 1 + d[v];
    }
    if (cost >= cutoff()) return;
    std::vector<int> parent;
    if (!forest(d, parent)) {
      best_.blocked = std::min(best_.blocked, cost);
      return;
    }
    best_cost_ = cost;
    best_.y = chosen_;
    best_.parent = std::move(parent);
  }

  // Shortest-path forest with the lexicographically smallest b: routers in
  // ascending order each take the largest-index parent one level closer,
  // backtracking only when a capacity row fails.
  bool forest(const std::vector<int>& d, std::vector<int>& parent) {
    std::vector<std::vector<int>> options(m_);
    for (int v = 0; v < m_; ++v) {
      if (chosen_[v]) continue;
      for (int u : adj_[v]) {
        if (d[u] == d[v] - 1) options[v].push_back(u);
      }
      std::sort(options[v].begin(), options[v].end(), std::greater<>());
    }
    parent.assign(m_, -1);
    if (total_rate_ <= p_.router_capacity + 1e-9) {
      for (int v = 0; v < m_; ++v) {
        if (!chosen_[v]) parent[v] = options[v].front();
      }
      return true;
    }
    return assign_parent(0, d, options, parent);
  }

  // Loads only grow as more parents are fixed, so a partial assignment
  // already over capacity can be dropped.
  bool loads_ok(const std::vector<int>& parent) const {
    std::vector<double> load(m_, 0.0);
    for (int v = 0; v < m_; ++v) {
      int cur = v;
      while (true) {
        load[cur] += rate_[v];
        if (chosen_[cur] || parent[cur] < 0) break;
        cur = parent[cur];
      }
    }
    for (int v = 0; v < m_; ++v) {
      const double cap = chosen_[v] ? p_.gateway_capacity : p_.router_capacity;
      if (load[v] > cap + 1e-9) return false;
    }
    return true;
  }

  bool assign_parent(int v, const std::vector<int>& d, const std::vector<std::vector<int>>& options,
                     std::vector<int>& parent) {
    if (v == m_) return loads_ok(parent);
    if (chosen_[v]) return assign_parent(v + 1, d, options, parent);
    for (int u : options[v]) {
      if (over_limit()) return false;
      ++nodes_;
      parent[v] = u;
      if (loads_ok(parent) && assign_parent(v + 1, d, options, parent)) return true;
    }
    parent[v] = -1;
    return false;
  }

  std::vector<int> ids_;
  int m_;
  BackboneParams p_;
  ilp::SolveLimits limits_;
  Clock::time_point start_;
  std::vector<double> rate_;
  double total_rate_ = 0.0;
  std::vector<std::vector<int>> adj_;
  std::vector<std::vector<int>> dist_;
  std::vector<int> comp_;
  int components_ = 0;
  std::vector<std::vector<int>> suf_, suf_ex_;

  int k_ = 0;
  std::vector<char> chosen_;
  Outcome best_;
  long long best_cost_ = 0;
  long long seed_ = 0;
  std::int64_t nodes_ = 0;
  int limit_ = 0;  // 1 nodes, 2 time
};

BackboneTopology topology_from(const std::vector<int>& ids, const GatewaySearch::Outcome& o) {
  BackboneTopology t;
  const int m = static_cast<int>(ids.size());
  t.ffd = ids;
  for (int v = 0; v < m; ++v) {
    if (o.y[v]) t.gateways.push_back(ids[v]);
    if (o.parent[v] >= 0) t.parents[ids[v]] = ids[o.parent[v]];
  }
  for (int v = 0; v < m; ++v) {
    std::vector<int> chain{ids[v]};
    int cur = v;
    while (o.parent[cur] >= 0) {
      cur = o.parent[cur];
      chain.push_back(ids[cur]);
    }
    t.gateway_of[ids[v]] = ids[cur];
    t.hop[ids[v]] = static_cast<int>(chain.size());
    std::sort(chain.begin(), chain.end());
    t.ancestors[ids[v]] = std::move(chain);
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

struct Decided {
  bool decided = true;
  GatewaySearch::Outcome outcome;
};

// Runs the gateway search for the requested objective.  `decided` is false
// when capacity blocked a gateway set that could have beaten the answer.
Decided combinatorial(GatewaySearch& search, const BackboneParams& p, BackboneObjective objective) {
  auto certain = [](const GatewaySearch::Outcome& o) {
    if (o.status == ilp::SolveStatus::optimal) return o.blocked >= o.cost;
    if (o.status == ilp::SolveStatus::infeasible) return o.blocked == std::numeric_limits<long long>::max();
    return true;
  };
  if (p.gw_budget) {
    GatewaySearch::Outcome o = search.solve_fixed(*p.gw_budget);
    return {certain(o), o};
  }
  if (objective == BackboneObjective::min_gateways) {
    for (int k = std::max(1, search.components()); k <= search.size(); ++k) {
      GatewaySearch::Outcome o = search.solve_fixed(k);
      if (!certain(o)) return {false, o};
      if (o.status != ilp::SolveStatus::infeasible) return {true, o};
    }
    return {true, {}};
  }
  // Σ h over every gateway count: lowest cost, then smallest y vector.
  Decided out;
  out.outcome.status = ilp::SolveStatus::infeasible;
  for (int k = std::max(1, search.components()); k <= search.size(); ++k) {
    GatewaySearch::Outcome o = search.solve_fixed(k);
    if (!certain(o)) return {false, o};
    if (o.status == ilp::SolveStatus::node_limit || o.status == ilp::SolveStatus::time_limit) return {true, o};
    if (o.status != ilp::SolveStatus::optimal) continue;
    const bool better = out.outcome.status != ilp::SolveStatus::optimal || o.cost < out.outcome.cost ||
                        (o.cost == out.outcome.cost && o.y < out.outcome.y);
    if (better) out.outcome = std::move(o);
  }
  return out;
}

}  // namespace

BackboneResult solve_backbone(const WirelessLinkSet& w, std::span<const int> ffd, const TrafficVector& f,
                              const BackboneParams& p, BackboneObjective objective,
                              const ilp::SolveLimits& limits, BackboneMethod method) {
  if (!(limits.max_nodes > 0) || !(limits.max_seconds > 0.0)) {
    throw std::invalid_argument("solve_backbone: limits must be positive");
  }
  const auto start = Clock::now();
  BackboneResult result;
  result.model = build_backbone_model(w, ffd, f, p, objective);
  auto finish = [&] {
    result.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return std::move(result);
  };

  const bool comb_supported = objective != BackboneObjective::min_links;
  if (method == BackboneMethod::combinatorial && !comb_supported) {
    throw std::invalid_argument("solve_backbone: min_links needs the generic solver");
  }
  if (method != BackboneMethod::generic && comb_supported) {
    GatewaySearch search(w, result.model.nodes, f, p, limits, start);
    Decided d = combinatorial(search, p, objective);
    result.nodes = search.nodes();
    if (d.decided) {
      result.method_used = BackboneMethod::combinatorial;
      result.status = d.outcome.status;
      if (d.outcome.status == ilp::SolveStatus::optimal) {
        BackboneTopology t = topology_from(result.model.nodes, d.outcome);
        ilp::Assignment a = encode_topology(result.model, t);
        const auto violations = ilp::check(result.model.model, a);
        if (!violations.empty()) {
          throw std::logic_error("solve_backbone: search result violates " + violations.front().tag);
        }
        result.objective = ilp::objective_value(result.model.model, a);
        result.assignment = std::move(a);
        result.topology = std::move(t);
      }
      return finish();
    }
    if (method == BackboneMethod::combinatorial) {
      throw std::runtime_error("solve_backbone: capacity rows bind; the gateway search cannot certify");
    }
  }

  ilp::SolveLimits left = limits;
  left.max_nodes = std::max<std::int64_t>(1, limits.max_nodes - result.nodes);
  left.max_seconds =
      std::max(1e-3, limits.max_seconds - std::chrono::duration<double>(Clock::now() - start).count());
  ilp::SolveReport report = ilp::solve(result.model.model, left);
  result.method_used = BackboneMethod::generic;
  result.nodes += report.nodes;
  result.status = report.status;
  if (report.status == ilp::SolveStatus::optimal) {
    result.topology = extract_topology(result.model, *report.assignment);
    result.objective = report.objective;
    result.assignment = std::move(report.assignment);
  }
  return finish();
}

}  // namespace parkmesh::backbone
