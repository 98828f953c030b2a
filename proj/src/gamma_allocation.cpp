#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "parkmesh/coverage.hpp"
#include "parkmesh/errors.hpp"

namespace parkmesh::coverage {

namespace {

constexpr double kCountTol = 1e-9;

// Successive-shortest-path min-cost flow with integer capacities and costs.
class MinCostFlow {
 public:
  explicit MinCostFlow(int nodes) : adj_(nodes) {}

  int add_arc(int from, int to, int cap, long long cost) {
    adj_[from].push_back(static_cast<int>(arcs_.size()));
    arcs_.push_back({to, cap, cost});
    adj_[to].push_back(static_cast<int>(arcs_.size()));
    arcs_.push_back({from, 0, -cost});
    return static_cast<int>(arcs_.size()) - 2;
  }

  int flow_on(int arc) const { return arcs_[arc ^ 1].cap; }

  // Pushes up to `demand` units; returns the amount pushed.
  int run(int source, int sink, int demand) {
    const int n = static_cast<int>(adj_.size());
    int pushed = 0;
    std::vector<long long> dist(n);
    std::vector<int> via(n);
    std::vector<char> in_queue(n);
    while (pushed < demand) {
      std::fill(dist.begin(), dist.end(), std::numeric_limits<long long>::max());
      std::fill(via.begin(), via.end(), -1);
      dist[source] = 0;
      std::deque<int> queue{source};
      in_queue.assign(n, 0);
      in_queue[source] = 1;
      while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        in_queue[v] = 0;
        for (int a : adj_[v]) {
          const Arc& arc = arcs_[a];
          if (arc.cap <= 0) continue;
          const long long nd = dist[v] + arc.cost;
          if (nd < dist[arc.to]) {
            dist[arc.to] = nd;
            via[arc.to] = a;
            if (!in_queue[arc.to]) {
              in_queue[arc.to] = 1;
              queue.push_back(arc.to);
            }
          }
        }
      }
      if (via[sink] < 0) break;
      int amount = demand - pushed;
      for (int v = sink; v != source; v = arcs_[via[v] ^ 1].to) {
        amount = std::min(amount, arcs_[via[v]].cap);
      }
      for (int v = sink; v != source; v = arcs_[via[v] ^ 1].to) {
        arcs_[via[v]].cap -= amount;
        arcs_[via[v] ^ 1].cap += amount;
      }
      pushed += amount;
    }
    return pushed;
  }

 private:
  struct Arc {
    int to;
    int cap;
    long long cost;
  };
  std::vector<std::vector<int>> adj_;
  std::vector<Arc> arcs_;
};

}  // namespace

SegmentSensors segment_sensors(const RoadSegment& seg) {
  if (!seg.parking) return {};
  const double load = seg.sensor_load();
  const int whole = static_cast<int>(std::floor(load + kCountTol));
  double rem = load - whole;
  if (rem < kCountTol) rem = 0.0;
  return {whole, rem};
}

int sensor_count(double gamma_m, double density_per_m) {
  if (gamma_m <= 0.0 || density_per_m <= 0.0) return 0;
  return static_cast<int>(std::floor(gamma_m * density_per_m + kCountTol));
}

double end_energy(int k) { return 0.5 * k * (k + 1.0); }

double total_energy(const SensorCounts& counts) {
  double sum = 0.0;
  for (int k : counts.k) sum += end_energy(k);
  return sum;
}

double single_end_energy(const RoadSegment& seg) { return end_energy(segment_sensors(seg).whole); }

double shared_energy(const RoadSegment& seg) {
  const int s = segment_sensors(seg).whole;
  return end_energy(s / 2) + end_energy(s - s / 2);
}

double GammaAssignment::at(const StreetGraph& g, int from, int to) const {
  auto s = g.find_segment(from, to);
  if (!s) return 0.0;
  return managed_m[end_index(g.segment(*s), *s, from)];
}

int SensorCounts::at(const StreetGraph& g, int from, int to) const {
  auto s = g.find_segment(from, to);
  if (!s) return 0;
  return k[end_index(g.segment(*s), *s, from)];
}

int SensorCounts::node_total(const StreetGraph& g, int node) const {
  int sum = 0;
  for (int s : g.incident(node)) sum += k[end_index(g.segment(s), s, node)];
  return sum;
}

bool is_cover(const StreetGraph& g, std::span<const int> ffd) {
  std::vector<char> on(g.node_count(), 0);
  for (int i : ffd) on.at(static_cast<std::size_t>(i)) = 1;
  for (const RoadSegment& seg : g.segments()) {
    if (seg.parking && !on[seg.u] && !on[seg.v]) return false;
  }
  return true;
}

std::optional<Allocation> try_allocate_gamma(const StreetGraph& g, std::span<const int> ffd,
                                             const CoverageParams& p) {
  const int n = static_cast<int>(g.node_count());
  const int segs = static_cast<int>(g.segment_count());
  std::vector<char> on(n, 0);
  for (int i : ffd) {
    if (i < 0 || i >= n) throw std::out_of_range("allocate_gamma: FFD id out of range");
    on[i] = 1;
  }
  const double cap_ns = p.max_sensors_per_ffd;

  Allocation out;
  out.gamma.managed_m.assign(2 * segs, 0.0);
  out.counts.k.assign(2 * segs, 0);
  out.node_load.assign(n, 0.0);

  // Loads that do not depend on the split: sole-covered segments and the
  // fractional remainder shared between two FFD ends.
  std::vector<double> fixed(n, 0.0);
  std::vector<int> shared;
  for (int s = 0; s < segs; ++s) {
    const RoadSegment& seg = g.segment(s);
    if (!seg.parking) continue;
    const SegmentSensors ss = segment_sensors(seg);
    if (!on[seg.u] && !on[seg.v]) return std::nullopt;
    if (on[seg.u] && on[seg.v]) {
      shared.push_back(s);
      fixed[seg.u] += ss.remainder / 2;
      fixed[seg.v] += ss.remainder / 2;
    } else {
      const int owner = on[seg.u] ? seg.u : seg.v;
      fixed[owner] += ss.whole + ss.remainder;
    }
  }
  std::vector<int> capacity(n, 0);
  for (int i = 0; i < n; ++i) {
    if (!on[i]) continue;
    const double room = cap_ns - fixed[i];
    if (room < -kCountTol) return std::nullopt;
    capacity[i] = static_cast<int>(std::floor(room + kCountTol));
  }

  // Flow network: source -> shared segment -> FFD end -> sink.  The k-th
  // sensor handed to an end costs k, the marginal of ½k(k+1).
  const int source = 0;
  const int seg_base = 1;
  const int node_base = seg_base + static_cast<int>(shared.size());
  const int sink = node_base + n;
  MinCostFlow flow(sink + 1);
  int demand = 0;
  std::vector<std::vector<int>> unit_arcs(2 * shared.size());
  for (std::size_t idx = 0; idx < shared.size(); ++idx) {
    const RoadSegment& seg = g.segment(shared[idx]);
    const int whole = segment_sensors(seg).whole;
    demand += whole;
    flow.add_arc(source, seg_base + static_cast<int>(idx), whole, 0);
    const int ends[2] = {seg.u, seg.v};
    for (int e = 0; e < 2; ++e) {
      const int limit = std::min(whole, capacity[ends[e]]);
      for (int k = 1; k <= limit; ++k) {
        unit_arcs[2 * idx + e].push_back(
            flow.add_arc(seg_base + static_cast<int>(idx), node_base + ends[e], 1, k));
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    if (on[i] && capacity[i] > 0) flow.add_arc(node_base + i, sink, capacity[i], 0);
  }
  if (demand > 0 && flow.run(source, sink, demand) < demand) return std::nullopt;

  for (int s = 0; s < segs; ++s) {
    const RoadSegment& seg = g.segment(s);
    if (!seg.parking || (on[seg.u] && on[seg.v])) continue;
    const SegmentSensors ss = segment_sensors(seg);
    const int owner = on[seg.u] ? seg.u : seg.v;
    const int e = end_index(seg, s, owner);
    out.gamma.managed_m[e] = seg.length_m;
    out.counts.k[e] = ss.whole;
  }
  for (std::size_t idx = 0; idx < shared.size(); ++idx) {
    const int s = shared[idx];
    const RoadSegment& seg = g.segment(s);
    const SegmentSensors ss = segment_sensors(seg);
    int k_u = 0;
    for (int a : unit_arcs[2 * idx]) k_u += flow.flow_on(a);
    const int k_v = ss.whole - k_u;
    // Γ snaps to sensor boundaries; the fractional remainder is split evenly.
    double gamma_u = seg.length_m / 2;
    if (seg.density_per_m > 0.0) gamma_u = (k_u + ss.remainder / 2) / seg.density_per_m;
    gamma_u = std::clamp(gamma_u, 0.0, seg.length_m);
    out.gamma.managed_m[2 * s] = gamma_u;
    out.gamma.managed_m[2 * s + 1] = seg.length_m - gamma_u;
    out.counts.k[2 * s] = k_u;
    out.counts.k[2 * s + 1] = k_v;
  }
  for (int s = 0; s < segs; ++s) {
    const RoadSegment& seg = g.segment(s);
    out.node_load[seg.u] += out.gamma.managed_m[2 * s] * seg.density_per_m;
    out.node_load[seg.v] += out.gamma.managed_m[2 * s + 1] * seg.density_per_m;
  }
  out.energy = total_energy(out.counts);
  return out;
}

Allocation allocate_gamma(const StreetGraph& g, std::span<const int> ffd, const CoverageParams& p) {
  if (!is_cover(g, ffd)) throw InfeasibleError("allocate_gamma: FFD set leaves a parking segment uncovered");
  auto alloc = try_allocate_gamma(g, ffd, p);
  if (!alloc) {
    throw InfeasibleError("allocate_gamma: M_ns = " + std::to_string(p.max_sensors_per_ffd) +
                          " exceeded with no feasible split");
  }
  return *std::move(alloc);
}

}  // namespace parkmesh::coverage
