#include "parkmesh/street_graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "parkmesh/errors.hpp"

namespace parkmesh {

namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key, const char* where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(std::string(where) + ": missing required field '" + key + "'");
  }
  return *it;
}

double require_number(const json& obj, const char* key, const char* where) {
  const json& v = require(obj, key, where);
  if (!v.is_number()) {
    throw ParseError(std::string(where) + ": field '" + key + "' must be a number");
  }
  return v.get<double>();
}

int require_int(const json& obj, const char* key, const char* where) {
  const json& v = require(obj, key, where);
  if (!v.is_number_integer()) {
    throw ParseError(std::string(where) + ": field '" + key + "' must be an integer");
  }
  return v.get<int>();
}

// Union-find over node ids, used for the parking-connectivity check.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};

}  // namespace

StreetGraph::StreetGraph(std::vector<Intersection> intersections,
                         std::vector<RoadSegment> segments)
    : nodes_(std::move(intersections)), segments_(std::move(segments)) {
  const int n = static_cast<int>(nodes_.size());
  if (n == 0) throw ParseError("street graph has no intersections");
  for (int i = 0; i < n; ++i) {
    if (nodes_[i].id != i) {
      throw ParseError("intersection ids must be contiguous from 0 (expected " +
                       std::to_string(i) + ", found " + std::to_string(nodes_[i].id) + ")");
    }
    if (!std::isfinite(nodes_[i].x) || !std::isfinite(nodes_[i].y)) {
      throw ParseError("intersection " + std::to_string(i) + " has non-finite coordinates");
    }
  }
  if (segments_.empty()) throw ParseError("street graph has no segments");

  std::set<std::pair<int, int>> seen;
  incident_.assign(n, {});
  for (std::size_t s = 0; s < segments_.size(); ++s) {
    RoadSegment& seg = segments_[s];
    const std::string where = "segment " + std::to_string(s);
    if (seg.u < 0 || seg.u >= n || seg.v < 0 || seg.v >= n) {
      throw ParseError(where + ": endpoint out of range");
    }
    if (seg.u == seg.v) throw ParseError(where + ": self-loop at node " + std::to_string(seg.u));
    if (seg.u > seg.v) std::swap(seg.u, seg.v);
    if (!std::isfinite(seg.length_m) || seg.length_m < 0.0) {
      throw ParseError(where + ": negative length");
    }
    if (seg.length_m == 0.0) throw ParseError(where + ": zero length");
    if (!std::isfinite(seg.density_per_m) || seg.density_per_m < 0.0) {
      throw ParseError(where + ": negative density");
    }
    if (!seg.parking && seg.density_per_m > 0.0) {
      throw ParseError(where + ": non-parking segment with nonzero sensor density");
    }
    if (!seen.emplace(seg.u, seg.v).second) {
      throw ParseError(where + ": duplicate segment between " + std::to_string(seg.u) +
                       " and " + std::to_string(seg.v));
    }
    incident_[seg.u].push_back(static_cast<int>(s));
    incident_[seg.v].push_back(static_cast<int>(s));
    d_max_ = std::max(d_max_, seg.length_m);
  }

  DisjointSets sets(n);
  std::vector<char> touched(n, 0);
  for (const RoadSegment& seg : segments_) {
    if (!seg.parking) continue;
    sets.unite(seg.u, seg.v);
    touched[seg.u] = touched[seg.v] = 1;
  }
  int root = -1;
  for (int i = 0; i < n; ++i) {
    if (!touched[i]) continue;
    if (root < 0) root = sets.find(i);
    if (sets.find(i) != root) {
      throw ParseError("parking subgraph is disconnected (node " + std::to_string(i) +
                       " unreachable from node " + std::to_string(root) + ")");
    }
  }
}

std::optional<int> StreetGraph::find_segment(int a, int b) const {
  for (int s : incident_[a]) {
    if (segments_[s].other(a) == b) return s;
  }
  return std::nullopt;
}

double StreetGraph::distance(int a, int b) const {
  return std::hypot(nodes_[a].x - nodes_[b].x, nodes_[a].y - nodes_[b].y);
}

std::vector<int> StreetGraph::parking_segments() const {
  std::vector<int> out;
  for (std::size_t s = 0; s < segments_.size(); ++s) {
    if (segments_[s].parking) out.push_back(static_cast<int>(s));
  }
  return out;
}

StreetGraph parse_street_graph(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed street graph document: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("street graph document must be an object");
  const json& nodes = require(doc, "nodes", "document");
  const json& edges = require(doc, "edges", "document");
  if (!nodes.is_array() || !edges.is_array()) {
    throw ParseError("'nodes' and 'edges' must be arrays");
  }

  std::vector<Intersection> inters;
  std::set<int> ids;
  for (const json& nd : nodes) {
    if (!nd.is_object()) throw ParseError("node entries must be objects");
    Intersection it;
    it.id = require_int(nd, "id", "node");
    it.x = require_number(nd, "x", "node");
    it.y = require_number(nd, "y", "node");
    if (auto lbl = nd.find("label"); lbl != nd.end() && !lbl->is_null()) {
      if (!lbl->is_string()) throw ParseError("node: field 'label' must be a string");
      it.label = lbl->get<std::string>();
    }
    if (!ids.insert(it.id).second) {
      throw ParseError("duplicate intersection id " + std::to_string(it.id));
    }
    inters.push_back(std::move(it));
  }
  std::sort(inters.begin(), inters.end(),
            [](const Intersection& a, const Intersection& b) { return a.id < b.id; });

  std::vector<RoadSegment> segs;
  for (const json& ed : edges) {
    if (!ed.is_object()) throw ParseError("edge entries must be objects");
    RoadSegment s;
    s.u = require_int(ed, "u", "edge");
    s.v = require_int(ed, "v", "edge");
    s.length_m = require_number(ed, "length_m", "edge");
    s.density_per_m = require_number(ed, "density_per_m", "edge");
    const json& park = require(ed, "parking", "edge");
    if (!park.is_boolean()) throw ParseError("edge: field 'parking' must be a boolean");
    s.parking = park.get<bool>();
    segs.push_back(s);
  }
  return StreetGraph(std::move(inters), std::move(segs));
}

StreetGraph load_street_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open street graph file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_street_graph(buf.str());
}

std::string serialize_street_graph(const StreetGraph& g) {
  json doc;
  doc["nodes"] = json::array();
  for (const Intersection& it : g.intersections()) {
    json nd = {{"id", it.id}, {"x", it.x}, {"y", it.y}};
    if (!it.label.empty()) nd["label"] = it.label;
    doc["nodes"].push_back(std::move(nd));
  }
  doc["edges"] = json::array();
  for (const RoadSegment& s : g.segments()) {
    doc["edges"].push_back({{"u", s.u},
                            {"v", s.v},
                            {"length_m", s.length_m},
                            {"density_per_m", s.density_per_m},
                            {"parking", s.parking}});
  }
  return doc.dump(2) + "\n";
}

StreetGraph gen_grid(int rows, int cols, double edge_len_m, double density_per_m) {
  if (rows < 1 || cols < 1 || rows * cols < 2) {
    throw std::invalid_argument("gen_grid: zero-area grid (rows*cols must be at least 2)");
  }
  if (!(edge_len_m > 0.0)) throw std::invalid_argument("gen_grid: edge length must be positive");
  if (density_per_m < 0.0) throw std::invalid_argument("gen_grid: density must be nonnegative");

  std::vector<Intersection> nodes;
  nodes.reserve(static_cast<std::size_t>(rows * cols));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      nodes.push_back({r * cols + c, c * edge_len_m, r * edge_len_m, {}});
    }
  }
  std::vector<RoadSegment> segs;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int id = r * cols + c;
      if (c + 1 < cols) segs.push_back({id, id + 1, edge_len_m, density_per_m, true});
      if (r + 1 < rows) segs.push_back({id, id + cols, edge_len_m, density_per_m, true});
    }
  }
  return StreetGraph(std::move(nodes), std::move(segs));
}

WirelessLinkSet::WirelessLinkSet(std::size_t node_count)
    : n_(node_count), matrix_(node_count * node_count, 0), adjacency_(node_count) {}

void WirelessLinkSet::link(int a, int b) {
  if (a == b) throw std::invalid_argument("wireless links are irreflexive");
  if (linked(a, b)) return;
  matrix_[index(a, b)] = matrix_[index(b, a)] = 1;
  auto insert_sorted = [](std::vector<int>& v, int x) {
    v.insert(std::lower_bound(v.begin(), v.end(), x), x);
  };
  insert_sorted(adjacency_[a], b);
  insert_sorted(adjacency_[b], a);
  ++links_;
}

WirelessLinkSet derive_wireless_links(const StreetGraph& g, double radio_range_m, LinkMode mode) {
  WirelessLinkSet w(g.node_count());
  if (mode == LinkMode::street) {
    for (const RoadSegment& s : g.segments()) w.link(s.u, s.v);
    return w;
  }
  if (!(radio_range_m > 0.0)) throw std::invalid_argument("radio range must be positive");
  const int n = static_cast<int>(g.node_count());
  const double tol = 1e-9 * std::max(1.0, radio_range_m);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (g.distance(i, j) <= radio_range_m + tol) w.link(i, j);
    }
  }
  return w;
}

std::vector<std::vector<int>> connected_components(const WirelessLinkSet& w,
                                                   std::span<const int> active) {
  const std::size_t n = w.node_count();
  std::vector<char> on(n, 0), seen(n, 0);
  for (int a : active) {
    if (a < 0 || static_cast<std::size_t>(a) >= n) {
      throw std::out_of_range("connected_components: id out of range");
    }
    on[a] = 1;
  }
  std::vector<std::vector<int>> blocks;
  for (std::size_t start = 0; start < n; ++start) {
    if (!on[start] || seen[start]) continue;
    std::vector<int> block;
    std::vector<int> stack{static_cast<int>(start)};
    seen[start] = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      block.push_back(v);
      for (int u : w.neighbors(v)) {
        if (on[u] && !seen[u]) {
          seen[u] = 1;
          stack.push_back(u);
        }
      }
    }
    std::sort(block.begin(), block.end());
    blocks.push_back(std::move(block));
  }
  return blocks;
}

std::string_view to_string(LinkMode mode) {
  return mode == LinkMode::street ? "street" : "euclidean";
}

LinkMode parse_link_mode(std::string_view text) {
  if (text == "street") return LinkMode::street;
  if (text == "euclidean") return LinkMode::euclidean;
  throw std::invalid_argument("unknown link mode '" + std::string(text) + "'");
}

}  // namespace parkmesh
