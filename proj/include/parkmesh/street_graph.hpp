#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace parkmesh {

struct Intersection {
  int id = 0;
  double x = 0.0;  // meters
  double y = 0.0;  // meters
  std::string label;
};

struct RoadSegment {
  int u = 0;  // endpoints, stored with u < v
  int v = 0;
  double length_m = 0.0;
  double density_per_m = 0.0;
  bool parking = true;

  // Sensor load d * rho, the number of sensors on the segment before flooring.
  double sensor_load() const { return length_m * density_per_m; }
  int other(int end) const { return end == u ? v : u; }
};

// Street-parking graph: intersections plus road segments.  Immutable once
// built; the constructor validates every invariant and throws ParseError.
class StreetGraph {
 public:
  StreetGraph(std::vector<Intersection> intersections,
              std::vector<RoadSegment> segments);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t segment_count() const { return segments_.size(); }
  const std::vector<Intersection>& intersections() const { return nodes_; }
  const std::vector<RoadSegment>& segments() const { return segments_; }
  const RoadSegment& segment(std::size_t s) const { return segments_[s]; }

  // Longest segment length; every Γ is bounded by it.
  double d_max() const { return d_max_; }

  // Segment indices incident to node i, ascending.
  const std::vector<int>& incident(int i) const { return incident_[i]; }
  std::optional<int> find_segment(int a, int b) const;
  double distance(int a, int b) const;

  // Parking segments drive coverage; the rest are kept for geometry only.
  std::vector<int> parking_segments() const;

 private:
  std::vector<Intersection> nodes_;
  std::vector<RoadSegment> segments_;
  std::vector<std::vector<int>> incident_;
  double d_max_ = 0.0;
};

StreetGraph parse_street_graph(std::string_view text);
StreetGraph load_street_graph(const std::string& path);
std::string serialize_street_graph(const StreetGraph& g);

// rows x cols lattice with row-major ids; every lattice edge is a parking
// segment of the given length and density.
StreetGraph gen_grid(int rows, int cols, double edge_len_m, double density_per_m);

enum class LinkMode { euclidean, street };

// Symmetric, irreflexive radio-feasibility relation over intersection ids.
class WirelessLinkSet {
 public:
  explicit WirelessLinkSet(std::size_t node_count);

  void link(int a, int b);
  bool linked(int a, int b) const { return matrix_[index(a, b)] != 0; }
  const std::vector<int>& neighbors(int a) const { return adjacency_[a]; }
  std::size_t node_count() const { return n_; }
  std::size_t link_count() const { return links_; }

 private:
  std::size_t index(int a, int b) const {
    return static_cast<std::size_t>(a) * n_ + static_cast<std::size_t>(b);
  }
  std::size_t n_;
  std::size_t links_ = 0;
  std::vector<char> matrix_;
  std::vector<std::vector<int>> adjacency_;
};

// Euclidean mode links every pair within radio_range_m; street mode links
// the endpoints of every segment and ignores the range.
WirelessLinkSet derive_wireless_links(const StreetGraph& g, double radio_range_m,
                                      LinkMode mode = LinkMode::euclidean);

// Partition of `active` into blocks connected through links whose endpoints
// are both active.  Blocks are sorted ascending and ordered by first element.
std::vector<std::vector<int>> connected_components(const WirelessLinkSet& w,
                                                   std::span<const int> active);

std::string_view to_string(LinkMode mode);
LinkMode parse_link_mode(std::string_view text);

}  // namespace parkmesh
