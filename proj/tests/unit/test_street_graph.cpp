#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "parkmesh/errors.hpp"
#include "parkmesh/street_graph.hpp"

using namespace parkmesh;

namespace {

std::string two_node_doc(double length) {
  return R"({"nodes":[{"id":0,"x":0,"y":0},{"id":1,"x":100,"y":0}],
             "edges":[{"u":0,"v":1,"length_m":)" +
         std::to_string(length) + R"(,"density_per_m":0.1,"parking":true}]})";
}

}  // namespace

TEST_SUITE("streetgraph") {

TEST_CASE("parse a single segment") {
  const StreetGraph g = parse_street_graph(two_node_doc(100));
  CHECK(g.node_count() == 2);
  CHECK(g.segment_count() == 1);
  CHECK(g.d_max() == 100.0);
  CHECK(g.segment(0).sensor_load() == doctest::Approx(10.0));
}

TEST_CASE("parse rejects invalid documents") {
  CHECK_THROWS_WITH_AS(parse_street_graph(two_node_doc(-5)), doctest::Contains("negative length"), ParseError);
  CHECK_THROWS_AS(parse_street_graph("{"), ParseError);
  CHECK_THROWS_AS(parse_street_graph("[]"), ParseError);
  // Missing required field.
  CHECK_THROWS_WITH_AS(parse_street_graph(R"({"nodes":[{"id":0,"x":0,"y":0},{"id":1,"x":1,"y":0}],
      "edges":[{"u":0,"v":1,"length_m":5,"parking":true}]})"),
                       doctest::Contains("density_per_m"), ParseError);
  CHECK_THROWS_WITH_AS(parse_street_graph(R"({"nodes":[{"id":0,"x":0,"y":0},{"id":0,"x":1,"y":0}],
      "edges":[{"u":0,"v":1,"length_m":5,"density_per_m":0.1,"parking":true}]})"),
                       doctest::Contains("duplicate intersection"), ParseError);
  CHECK_THROWS_WITH_AS(parse_street_graph(R"({"nodes":[{"id":0,"x":0,"y":0},{"id":1,"x":1,"y":0}],
      "edges":[{"u":1,"v":1,"length_m":5,"density_per_m":0.1,"parking":true}]})"),
                       doctest::Contains("self-loop"), ParseError);
  CHECK_THROWS_WITH_AS(parse_street_graph(R"({"nodes":[{"id":0,"x":0,"y":0},{"id":1,"x":1,"y":0}],
      "edges":[{"u":0,"v":1,"length_m":5,"density_per_m":-0.1,"parking":true}]})"),
                       doctest::Contains("negative density"), ParseError);
  CHECK_THROWS_WITH_AS(parse_street_graph(R"({"nodes":[{"id":0,"x":0,"y":0},{"id":1,"x":1,"y":0},
      {"id":2,"x":2,"y":0},{"id":3,"x":3,"y":0}],
      "edges":[{"u":0,"v":1,"length_m":5,"density_per_m":0.1,"parking":true},
               {"u":2,"v":3,"length_m":5,"density_per_m":0.1,"parking":true}]})"),
                       doctest::Contains("disconnected"), ParseError);
  CHECK_THROWS_WITH_AS(parse_street_graph(R"({"nodes":[{"id":0,"x":0,"y":0},{"id":1,"x":1,"y":0}],
      "edges":[{"u":0,"v":1,"length_m":5,"density_per_m":0.1,"parking":true},
               {"u":1,"v":0,"length_m":6,"density_per_m":0.1,"parking":true}]})"),
                       doctest::Contains("duplicate segment"), ParseError);
}

TEST_CASE("serialize then parse is the identity") {
  const StreetGraph g = parse_street_graph(two_node_doc(42.5));
  const StreetGraph h = parse_street_graph(serialize_street_graph(g));
  CHECK(h.node_count() == g.node_count());
  CHECK(h.segment(0).length_m == g.segment(0).length_m);
  CHECK(h.segment(0).density_per_m == g.segment(0).density_per_m);
  CHECK(serialize_street_graph(h) == serialize_street_graph(g));
}

TEST_CASE("the three-spine fixture loads with its non-parking connector") {
  const StreetGraph g = load_street_graph(PARKMESH_FIXTURE_DIR "/three_spine.json");
  CHECK(g.node_count() == 10);
  CHECK(g.segment_count() == 10);
  CHECK(g.parking_segments().size() == 9);
  CHECK(g.intersections()[0].label == "hub");
}

TEST_CASE("gen_grid sizes") {
  const StreetGraph g22 = gen_grid(2, 2, 100, 0.1);
  CHECK(g22.node_count() == 4);
  CHECK(g22.segment_count() == 4);
  CHECK(g22.d_max() == 100.0);
  const StreetGraph g13 = gen_grid(1, 3, 50, 0.2);
  CHECK(g13.node_count() == 3);
  CHECK(g13.segment_count() == 2);
  CHECK(gen_grid(5, 5, 100, 0.1).segment_count() == 40);
  for (int r = 1; r <= 6; ++r) {
    for (int c = 1; c <= 6; ++c) {
      if (r * c < 2) continue;
      const StreetGraph g = gen_grid(r, c, 80, 0.1);
      CHECK(g.node_count() == static_cast<std::size_t>(r * c));
      CHECK(g.segment_count() == static_cast<std::size_t>(r * (c - 1) + c * (r - 1)));
    }
  }
  CHECK_THROWS_AS(gen_grid(1, 1, 100, 0.1), std::invalid_argument);
}

TEST_CASE("wireless links by distance") {
  const StreetGraph g = gen_grid(2, 2, 100, 0.1);
  CHECK(derive_wireless_links(g, 100).link_count() == 4);
  // Sides at 100 m and diagonals at 141.42 m.
  int within = 0;
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) within += std::hypot(g.intersections()[a].x - g.intersections()[b].x,
                                                         g.intersections()[a].y - g.intersections()[b].y) <= 150;
  }
  CHECK(within == 6);
  CHECK(derive_wireless_links(g, 150).link_count() == 6);
  CHECK(derive_wireless_links(g, 99.9).link_count() == 0);
  CHECK(derive_wireless_links(g, 1e6, LinkMode::street).link_count() == 4);
  CHECK_THROWS(derive_wireless_links(g, 0));
}

TEST_CASE("link sets are symmetric and irreflexive") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const StreetGraph g = gen_grid(3, 4, 60 + 10 * (trial % 5), 0.1);
    const double range = std::uniform_real_distribution<double>(30, 250)(rng);
    const WirelessLinkSet w = derive_wireless_links(g, range);
    for (int a = 0; a < 12; ++a) {
      CHECK_FALSE(w.linked(a, a));
      for (int b = 0; b < 12; ++b) CHECK(w.linked(a, b) == w.linked(b, a));
    }
  }
}

TEST_CASE("connected components examples") {
  WirelessLinkSet pairs(4);
  pairs.link(0, 1);
  pairs.link(2, 3);
  const std::vector<int> all{0, 1, 2, 3};
  CHECK(connected_components(pairs, all).size() == 2);

  WirelessLinkSet path(3);
  path.link(0, 1);
  path.link(1, 2);
  const std::vector<int> ends{0, 2};
  const auto parts = connected_components(path, ends);
  REQUIRE(parts.size() == 2);
  CHECK(parts[0] == std::vector<int>{0});
  CHECK(parts[1] == std::vector<int>{2});

  WirelessLinkSet cycle(4);
  for (int i = 0; i < 4; ++i) cycle.link(i, (i + 1) % 4);
  CHECK(connected_components(cycle, all).size() == 1);
}

TEST_CASE("components form a partition and agree with the closure oracle") {
  std::mt19937 rng(11);
  const StreetGraph g = gen_grid(4, 4, 100, 0.1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> active;
    for (int i = 0; i < 16; ++i) {
      if (rng() % 2) active.push_back(i);
    }
    const WirelessLinkSet w = derive_wireless_links(g, trial % 2 ? 100 : 150);
    const auto parts = connected_components(w, active);
    std::multiset<int> seen;
    for (const auto& block : parts) {
      CHECK_FALSE(block.empty());
      seen.insert(block.begin(), block.end());
    }
    CHECK(std::vector<int>(seen.begin(), seen.end()) == active);
    CHECK(static_cast<int>(parts.size()) == oracle::closure_components(w, active));
  }
}

TEST_CASE("component count does not grow with radio range") {
  std::mt19937 rng(3);
  const StreetGraph g = gen_grid(5, 5, 100, 0.1);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<int> active;
    for (int i = 0; i < 25; ++i) {
      if (rng() % 3 == 0) active.push_back(i);
    }
    std::size_t prev = active.size() + 1;
    for (double range = 50; range <= 450; range += 25) {
      const std::size_t c = connected_components(derive_wireless_links(g, range), active).size();
      CHECK(c <= prev);
      prev = c;
    }
  }
}

}
