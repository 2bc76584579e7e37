#include <doctest.h>

#include <cmath>
#include <random>

#include "hmass/decomp.hpp"
#include "hmass/errors.hpp"
#include "oracles.hpp"

using namespace hmass;

namespace {

PolyChain1 y_shape() {
  PolyChain1 c{2, {}};
  c.add({0, 0}, {1, 0}, 2);
  c.add({1, 0}, {2, 1}, 1);
  c.add({1, 0}, {2, -1}, 1);
  return c;
}

PolyChain1 square(double m = 1.0) {
  PolyChain1 c{2, {}};
  c.add({0, 0}, {1, 0}, m);
  c.add({1, 0}, {1, 1}, m);
  c.add({1, 1}, {0, 1}, m);
  c.add({0, 1}, {0, 0}, m);
  return c;
}

}  // namespace

TEST_CASE("graph construction") {
  auto y = build_graph(y_shape());
  CHECK(y.nodes.size() == 4);
  CHECK(y.arcs.size() == 3);
  auto sq = build_graph(square());
  CHECK(sq.nodes.size() == 4);
  CHECK(sq.arcs.size() == 4);
  for (double d : sq.defect()) CHECK(d == 0.0);
  PolyChain1 two{2, {}};
  two.add({0, 0}, {1, 0}, 1);
  two.add({0, 2}, {1, 2}, 1);
  auto g = build_graph(two);
  CHECK(g.nodes.size() == 4);
  CHECK(g.arcs.size() == 2);
  CHECK(g.boundary().atoms.size() == 4);
  for (const auto& a : g.arcs) CHECK(a.mult > 0);
}

TEST_CASE("points closer than the tolerance but not merged are rejected") {
  PolyChain1 c{2, {}};
  c.add({0, 0}, {1, 0}, 1);
  c.add({1 + 5e-10, 0}, {2, 0}, 1);
  CHECK_NOTHROW(build_graph(c));  // merged into one vertex
  c.add({1 + 1.5e-9, 0}, {1 + 1.5e-9, 1}, 1);
  CHECK_THROWS_AS(build_graph(c), InputError);
}

TEST_CASE("decomposition of a segment, a loop and the Y-shape") {
  PolyChain1 s{2, {}};
  s.add({0, 0}, {1, 0}, 3);
  auto d = decompose(build_graph(s));
  REQUIRE(d.paths.size() == 1);
  CHECK(d.paths[0].weight == 3.0);
  CHECK(d.cycles.empty());

  auto dl = decompose(build_graph(square(4)));
  CHECK(dl.paths.empty());
  REQUIRE(dl.cycles.size() == 1);
  CHECK(dl.cycles[0].weight == 4.0);
  CHECK(dl.cycles[0].points.front() == dl.cycles[0].points.back());

  auto g = build_graph(y_shape());
  auto dy = decompose(g);
  REQUIRE(dy.paths.size() == 2);
  CHECK(dy.cycles.empty());
  for (const auto& p : dy.paths) {
    CHECK(p.weight == 1.0);
    CHECK(p.points.size() == 3);
    CHECK(p.points[1] == Point{1, 0});
  }
  CHECK(dy.mass() == doctest::Approx(2 + 2 * std::sqrt(2.0)).epsilon(1e-15));
  CHECK(dy.residual == 0.0);
}

TEST_CASE("conservation, mass and boundary additivity on random chains") {
  std::mt19937_64 rng(21);
  for (int it = 0; it < 200; ++it) {
    auto c = oracle::random_chain(rng, 6, 7);
    auto g = build_graph(c);
    REQUIRE(g.nodes.size() <= 40);
    auto d = decompose(g);
    CHECK(d.residual < 1e-12);
    CHECK(oracle::reassembly_error(g, d) <= 1e-9);
    CHECK(d.mass() == doctest::Approx(g.mass()).epsilon(1e-12));
    Chain0 bd{2, {}};
    for (const auto& p : d.paths) {
      bd.add(p.points.back(), p.weight);
      bd.add(p.points.front(), -p.weight);
    }
    CHECK(approx_equal(canonicalize(bd), g.boundary(), {}, 1e-9));
    CHECK(d.paths.size() + d.cycles.size() <= g.arcs.size() + g.nodes.size());
    for (const auto& p : d.paths)
      for (std::size_t i = 0; i < p.nodes.size(); ++i)
        for (std::size_t j = i + 1; j < p.nodes.size(); ++j) CHECK(p.nodes[i] != p.nodes[j]);
  }
}

TEST_CASE("decomposition is deterministic") {
  std::mt19937_64 rng(22);
  auto g = build_graph(oracle::random_chain(rng, 8, 10));
  auto a = decompose(g), b = decompose(g);
  REQUIRE(a.paths.size() == b.paths.size());
  for (std::size_t i = 0; i < a.paths.size(); ++i) {
    CHECK(a.paths[i].nodes == b.paths[i].nodes);
    CHECK(a.paths[i].weight == b.paths[i].weight);
  }
}

TEST_CASE("acyclicity certificates") {
  CHECK(is_acyclic(build_graph(y_shape())).acyclic);
  auto sq = is_acyclic(build_graph(square()));
  CHECK_FALSE(sq.acyclic);
  CHECK(sq.cycle.size() == 5);
  CHECK(sq.cycle.front() == sq.cycle.back());
  PolyChain1 both = square();
  both.add({5, 5}, {6, 5}, 1);
  CHECK_FALSE(is_acyclic(build_graph(both)).acyclic);
}

TEST_CASE("acyclic part of a loop, an acyclic chain and an overlaid loop") {
  auto sl = acyclic_part(build_graph(square(3)));
  CHECK(sl.acyclic.arcs.empty());
  CHECK(mass(canonicalize(sl.cycles_removed)) == 12.0);

  auto gy = build_graph(y_shape());
  auto sy = acyclic_part(gy);
  CHECK(sy.cycles_removed.empty());
  CHECK(approx_equal(sy.acyclic.to_chain(), gy.to_chain()));

  // Segment of multiplicity 2 with a unit loop through it in the opposite
  // direction: on [0,1] x 0 the multiplicity becomes 1.
  PolyChain1 c{2, {}};
  c.add({0, 0}, {1, 0}, 2);
  c.add({1, 0}, {0, 0}, 1);
  c.add({0, 0}, {0, 1}, 1);
  c.add({0, 1}, {1, 1}, 1);
  c.add({1, 1}, {1, 0}, 1);
  auto g = build_graph(c);
  auto s = acyclic_part(g);
  std::vector<oracle::ArcSpec> arcs;
  for (const auto& a : g.arcs) arcs.push_back({a.tail, a.head, a.length, a.mult});
  const double lp = oracle::max_circulation_mass(g.nodes.size(), arcs);
  CHECK(mass(canonicalize(s.cycles_removed)) == doctest::Approx(lp).epsilon(1e-12));
  CHECK(is_acyclic(s.acyclic).acyclic);
  CHECK(approx_equal(s.acyclic.boundary(), g.boundary()));
}

TEST_CASE("acyclic part matches the circulation LP on random graphs") {
  std::mt19937_64 rng(23);
  for (int it = 0; it < 100; ++it) {
    auto g = build_graph(oracle::random_chain(rng, 6, 9));
    auto s = acyclic_part(g);
    std::vector<oracle::ArcSpec> arcs;
    for (const auto& a : g.arcs) arcs.push_back({a.tail, a.head, a.length, a.mult});
    const double lp = oracle::max_circulation_mass(g.nodes.size(), arcs);
    const double removed = mass(canonicalize(s.cycles_removed));
    CHECK(removed == doctest::Approx(lp).epsilon(1e-9));
    CHECK(is_acyclic(s.acyclic).acyclic);
    CHECK(approx_equal(s.acyclic.boundary(), g.boundary(), {}, 1e-9));
    CHECK(s.acyclic.mass() + removed == doctest::Approx(g.mass()).epsilon(1e-12));
    CHECK(mass0(boundary(s.cycles_removed)) <= 1e-9);
    CHECK(decompose(s.acyclic).cycles.empty());
  }
}
