#include <doctest.h>

#include <cmath>
#include <random>

#include "hmass/errors.hpp"
#include "hmass/prune.hpp"
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

Decomposition decomposition_of(const PolyChain1& c) { return decompose(build_graph(c)); }

}  // namespace

TEST_CASE("shift choice is deterministic and avoids the vertices") {
  std::vector<Point> v{{0.5, 0.5}, {0.25, 0.75}};
  auto a = choose_shift(0, 2, v, 6);
  auto b = choose_shift(0, 2, v, 6);
  CHECK(a == b);
  CHECK(shift_is_valid(a, v, 6, 1e-9));
  CHECK_FALSE(shift_is_valid(Point{0, 0}, v, 2, 1e-9));
  int calls = 0;
  auto s = choose_shift_from(
      [&] {
        ++calls;
        return calls == 1 ? Point{0.0, 0.0} : Point{0.1, 0.1};
      },
      v, 2, 1e-9);
  CHECK(calls == 2);
  CHECK(s == Point{0.1, 0.1});
  CHECK_THROWS_AS(choose_shift_from([] { return Point{0.0, 0.0}; }, v, 2, 1e-9), InputError);
}

TEST_CASE("clipping a segment between its first and last grid hit") {
  PolyChain1 c{2, {}};
  c.add({0.1, 0.5}, {0.9, 0.5}, 1);
  auto d = decomposition_of(c);
  auto r = prune_to_grid(d, Grid{Point{0.25, 0.1}, 1});
  REQUIRE(r.chain.segments.size() == 1);
  CHECK(r.chain.segments[0].seg.a == Point{0.25, 0.5});
  CHECK(r.chain.segments[0].seg.b == Point{0.75, 0.5});
  CHECK(mass0(boundary(r.chain)) == 2.0);
  REQUIRE(r.kept.size() == 1);
  CHECK(r.kept[0].start == doctest::Approx(0.15).epsilon(1e-15));
  CHECK(r.kept[0].end == doctest::Approx(0.65).epsilon(1e-15));
}

TEST_CASE("a segment inside one cell is pruned away") {
  PolyChain1 c{2, {}};
  c.add({0.3, 0.3}, {0.4, 0.35}, 1);
  auto r = prune_to_grid(decomposition_of(c), Grid{Point{0.0, 0.0}, 1});
  CHECK(r.chain.empty());
  CHECK_FALSE(r.kept[0].kept);
}

TEST_CASE("pruned mass tends to the full mass") {
  PolyChain1 c{2, {}};
  c.add({0.1, 0.2}, {0.8, 0.9}, 1);
  auto d = decomposition_of(c);
  const double len = c.segments[0].seg.length();
  for (int k = 1; k <= 12; ++k) {
    const Grid g{Point{0.013, 0.027}, k};
    auto r = prune_to_grid(d, g);
    CHECK(mass(r.chain) >= len - 2 * std::sqrt(2.0) * g.width() - 1e-12);
  }
}

TEST_CASE("pruning rejects cycles") {
  PolyChain1 c{2, {}};
  c.add({0, 0}, {1, 0}, 1);
  c.add({1, 0}, {0, 1}, 1);
  c.add({0, 1}, {0, 0}, 1);
  CHECK_THROWS_AS(prune_to_grid(decomposition_of(c), Grid{Point{0.3, 0.3}, 1}), InputError);
}

TEST_CASE("pruning properties on random acyclic chains") {
  std::mt19937_64 rng(31);
  const Tolerance tol{};
  for (int it = 0; it < 50; ++it) {
    auto c = canonicalize(oracle::random_acyclic_chain(rng, 7, 8));
    auto g = build_graph(c);
    REQUIRE(is_acyclic(g).acyclic);
    auto d = decompose(g);
    const double bm = mass0(boundary(c));
    const Point shift = choose_shift(it, 2, g.nodes, 10);
    double path_bound = 0.0;
    for (const auto& p : d.paths) path_bound += p.weight * double(p.points.size() - 1);
    double prev_gap = mass(c);
    PruneResult prev;
    for (int k = 1; k <= 10; ++k) {
      const Grid grid{shift, k};
      auto r = prune_to_grid(d, grid, tol);
      CHECK(mass0(boundary(r.chain)) <= bm + tol.eps_mass);
      const double gap = mass(canonicalize(c - r.chain));
      CHECK(gap <= 2 * std::sqrt(2.0) * grid.width() * path_bound + 1e-12);
      CHECK(gap <= prev_gap + 1e-12);
      // Mass splits along the pruning.
      CHECK(mass(c) == doctest::Approx(mass(r.chain) + gap).epsilon(1e-12));
      if (k > 1)
        for (std::size_t p = 0; p < r.kept.size(); ++p)
          if (prev.kept[p].kept) {
            CHECK(r.kept[p].kept);
            CHECK(r.kept[p].start <= prev.kept[p].start);
            CHECK(r.kept[p].end >= prev.kept[p].end);
          }
      prev_gap = gap;
      prev = r;
    }
  }
}

TEST_CASE("pair truncation") {
  // Three pairs with weights 5, 3, 1.
  PolyChain1 c{2, {}};
  c.add({0, 0}, {1, 0}, 5);
  c.add({0, 1}, {1, 1}, 3);
  c.add({0, 2}, {1, 2}, 1);
  auto d = decomposition_of(c);
  auto t2 = truncate_boundary_pairs(d, 2);
  CHECK(t2.groups == 3);
  CHECK(t2.removed_weight == 1.0);
  CHECK(mass(canonicalize(c - t2.chain)) == 1.0);
  CHECK(mass(t2.chain) == 8.0);
  CHECK(truncate_boundary_pairs(d, 0).chain.empty());
  CHECK_THROWS_AS(truncate_boundary_pairs(d, -1), InputError);

  auto y = decomposition_of(y_shape());
  auto ty = truncate_boundary_pairs(y, 2);
  CHECK(approx_equal(ty.chain, canonicalize(y_shape())));
}

TEST_CASE("pair truncation properties on random acyclic chains") {
  std::mt19937_64 rng(32);
  for (int it = 0; it < 50; ++it) {
    auto c = canonicalize(oracle::random_acyclic_chain(rng, 7, 8));
    auto d = decompose(build_graph(c));
    const double bm = mass0(boundary(c));
    for (long long n = 0; n <= 6; ++n) {
      auto t = truncate_boundary_pairs(d, n);
      auto bd = boundary(t.chain);
      CHECK(mass0(bd) <= bm + 1e-12);
      CHECK(bd.atoms.size() <= static_cast<std::size_t>(2 * n));
      double kept = 0.0;
      for (const auto& p : t.kept.paths) kept += p.weight;
      double all = 0.0;
      for (const auto& p : d.paths) all += p.weight;
      CHECK(kept + t.removed_weight == doctest::Approx(all).epsilon(1e-12));
    }
  }
}

TEST_CASE("diagonal approximation fixtures") {
  const auto h = TransportCost::power(0.5);
  SUBCASE("square loop is untouched") {
    PolyChain1 c{2, {}};
    c.add({0.1, 0.1}, {0.9, 0.1}, 1);
    c.add({0.9, 0.1}, {0.9, 0.9}, 1);
    c.add({0.9, 0.9}, {0.1, 0.9}, 1);
    c.add({0.1, 0.9}, {0.1, 0.1}, 1);
    ApproxOptions o;
    o.schedule = {{1, 1}, {2, 2}, {3, 3}};
    auto rep = diagonal_approx(c, h, o);
    for (const auto& s : rep.steps) CHECK(approx_equal(s.chain, canonicalize(c)));
  }
  SUBCASE("integer Y-shape is a fixpoint with the zero shift") {
    ApproxOptions o;
    o.shift = Point{0.0, 0.0};
    o.schedule = {{1, 2}, {2, 4}, {3, 8}};
    auto rep = diagonal_approx(y_shape(), h, o);
    for (const auto& s : rep.steps) {
      CHECK(s.mass_gap == 0.0);
      CHECK(s.h_mass_gap == 0.0);
    }
  }
  SUBCASE("Y-shape with a seeded shift: gaps decrease") {
    ApproxOptions o;
    o.seed = 5;
    for (int k = 1; k <= 14; ++k) o.schedule.push_back({k, std::nullopt});
    auto rep = diagonal_approx(y_shape(), h, o);
    double prev = rep.mass;
    for (const auto& s : rep.steps) {
      CHECK(s.mass_gap <= prev + 1e-12);
      CHECK(s.boundary_mass <= rep.boundary_mass + 1e-12);
      CHECK(shrinkage_violation(s.chain, y_shape()) <= 1e-12);
      prev = s.mass_gap;
    }
    CHECK(rep.steps.back().h_mass_gap < 1e-3);
  }
}
