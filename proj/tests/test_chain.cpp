#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "hmass/chain.hpp"
#include "hmass/cost.hpp"
#include "hmass/diagnostics.hpp"
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

PolyChain1 refine(const PolyChain1& c, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.2, 0.8);
  PolyChain1 out{c.dim, {}};
  for (const auto& s : c.segments) {
    Point m = lerp(s.seg.a, s.seg.b, u(rng));
    out.add(s.seg.a, m, s.mult);
    out.add(m, s.seg.b, s.mult);
  }
  return out;
}

}  // namespace

TEST_CASE("canonicalize merges duplicate segments") {
  PolyChain1 c{2, {}};
  c.add({0, 0}, {1, 0}, 1);
  c.add({0, 0}, {1, 0}, 1);
  auto k = canonicalize(c);
  REQUIRE(k.segments.size() == 1);
  CHECK(k.segments[0].mult == 2.0);
}

TEST_CASE("canonicalize splits collinear overlaps like interval arithmetic") {
  PolyChain1 c{2, {}};
  c.add({0, 0}, {2, 0}, 1);
  c.add({1, 0}, {3, 0}, -1);
  auto k = canonicalize(c);
  auto ref = oracle::interval_sum({{0, 2, 1}, {1, 3, -1}});
  REQUIRE(k.segments.size() == ref.size());
  REQUIRE(ref.size() == 2);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    CHECK(k.segments[i].seg.a == Point{ref[i].x0, 0.0});
    CHECK(k.segments[i].seg.b == Point{ref[i].x1, 0.0});
    CHECK(k.segments[i].mult == ref[i].m);
  }
}

TEST_CASE("random collinear overlaps agree with interval arithmetic") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> x(0, 16), m(-3, 3);
  for (int it = 0; it < 200; ++it) {
    std::vector<oracle::Piece> in;
    PolyChain1 c{2, {}};
    for (int k = 0; k < 5; ++k) {
      int a = x(rng), b = x(rng), w = m(rng);
      if (a == b || w == 0) continue;
      in.push_back({a / 4.0, b / 4.0, double(w)});
      c.add(Point{a / 4.0, 0.0}, Point{b / 4.0, 0.0}, w);
    }
    auto ref = oracle::interval_sum(in);
    auto k = canonicalize(c);
    REQUIRE(k.segments.size() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
      CHECK(k.segments[i].seg.a[0] == ref[i].x0);
      CHECK(k.segments[i].seg.b[0] == ref[i].x1);
      CHECK(k.segments[i].mult == doctest::Approx(ref[i].m).epsilon(1e-12));
    }
  }
}

TEST_CASE("empty chain canonicalizes to empty") {
  CHECK(canonicalize(PolyChain1{2, {}}).empty());
  CHECK(mass(PolyChain1{2, {}}) == 0.0);
  CHECK(mass0(Chain0{2, {}}) == 0.0);
}

TEST_CASE("crossing segments are split at the crossing") {
  PolyChain1 c{2, {}};
  c.add({0, 0}, {2, 2}, 1);
  c.add({0, 2}, {2, 0}, 1);
  auto k = canonicalize(c);
  CHECK(k.segments.size() == 4);
  CHECK(mass(k) == doctest::Approx(4 * std::sqrt(2.0)).epsilon(1e-14));
  for (const auto& s : k.segments) CHECK(s.seg.a < s.seg.b);
}

TEST_CASE("boundary of a single segment, a loop and the Y-shape") {
  PolyChain1 s{2, {}};
  s.add({0, 0}, {1, 0}, 3);
  auto b = boundary(s);
  REQUIRE(b.atoms.size() == 2);
  CHECK(b.atoms[0].x == Point{0, 0});
  CHECK(b.atoms[0].w == -3.0);
  CHECK(b.atoms[1].x == Point{1, 0});
  CHECK(b.atoms[1].w == 3.0);

  CHECK(boundary(square()).empty());

  Chain0 want{2, {}};
  want.add({0, 0}, -2);
  want.add({2, 1}, 1);
  want.add({2, -1}, 1);
  CHECK(approx_equal(boundary(y_shape()), want));
}

// Endpoints of the dashes in units of 1/n^2: tails at k n, heads at k n + 1.
// For n = 1 neighbouring dashes touch and their shared endpoint cancels.
static double dashes_boundary_count(int n) {
  std::map<long, int> net;
  for (long k = -n; k < n; ++k) {
    net[k * n] -= 1;
    net[k * n + 1] += 1;
  }
  double m = 0;
  for (auto [x, w] : net) m += std::abs(w);
  return m;
}

TEST_CASE("mass, h-mass and the counterexample sequences") {
  CHECK(mass(canonicalize(dashes_chain(2))) == 1.0);
  CHECK(mass0(boundary(dashes_chain(2))) == 8.0);
  CHECK(mass(canonicalize(nested_squares_chain(2))) == 28.0);
  for (int n = 1; n <= 8; ++n) {
    CHECK(mass(canonicalize(dashes_chain(n))) == doctest::Approx(2.0 / n).epsilon(1e-14));
    CHECK(mass0(boundary(dashes_chain(n))) == dashes_boundary_count(n));
    if (n >= 2) CHECK(dashes_boundary_count(n) == 4.0 * n);
    const double a = nested_squares_alpha(n);
    CHECK(mass(canonicalize(nested_squares_chain(n))) ==
          doctest::Approx(8.0 * n * (1 + a)).epsilon(1e-14));
    CHECK(mass0(boundary(nested_squares_chain(n))) == 0.0);
  }
  PolyChain1 s{2, {}};
  s.add({0, 0}, {2, 0}, 4);
  CHECK(h_mass(s, TransportCost::power(0.5)) == 4.0);
  CHECK(h_mass(canonicalize(y_shape()), TransportCost::power(0.5)) ==
        doctest::Approx(3 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(h_mass(canonicalize(y_shape()), TransportCost::identity()) ==
        doctest::Approx(mass(canonicalize(y_shape()))).epsilon(1e-15));
}

TEST_CASE("refinement does not change mass, h-mass or boundary") {
  std::mt19937_64 rng(11);
  const auto h = TransportCost::power(0.6);
  for (int it = 0; it < 100; ++it) {
    auto c = canonicalize(oracle::random_chain(rng, 6, 6));
    auto r = canonicalize(refine(c, rng));
    CHECK(mass(r) == doctest::Approx(mass(c)).epsilon(1e-12));
    CHECK(h_mass(r, h) == doctest::Approx(h_mass(c, h)).epsilon(1e-12));
    CHECK(approx_equal(boundary(r), boundary(c), {}, 1e-12));
  }
}

TEST_CASE("boundary commutes with canonicalization") {
  std::mt19937_64 rng(12);
  for (int it = 0; it < 100; ++it) {
    auto c = oracle::random_chain(rng, 7, 8);
    CHECK(approx_equal(boundary(canonicalize(c)), boundary(c), {}, 1e-12));
  }
}

TEST_CASE("h-mass is subadditive and dominated by linear bounds") {
  std::mt19937_64 rng(13);
  const auto h = TransportCost::power(0.5);
  for (int it = 0; it < 100; ++it) {
    auto a = canonicalize(oracle::random_chain(rng, 5, 4));
    auto b = canonicalize(oracle::random_chain(rng, 5, 4));
    auto s = canonicalize(a + b);
    CHECK(h_mass(s, h) <= h_mass(a, h) + h_mass(b, h) + 1e-12);
    // sqrt(m) <= m for m >= 1 and every multiplicity here is an integer.
    CHECK(h_mass(a, h) <= mass(a) + 1e-12);
  }
}

TEST_CASE("closed loops have zero boundary mass") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int it = 0; it < 50; ++it) {
    PolyChain1 c{2, {}};
    std::vector<Point> p;
    for (int k = 0; k < 6; ++k) p.push_back(Point{u(rng), u(rng)});
    for (int k = 0; k < 6; ++k) c.add(p[k], p[(k + 1) % 6], 2.5);
    CHECK(mass0(boundary(c)) == 0.0);
  }
}

TEST_CASE("validation names the offending segment") {
  PolyChain1 c{2, {}};
  c.add({0, 0}, {1, 0}, 1);
  c.add({0, 0}, {0, 0}, 1);
  CHECK_THROWS_WITH_AS(validate(c), doctest::Contains("segment 1"), InputError);
  PolyChain1 d{2, {}};
  d.add({0, 0}, Point{1.0, 0.0, 0.0}, 1);
  CHECK_THROWS_AS(validate(d), InputError);
}

TEST_CASE("serial and parallel canonicalization agree") {
  std::mt19937_64 rng(15);
  for (int it = 0; it < 30; ++it) {
    auto c = oracle::random_chain(rng, 10, 14);
    auto s = canonicalize(c, {}, Exec::serial);
    auto p = canonicalize(c, {}, Exec::parallel);
    REQUIRE(s.segments.size() == p.segments.size());
    for (std::size_t i = 0; i < s.segments.size(); ++i) {
      CHECK(s.segments[i].seg.a == p.segments[i].seg.a);
      CHECK(s.segments[i].seg.b == p.segments[i].seg.b);
      CHECK(s.segments[i].mult == p.segments[i].mult);
    }
  }
}

TEST_CASE("weak distance report of constant and counterexample sequences") {
  auto y = y_shape();
  auto rows = weak_distance_report({y, y}, y);
  for (const auto& r : rows) {
    CHECK(r.mass_diff == 0.0);
    CHECK(r.boundary_diff == 0.0);
  }
  std::vector<PolyChain1> seq;
  for (int n = 1; n <= 4; ++n) seq.push_back(dashes_chain(n));
  auto rr = weak_distance_report(seq, PolyChain1{2, {}}, FlatGrid{});
  for (std::size_t i = 0; i < rr.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    CHECK(rr[i].mass == doctest::Approx(2.0 / n).epsilon(1e-14));
    CHECK(rr[i].boundary_mass == dashes_boundary_count(n));
    REQUIRE(rr[i].flat_diff.has_value());
    CHECK(*rr[i].flat_diff <= rr[i].mass + 1e-9);
  }
}
