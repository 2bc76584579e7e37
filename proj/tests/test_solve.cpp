#include <doctest.h>

#include <cmath>
#include <random>

#include "hmass/decomp.hpp"
#include "hmass/errors.hpp"
#include "hmass/flat.hpp"
#include "hmass/solve.hpp"
#include "oracles.hpp"

using namespace hmass;

namespace {

Instance y_instance(double sink_y, const std::vector<double>& axis) {
  Instance in;
  in.mu_plus = {2, {{Point{-1, 0}, 1.0}, {Point{1, 0}, 1.0}}};
  in.mu_minus = {2, {{Point{0, sink_y}, 2.0}}};
  for (double t : axis) in.steiner_points.push_back(Point{0, t});
  in.cost = TransportCost::power(0.5);
  return in;
}

bool boundary_feasible(const Solution& s, const Instance& in) {
  return approx_equal(boundary(s.flux), canonicalize(in.mu_minus - in.mu_plus), {}, 1e-12);
}

}  // namespace

TEST_CASE("a single straight edge") {
  Instance in;
  in.mu_plus = {2, {{Point{0, 0}, 1.0}}};
  in.mu_minus = {2, {{Point{2, 0}, 1.0}}};
  for (const auto& h : {TransportCost::power(0.5), TransportCost::affine(1, 0.5)}) {
    in.cost = h;
    auto s = solve_bruteforce(in);
    CHECK(s.cost_value == doctest::Approx(h(1.0) * 2.0).epsilon(1e-15));
    CHECK(s.optimality == Optimality::certified_bruteforce);
  }
}

TEST_CASE("equal measures give the zero flux") {
  Instance in;
  in.mu_plus = {2, {{Point{0, 0}, 1.0}, {Point{1, 1}, 2.0}}};
  in.mu_minus = in.mu_plus;
  in.cost = TransportCost::power(0.5);
  auto s = solve_local(in);
  CHECK(s.flux.empty());
  CHECK(s.cost_value == 0.0);
  CHECK(solve_bruteforce(in).cost_value == 0.0);
}

TEST_CASE("branching: the V is optimal for a sink at (0,1), a junction wins at (0,2)") {
  // With h = sqrt the optimal junction angle is 90 degrees, which the V
  // already has at (0, 1): the junction cost 2 sqrt(1 + t^2) + sqrt(2)(1 - t)
  // decreases up to t = 1.
  auto v = solve_bruteforce(y_instance(1.0, {0.25, 0.5, 0.75}));
  CHECK(v.cost_value == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-14));
  auto y = solve_bruteforce(y_instance(2.0, {0.5, 1.0, 1.5}));
  CHECK(y.cost_value == doctest::Approx(3 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(y.cost_value < 2 * std::sqrt(5.0));
  // The trunk carries both units: merging never costs more (h(2) <= 2 h(1)).
  double trunk = 0.0;
  for (const auto& s : y.flux.segments) trunk = std::max(trunk, std::abs(s.mult));
  CHECK(trunk == 2.0);
  CHECK(is_acyclic(build_graph(y.flux)).acyclic);
}

TEST_CASE("serial and parallel brute force agree exactly") {
  auto in = y_instance(2.0, {0.5, 1.0, 1.5});
  auto g = build_candidate_graph(in);
  auto a = solve_bruteforce(g, in.cost, {}, {}, Exec::serial);
  auto b = solve_bruteforce(g, in.cost, {}, {}, Exec::parallel);
  CHECK(a.cost_value == b.cost_value);
  CHECK(a.flow == b.flow);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("brute force limits and cost restrictions") {
  auto in = y_instance(2.0, {0.5, 1.0, 1.5});
  CHECK_THROWS_AS(solve_bruteforce(in, BruteLimits{4}), InputError);
  in.cost = TransportCost::tabulated(0.5, {0, 1, 1.5, 2.5, 3, 4});
  CHECK_THROWS_AS(solve_bruteforce(in), InputError);
  CHECK_NOTHROW(solve_local(in));
}

TEST_CASE("unbalanced instances are rejected with atom indices") {
  Instance in;
  in.mu_plus = {2, {{Point{0, 0}, 1.0}}};
  in.mu_minus = {2, {{Point{1, 0}, 2.0}}};
  CHECK_THROWS_AS(build_candidate_graph(in), InputError);
  in.mu_minus = {2, {{Point{1, 0}, -1.0}}};
  CHECK_THROWS_WITH_AS(build_candidate_graph(in), doctest::Contains("atom 0"), InputError);
}

TEST_CASE("local search against brute force, identity against W1") {
  std::mt19937_64 rng(51);
  for (int it = 0; it < 30; ++it) {
    auto in = oracle::random_instance(rng, TransportCost::power(0.5));
    auto g = build_candidate_graph(in);
    auto b = solve_bruteforce(g, in.cost);
    auto l = solve_local(g, in.cost, it);
    CHECK(l.cost_value >= b.cost_value - 1e-12);
    CHECK(l.cost_value - b.cost_value <= l.gap() + 1e-12);
    CHECK(l.lower <= b.cost_value + 1e-12);
    CHECK(boundary_feasible(b, in));
    CHECK(boundary_feasible(l, in));
    CHECK(is_acyclic(build_graph(l.flux)).acyclic);
    CHECK(is_acyclic(build_graph(b.flux)).acyclic);

    in.cost = TransportCost::identity();
    const double w1 = wasserstein1(in.mu_plus, in.mu_minus);
    CHECK(solve_local(in).cost_value == doctest::Approx(w1).epsilon(1e-12));
    CHECK(solve_bruteforce(in).cost_value == doctest::Approx(w1).epsilon(1e-12));
  }
}

TEST_CASE("cost monotonicity, caps and the W1 bound") {
  std::mt19937_64 rng(52);
  const GridSpec grid = GridSpec::with_steps(8.0, 2048);
  for (int it = 0; it < 10; ++it) {
    auto in = oracle::random_instance(rng, TransportCost::power(0.5));
    auto g = build_candidate_graph(in);
    const double w1 = wasserstein1(in.mu_plus, in.mu_minus);
    const double opt_sqrt = solve_bruteforce(g, TransportCost::power(0.5)).cost_value;
    const double opt_08 = solve_bruteforce(g, TransportCost::power(0.8)).cost_value;
    // m^0.5 <= m^0.8 for m >= 1 and all flows here are integers >= 1.
    CHECK(opt_sqrt <= opt_08 + 1e-12);
    double prev = 0.0;
    for (double N : {0.5, 1.0, 2.0}) {
      auto capped = TransportCost::capped(TransportCost::power(0.5), N);
      const double opt = solve_bruteforce(g, capped).cost_value;
      CHECK(opt >= prev - 1e-12);
      CHECK(opt <= opt_sqrt + 1e-12);
      CHECK(opt <= capped.h_prime_0() * w1 + 1e-8);
      prev = opt;
      auto hN = make_h_N(TransportCost::power(0.5), N, grid);
      CHECK(solve_local(g, hN).cost_value <= hN.h_prime_0() * w1 + 1e-8);
    }
  }
}

TEST_CASE("acyclic cleanup never raises the cost") {
  Instance in;
  in.mu_plus = {2, {{Point{0, 0}, 1.0}}};
  in.mu_minus = {2, {{Point{1, 0}, 1.0}}};
  in.steiner_points = {Point{0.5, 0.5}, Point{0.5, -0.5}};
  in.cost = TransportCost::power(0.5);
  auto g = build_candidate_graph(in);
  auto s = solve_local(g, in.cost);
  auto split = acyclic_part(build_graph(s.flux));
  CHECK(h_mass(split.acyclic.to_chain(), in.cost) <= s.cost_value + 1e-12);
}

TEST_CASE("prescribed boundary experiment") {
  const auto base = Instance{.cost = TransportCost::power(0.5)};
  auto rows = prescribed_boundary_experiment(base, uniform_segment_schedule({2, 4, 8, 16}));
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) CHECK(rows[i].cost < rows[i + 1].cost);
  const double g1 = rows[2].cost - rows[1].cost, g2 = rows[3].cost - rows[2].cost;
  CHECK(g1 / g2 >= 1.5);
  // Independent closed form on the path of atoms: edge k carries k/n.
  for (const auto& r : rows) {
    double c = 0.5 / r.n;
    for (int k = 1; k < r.n; ++k) c += std::sqrt(double(k) / r.n) / r.n;
    CHECK(r.cost == doctest::Approx(c).epsilon(1e-12));
    CHECK(r.w1_plus == 1.0 / (4 * r.n));
  }

  // Constant schedule: constant cost.
  std::vector<DiracStage> same(3);
  for (auto& s : same) {
    s.mu_plus = {2, {{Point{0, 0}, 1.0}}};
    s.mu_minus = {2, {{Point{1, 1}, 1.0}}};
  }
  auto c = prescribed_boundary_experiment(base, same);
  CHECK(c[0].cost == c[1].cost);
  CHECK(c[1].cost == c[2].cost);

  // Identity: W1 of the atoms, within the discretization error of the limit.
  auto lin = prescribed_boundary_experiment(Instance{}, uniform_segment_schedule({2, 4, 8}));
  for (const auto& r : lin) {
    CHECK(r.cost == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(r.cost - 0.5) <= r.w1_plus + r.w1_minus + 1e-12);
  }

  std::vector<DiracStage> bad(1);
  bad[0].mu_plus = {2, {{Point{0, 0}, 1.0}}};
  bad[0].mu_minus = {2, {{Point{1, 1}, 2.0}}};
  CHECK_THROWS_WITH_AS(prescribed_boundary_experiment(base, bad), doctest::Contains("entry 0"),
                       InputError);
}

TEST_CASE("flux objective and chain h-mass agree") {
  auto in = y_instance(2.0, {0.5, 1.0, 1.5});
  auto r = minimal_hmass_equivalence_check(in);
  CHECK(r.agree);
  CHECK(r.difference <= 1e-9);
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> f(-2, 2);
  for (int it = 0; it < 100; ++it) {
    auto ri = oracle::random_instance(rng, TransportCost::power(0.3 + 0.1 * (it % 7)));
    auto g = build_candidate_graph(ri);
    std::vector<double> flow(g.edges.size());
    for (double& x : flow) x = f(rng);
    auto rep = flux_chain_agreement(g, flow, ri.cost);
    CHECK(rep.difference <= 1e-9);
  }
}
