// Runs the eight acceptance checks and prints one PASS/FAIL line for each.
// Exit status is nonzero when any check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "hmass/chain.hpp"
#include "hmass/cost.hpp"
#include "hmass/decomp.hpp"
#include "hmass/diagnostics.hpp"
#include "hmass/flat.hpp"
#include "hmass/kernels.hpp"
#include "hmass/prune.hpp"
#include "hmass/solve.hpp"
#include "oracles.hpp"

using namespace hmass;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) detail << what << "; ";
    ok = ok && cond;
  }
};

// 1. Decomposition conservation.
void decomposition_conservation(Outcome& out) {
  std::mt19937_64 rng(1001);
  double worst_re = 0.0, worst_mass = 0.0;
  for (int it = 0; it < 200; ++it) {
    auto c = oracle::random_chain(rng, 6, 7);
    auto g = build_graph(c);
    out.require(g.nodes.size() <= 40, "graph too large");
    auto d = decompose(g);
    worst_re = std::max(worst_re, oracle::reassembly_error(g, d));
    worst_mass = std::max(worst_mass, std::abs(d.mass() - g.mass()));
  }
  out.require(worst_re <= 1e-9, "reassembly error above 1e-9");
  out.require(worst_mass <= 1e-9, "mass additivity above 1e-9");
  out.detail << "reassembly " << worst_re << ", mass " << worst_mass;
}

// 2. Grid pruning and pair truncation.
void pruning_shadows(Outcome& out) {
  std::mt19937_64 rng(1002);
  const Tolerance tol{};
  double worst_ratio = 0.0;
  for (int it = 0; it < 50; ++it) {
    auto c = canonicalize(oracle::random_acyclic_chain(rng, 7, 8));
    auto g = build_graph(c);
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
      out.require(mass0(boundary(r.chain)) <= bm + tol.eps_mass, "pruned boundary grew");
      const double gap = mass(canonicalize(c - r.chain));
      const double bound = 2 * std::sqrt(2.0) * grid.width() * path_bound;
      out.require(gap <= bound + 1e-12, "pruned mass above the bound");
      if (bound > 0) worst_ratio = std::max(worst_ratio, gap / bound);
      out.require(gap <= prev_gap + 1e-12, "pruned mass not monotone");
      if (k > 1)
        for (std::size_t p = 0; p < r.kept.size(); ++p)
          if (prev.kept[p].kept)
            out.require(r.kept[p].kept && r.kept[p].start <= prev.kept[p].start &&
                            r.kept[p].end >= prev.kept[p].end,
                        "kept supports not nested");
      prev_gap = gap;
      prev = r;
    }
    for (long long n = 0; n <= 6; ++n) {
      auto t = truncate_boundary_pairs(d, n);
      out.require(mass0(boundary(t.chain)) <= bm + tol.eps_mass, "truncated boundary grew");
    }
  }
  out.detail << "worst gap/bound " << worst_ratio;
}

// 3. Superlinear envelope inequalities and the exhaustive envelope.
void envelope_inequalities(Outcome& out) {
  const GridSpec grid = GridSpec::with_steps(4.0, 4096);
  double worst = 0.0;
  for (const auto& h :
       {TransportCost::power(0.5), TransportCost::power(0.8), TransportCost::affine(1, 0.1)})
    for (double M : {0.5, 1.0, 2.0}) {
      auto env = make_h_M(h, M, grid);
      worst = std::max(worst, check_h_M(h, env, grid).worst());
    }
  out.require(worst <= 1e-6, "envelope inequality violated");

  std::mt19937_64 rng(1003);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  double worst_dp = 0.0;
  const double d = 1.0 / 16;
  for (const auto& h : {TransportCost::power(0.5), TransportCost::power(0.8)})
    for (double M : {0.5, 1.0, 2.0}) {
      // h + indicator of [0, M] on 64 grid points.
      CostSamples psi{d, {}};
      for (int k = 0; k < 64; ++k)
        psi.values.push_back(k * d <= M + 1e-12 ? h(k * d) : INFINITY);
      auto env = subadditive_lsc_envelope(psi);
      auto ref = oracle::envelope_by_partitions(psi.values);
      for (int k = 0; k < 64; ++k) worst_dp = std::max(worst_dp, std::abs(env(k * d) - ref[k]));
    }
  out.require(worst_dp <= 1e-9, "DP envelope differs from enumeration");
  out.detail << "worst inequality " << worst << ", DP vs enumeration " << worst_dp;
}

// 4. Atomic flat norm of dipoles.
void atomic_flat_norm(Outcome& out) {
  std::mt19937_64 rng(1004);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  double worst = 0.0, worst_gap = 0.0;
  for (int it = 0; it < 100; ++it) {
    Point x{u(rng), u(rng)}, y{u(rng), u(rng)};
    auto r = flat_norm_0(Chain0{2, {{x, 1.0}, {y, -1.0}}});
    worst = std::max(worst, std::abs(r.value - std::min(distance(x, y), 2.0)));
    worst_gap = std::max(worst_gap, std::abs(r.gap));
  }
  out.require(worst <= 1e-8, "flat norm off by more than 1e-8");
  out.require(worst_gap < 1e-9, "duality gap above 1e-9");
  out.detail << "worst error " << worst << ", gap " << worst_gap;
}

// 5. Counterexample sequences.
void counterexamples(Outcome& out) {
  double worst_grid = 0.0;
  for (int n = 1; n <= 8; ++n) {
    auto r = dashes_chain(n);
    out.require(mass(canonicalize(r)) == 2.0 / n, "mass(R_" + std::to_string(n) + ") != 2/n");
    const double bm = mass0(boundary(r));
    if (bm != 4.0 * n) {
      std::ostringstream s;
      s << "mass0(boundary R_" << n << ") = " << bm << " != " << 4 * n;
      out.require(false, s.str());
    }
    out.require(mass0(boundary(nested_squares_chain(n))) == 0.0,
                "boundary of S_" + std::to_string(n) + " nonzero");
  }
  for (const auto& row : counterexample_rows(8, FlatGrid{})) {
    if (row.family != "squares") continue;
    const double a = nested_squares_alpha(row.n);
    const double bound = 4.0 * row.n * (1 - a * a);
    const double err = std::max(0.0, row.flat_norm - bound) / bound;
    worst_grid = std::max(worst_grid, err);
  }
  out.require(worst_grid < 0.1, "grid error above 10%");
  out.detail << "worst grid error " << worst_grid;
}

bool boundary_feasible(const Solution& s, const Instance& in) {
  return approx_equal(boundary(s.flux), canonicalize(in.mu_minus - in.mu_plus), {}, 0.0);
}

// 6. Local search against the certified optimum.
void solver_oracles(Outcome& out) {
  std::mt19937_64 rng(1006);
  double worst_w1 = 0.0, worst_excess = 0.0;
  for (int it = 0; it < 30; ++it) {
    auto in = oracle::random_instance(rng, TransportCost::power(0.5));
    auto g = build_candidate_graph(in);
    auto b = solve_bruteforce(g, in.cost);
    auto l = solve_local(g, in.cost, it);
    out.require(l.cost_value >= b.cost_value - 1e-12, "local below the certified optimum");
    out.require(l.cost_value - b.cost_value <= l.gap() + 1e-12, "local outside its gap");
    worst_excess = std::max(worst_excess, l.cost_value - b.cost_value);
    for (const auto* s : {&b, &l}) {
      out.require(is_acyclic(build_graph(s->flux)).acyclic, "flux not acyclic");
      out.require(boundary_feasible(*s, in), "flux boundary differs");
    }
    in.cost = TransportCost::identity();
    const double w1 = wasserstein1(in.mu_plus, in.mu_minus);
    for (const auto& s : {solve_local(in), solve_bruteforce(in)}) {
      worst_w1 = std::max(worst_w1, std::abs(s.cost_value - w1));
      out.require(boundary_feasible(s, in), "identity flux boundary differs");
    }
  }
  out.require(worst_w1 <= 1e-8, "identity solve differs from W1");
  out.detail << "identity vs W1 " << worst_w1 << ", local excess " << worst_excess;
}

// 7. Flux objective against chain h-mass, and the diagonal approximation.
void equivalence_shadow(Outcome& out) {
  std::mt19937_64 rng(1007);
  std::uniform_real_distribution<double> f(-2, 2);
  double worst = 0.0;
  for (int it = 0; it < 100; ++it) {
    auto in = oracle::random_instance(rng, TransportCost::power(0.3 + 0.1 * (it % 7)));
    auto g = build_candidate_graph(in);
    std::vector<double> flow(g.edges.size());
    for (double& x : flow) x = f(rng);
    worst = std::max(worst, flux_chain_agreement(g, flow, in.cost).difference);
  }
  out.require(worst <= 1e-9, "flux objective and chain h-mass differ");

  std::vector<PolyChain1> fixtures;
  PolyChain1 y{2, {}};
  y.add({0, 0}, {1, 0}, 2);
  y.add({1, 0}, {2, 1}, 1);
  y.add({1, 0}, {2, -1}, 1);
  fixtures.push_back(y);
  PolyChain1 loop = y;
  loop.add({0, 0.5}, {0.5, 0.5}, 1);
  loop.add({0.5, 0.5}, {0.5, 1}, 1);
  loop.add({0.5, 1}, {0, 0.5}, 1);
  fixtures.push_back(loop);
  std::mt19937_64 frng(1017);
  for (int i = 0; i < 3; ++i) fixtures.push_back(oracle::random_acyclic_chain(frng, 6, 6));

  const std::vector<TransportCost> costs{
      TransportCost::power(0.5), TransportCost::power(0.3), TransportCost::power(0.8),
      TransportCost::identity(), TransportCost::affine(1, 0.1),
      TransportCost::capped(TransportCost::power(0.5), 2.0)};
  double worst_final = 0.0;
  for (std::size_t i = 0; i < fixtures.size(); ++i) {
    const auto& a = fixtures[i];
    ApproxOptions o;
    o.seed = i;
    for (int k = 1; k <= 14; ++k) o.schedule.push_back({k, std::nullopt});
    auto rep = diagonal_approx(a, TransportCost::power(0.5), o);
    for (const auto& s : rep.steps) {
      out.require(s.boundary_mass <= rep.boundary_mass + 1e-12, "approx boundary grew");
      out.require(shrinkage_violation(s.chain, a) <= 1e-12, "coefficient shrinkage violated");
      for (const auto& h : costs)
        out.require(h_mass(s.chain, h) <= h_mass(canonicalize(a), h) + 1e-12,
                    "h-mass not dominated");
    }
    worst_final = std::max(worst_final, std::abs(rep.steps.back().h_mass_gap));
  }
  out.require(worst_final < 1e-3, "final h-mass gap not below 1e-3");
  out.detail << "agreement " << worst << ", final h-mass gap " << worst_final;
}

// 8. W1 bound and the prescribed boundary experiment.
void w1_bound(Outcome& out) {
  std::mt19937_64 rng(1008);
  const GridSpec grid = GridSpec::with_steps(8.0, 2048);
  double worst = -INFINITY;
  for (int it = 0; it < 20; ++it) {
    auto in = oracle::random_instance(rng, TransportCost::identity());
    auto g = build_candidate_graph(in);
    const double w1 = wasserstein1(in.mu_plus, in.mu_minus);
    for (double N : {0.5, 1.0, 2.0}) {
      for (const auto& h :
           {TransportCost::capped(TransportCost::power(0.5), N), make_h_N(TransportCost::power(0.5), N, grid),
            TransportCost::identity()}) {
        const double opt =
            h.is_concave(8.0) ? solve_bruteforce(g, h).cost_value : solve_local(g, h).cost_value;
        worst = std::max(worst, opt - h.h_prime_0() * w1);
      }
    }
  }
  out.require(worst <= 1e-8, "optimum above h'(0) W1");

  auto rows = prescribed_boundary_experiment(Instance{.cost = TransportCost::power(0.5)},
                                             uniform_segment_schedule({4, 8, 16}));
  const double g1 = rows[1].cost - rows[0].cost, g2 = rows[2].cost - rows[1].cost;
  const double ratio = std::abs(g1) / std::abs(g2);
  out.require(ratio >= 1.5, "experiment gaps shrink by less than 1.5");
  out.detail << "worst opt - h'(0) W1 " << worst << ", gap ratio " << ratio;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double limit_s;  // 0: no limit
    std::function<void(Outcome&)> run;
  };
  const Criterion all[] = {
      {"decomposition conservation", 10, decomposition_conservation},
      {"pruning and truncation bounds", 30, pruning_shadows},
      {"superlinear envelope inequalities", 60, envelope_inequalities},
      {"atomic flat norm", 0, atomic_flat_norm},
      {"counterexample diagnostics", 120, counterexamples},
      {"solver oracle equivalence", 0, solver_oracles},
      {"equivalence shadow", 0, equivalence_shadow},
      {"W1 bound and Cauchy experiment", 0, w1_bound},
  };
  int failed = 0, idx = 0;
  for (const auto& c : all) {
    ++idx;
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(out);
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0 && secs >= c.limit_s) out.require(false, "over the time limit");
    std::printf("criterion %d %s: %s (%s; %.2f s)\n", idx, c.name, out.ok ? "PASS" : "FAIL",
                out.detail.str().c_str(), secs);
    std::fflush(stdout);
    failed += !out.ok;
  }
  return failed == 0 ? 0 : 1;
}
