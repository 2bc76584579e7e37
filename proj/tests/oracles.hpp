#pragma once

// Reference computations used only by the tests. Each one reaches its answer
// by a route that shares no code with the library function it checks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "hmass/chain.hpp"
#include "hmass/decomp.hpp"
#include "hmass/mcf.hpp"
#include "hmass/solve.hpp"

namespace oracle {

// Collinear intervals on the x axis: piecewise-constant multiplicity between
// consecutive breakpoints, nonzero pieces only, adjacent equal pieces kept
// separate. Returns (x0, x1, mult) oriented left to right.
struct Piece {
  double x0, x1, m;
};
inline std::vector<Piece> interval_sum(const std::vector<Piece>& in) {
  std::vector<double> bp;
  for (const auto& p : in) {
    bp.push_back(std::min(p.x0, p.x1));
    bp.push_back(std::max(p.x0, p.x1));
  }
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  std::vector<Piece> out;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    double mid = 0.5 * (bp[i] + bp[i + 1]);
    double m = 0.0;
    for (const auto& p : in) {
      double lo = std::min(p.x0, p.x1), hi = std::max(p.x0, p.x1);
      if (lo < mid && mid < hi) m += p.x0 < p.x1 ? p.m : -p.m;
    }
    if (m != 0.0) out.push_back({bp[i], bp[i + 1], m});
  }
  return out;
}

// Smallest sum of psi over all multisets of positive parts adding up to k.
inline void partitions(int remaining, int max_part, double acc, const std::vector<double>& psi,
                       double& best) {
  if (remaining == 0) {
    best = std::min(best, acc);
    return;
  }
  for (int p = std::min(remaining, max_part); p >= 1; --p)
    partitions(remaining - p, p, acc + psi[p], psi, best);
}
inline std::vector<double> envelope_by_partitions(const std::vector<double>& psi) {
  std::vector<double> g(psi.size(), 0.0);
  for (int k = 1; k < static_cast<int>(psi.size()); ++k) {
    double best = std::numeric_limits<double>::infinity();
    partitions(k, k, 0.0, psi, best);
    g[k] = best;
  }
  return g;
}

// W1 between integer-weighted atomic measures by trying every assignment of
// unit sources to unit sinks.
inline double w1_by_matching(const hmass::Chain0& a, const hmass::Chain0& b) {
  std::vector<hmass::Point> src, dst;
  for (const auto& x : a.atoms)
    for (int k = 0; k < static_cast<int>(std::lround(x.w)); ++k) src.push_back(x.x);
  for (const auto& x : b.atoms)
    for (int k = 0; k < static_cast<int>(std::lround(x.w)); ++k) dst.push_back(x.x);
  std::vector<int> perm(dst.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i) c += hmass::distance(src[i], dst[perm[i]]);
    best = std::min(best, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Largest-mass circulation y with 0 <= y <= mult on the arcs of a directed
// graph, as a network-simplex LP.
struct ArcSpec {
  std::size_t tail, head;
  double length, mult;
};
inline double max_circulation_mass(std::size_t nodes, const std::vector<ArcSpec>& arcs,
                                   std::vector<double>* y = nullptr) {
  hmass::mcf::Network net(nodes);
  for (const auto& a : arcs) net.add_arc(a.tail, a.head, 0.0, a.mult, -a.length);
  auto r = net.solve();
  if (y) *y = r.flow;
  return -r.primal;
}

// Random planar chain: k random points in the unit square, random edges with
// multiplicities in {-3..3} \ {0}.
inline hmass::PolyChain1 random_chain(std::mt19937_64& rng, int nodes, int edges) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, nodes - 1), mult(1, 3), sign(0, 1);
  std::vector<hmass::Point> pts;
  for (int i = 0; i < nodes; ++i) pts.push_back(hmass::Point{u(rng), u(rng)});
  hmass::PolyChain1 c{2, {}};
  for (int e = 0; e < edges; ++e) {
    int a = pick(rng), b = pick(rng);
    if (a == b) continue;
    c.add(pts[a], pts[b], (sign(rng) ? 1 : -1) * mult(rng));
  }
  return c;
}

// Random acyclic chain: edges point towards larger x, so every directed walk
// increases x strictly, also after crossings are split.
inline hmass::PolyChain1 random_acyclic_chain(std::mt19937_64& rng, int nodes, int edges) {
  std::uniform_real_distribution<double> u(0.0, 1.0), w(0.25, 3.0);
  std::uniform_int_distribution<int> pick(0, nodes - 1);
  std::vector<hmass::Point> pts;
  for (int i = 0; i < nodes; ++i) pts.push_back(hmass::Point{u(rng), u(rng)});
  std::sort(pts.begin(), pts.end());
  hmass::PolyChain1 c{2, {}};
  for (int e = 0; e < edges; ++e) {
    int a = pick(rng), b = pick(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    c.add(pts[a], pts[b], w(rng));
  }
  return c;
}

// Largest multiplicity left in (reassembled decomposition - original).
inline double reassembly_error(const hmass::GeoGraph& g, const hmass::Decomposition& d) {
  auto diff = hmass::canonicalize(d.reassemble() - g.to_chain());
  double worst = 0.0;
  for (const auto& s : diff.segments) worst = std::max(worst, std::abs(s.mult));
  return worst;
}

// Small transport instance in the unit square: 1-3 sources and 1-2 sinks
// with integer weights, up to two Steiner points, at most 6 nodes.
inline hmass::Instance random_instance(std::mt19937_64& rng, const hmass::TransportCost& h) {
  using hmass::Point;
  std::uniform_real_distribution<double> u(0, 1);
  std::uniform_int_distribution<int> w(1, 2), ns(1, 3), nt(1, 2), nst(0, 2);
  hmass::Instance in;
  in.cost = h;
  in.mu_plus.dim = in.mu_minus.dim = 2;
  int sp = 0;
  for (int k = ns(rng); k > 0; --k) {
    int m = w(rng);
    in.mu_plus.add(Point{u(rng), u(rng)}, m);
    sp += m;
  }
  const int sinks = std::min(nt(rng), sp);
  for (int k = 0; k < sinks; ++k) {
    int m = k + 1 == sinks ? sp : std::min(sp - (sinks - k - 1), w(rng));
    sp -= m;
    in.mu_minus.add(Point{u(rng), u(rng)}, m);
  }
  for (int k = nst(rng); k > 0 && in.mu_plus.atoms.size() + in.mu_minus.atoms.size() +
                                          in.steiner_points.size() < 6;
       --k)
    in.steiner_points.push_back(Point{u(rng), u(rng)});
  return in;
}

}  // namespace oracle
