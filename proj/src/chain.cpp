#include "hmass/chain.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "hmass/cost.hpp"
#include "hmass/errors.hpp"
#include "hmass/kernels.hpp"

namespace hmass {

namespace {

void check_point(const Point& p, std::size_t dim, const std::string& where) {
  if (p.dim() != dim)
    throw InputError(where + ": dimension " + std::to_string(p.dim()) + " != " +
                     std::to_string(dim));
  if (!p.finite()) throw InputError(where + ": non-finite coordinate");
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

void validate(const PolyChain1& chain, const Tolerance& tol) {
  if (chain.dim == 0) throw InputError("chain dimension must be >= 1");
  for (std::size_t i = 0; i < chain.segments.size(); ++i) {
    const auto& s = chain.segments[i];
    const std::string where = "segment " + std::to_string(i);
    check_point(s.seg.a, chain.dim, where);
    check_point(s.seg.b, chain.dim, where);
    if (!std::isfinite(s.mult)) throw InputError(where + ": non-finite multiplicity");
    if (s.seg.length() <= tol.eps_point) throw InputError(where + ": degenerate segment");
  }
}

void validate(const Chain0& chain) {
  if (chain.dim == 0) throw InputError("chain dimension must be >= 1");
  for (std::size_t i = 0; i < chain.atoms.size(); ++i) {
    const std::string where = "atom " + std::to_string(i);
    check_point(chain.atoms[i].x, chain.dim, where);
    if (!std::isfinite(chain.atoms[i].w)) throw InputError(where + ": non-finite weight");
  }
}

PointClusters cluster_points(const std::vector<Point>& pts, double eps,
                             const std::vector<int>& priority) {
  const std::size_t n = pts.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::is_lt(pts[a] <=> pts[b]) || (pts[a] == pts[b] && a < b);
  });
  // Sweep along the first coordinate; only points within eps there can merge.
  UnionFind uf(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Point& p = pts[order[k]];
    for (std::size_t l = k + 1; l < n; ++l) {
      const Point& q = pts[order[l]];
      if (q[0] - p[0] > eps) break;
      if (distance(p, q) <= eps) uf.unite(order[k], order[l]);
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < n; ++i) members[uf.find(i)].push_back(i);

  auto prio = [&](std::size_t i) { return priority.empty() ? 0 : priority[i]; };
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> clusters;  // (rep index, members)
  for (auto& [root, mem] : members) {
    std::size_t rep = mem.front();
    for (std::size_t i : mem) {
      if (prio(i) < prio(rep) || (prio(i) == prio(rep) && std::is_lt(pts[i] <=> pts[rep])))
        rep = i;
    }
    for (std::size_t i = 0; i < mem.size(); ++i)
      for (std::size_t j = i + 1; j < mem.size(); ++j)
        if (distance(pts[mem[i]], pts[mem[j]]) > eps)
          throw InputError("eps_point merges distinct points (cluster wider than eps_point)");
    clusters.emplace_back(rep, std::move(mem));
  }
  std::sort(clusters.begin(), clusters.end(),
            [&](const auto& a, const auto& b) { return std::is_lt(pts[a.first] <=> pts[b.first]); });
  PointClusters out;
  out.id.assign(n, 0);
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    out.reps.push_back(pts[clusters[c].first]);
    for (std::size_t i : clusters[c].second) out.id[i] = c;
  }
  return out;
}

PolyChain1 canonicalize(const PolyChain1& chain, const Tolerance& tol, Exec exec) {
  validate(chain, tol);
  PolyChain1 out{chain.dim, {}};
  if (chain.empty()) return out;

  std::vector<Segment> segs;
  segs.reserve(chain.segments.size());
  for (const auto& s : chain.segments) segs.push_back(s.seg);
  auto params = exec == Exec::parallel ? kernels::split_parameters_parallel(segs, tol.eps_point)
                                       : kernels::split_parameters_serial(segs, tol.eps_point);

  std::vector<Point> pts;
  std::vector<int> prio;
  struct Piece {
    std::size_t a, b, seg;
  };
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const Segment& s = segs[i];
    const double len = s.length();
    std::vector<double> ts;
    for (double t : params[i]) {
      double last = ts.empty() ? 0.0 : ts.back();
      if ((t - last) * len > tol.eps_point && (1.0 - t) * len > tol.eps_point) ts.push_back(t);
    }
    std::size_t prev = pts.size();
    pts.push_back(s.a);
    prio.push_back(0);
    for (double t : ts) {
      std::size_t cur = pts.size();
      pts.push_back(lerp(s.a, s.b, t));
      prio.push_back(1);
      pieces.push_back({prev, cur, i});
      prev = cur;
    }
    std::size_t end = pts.size();
    pts.push_back(s.b);
    prio.push_back(0);
    pieces.push_back({prev, end, i});
  }

  PointClusters cl = cluster_points(pts, tol.eps_point, prio);
  std::map<std::pair<std::size_t, std::size_t>, double> acc;
  for (const Piece& p : pieces) {
    std::size_t ia = cl.id[p.a], ib = cl.id[p.b];
    if (ia == ib)
      throw InputError("segment " + std::to_string(p.seg) + ": degenerate piece after snapping");
    double m = chain.segments[p.seg].mult;
    if (ia < ib)
      acc[{ia, ib}] += m;
    else
      acc[{ib, ia}] -= m;
  }
  for (const auto& [key, m] : acc) {
    if (std::abs(m) < tol.eps_mass) continue;
    out.add(cl.reps[key.first], cl.reps[key.second], m);
  }
  return out;
}

Chain0 canonicalize(const Chain0& chain, const Tolerance& tol) {
  validate(chain);
  Chain0 out{chain.dim, {}};
  if (chain.empty()) return out;
  std::vector<Point> pts;
  pts.reserve(chain.atoms.size());
  for (const auto& a : chain.atoms) pts.push_back(a.x);
  PointClusters cl = cluster_points(pts, tol.eps_point);
  std::vector<double> w(cl.reps.size(), 0.0);
  for (std::size_t i = 0; i < pts.size(); ++i) w[cl.id[i]] += chain.atoms[i].w;
  for (std::size_t c = 0; c < w.size(); ++c)
    if (std::abs(w[c]) >= tol.eps_mass) out.add(cl.reps[c], w[c]);
  return out;
}

Chain0 boundary(const PolyChain1& chain, const Tolerance& tol) {
  validate(chain, tol);
  Chain0 raw{chain.dim, {}};
  for (const auto& s : chain.segments) {
    raw.add(s.seg.b, s.mult);
    raw.add(s.seg.a, -s.mult);
  }
  return canonicalize(raw, tol);
}

double mass(const PolyChain1& chain) {
  double m = 0.0;
  for (const auto& s : chain.segments) m += std::abs(s.mult) * s.seg.length();
  return m;
}

double mass0(const Chain0& chain) {
  double m = 0.0;
  for (const auto& a : chain.atoms) m += std::abs(a.w);
  return m;
}

double h_mass(const PolyChain1& chain, const TransportCost& h) {
  double m = 0.0;
  for (const auto& s : chain.segments) m += h(std::abs(s.mult)) * s.seg.length();
  return m;
}

PolyChain1 operator+(const PolyChain1& a, const PolyChain1& b) {
  if (!a.empty() && !b.empty() && a.dim != b.dim) throw InputError("chain dimension mismatch");
  PolyChain1 out = a;
  if (a.empty()) out.dim = b.dim;
  out.segments.insert(out.segments.end(), b.segments.begin(), b.segments.end());
  return out;
}

PolyChain1 scaled(const PolyChain1& a, double c) {
  PolyChain1 out = a;
  for (auto& s : out.segments) s.mult *= c;
  return out;
}

PolyChain1 operator-(const PolyChain1& a, const PolyChain1& b) { return a + scaled(b, -1.0); }

Chain0 operator+(const Chain0& a, const Chain0& b) {
  if (!a.empty() && !b.empty() && a.dim != b.dim) throw InputError("chain dimension mismatch");
  Chain0 out = a;
  if (a.empty()) out.dim = b.dim;
  out.atoms.insert(out.atoms.end(), b.atoms.begin(), b.atoms.end());
  return out;
}

Chain0 operator-(const Chain0& a, const Chain0& b) {
  Chain0 nb = b;
  for (auto& x : nb.atoms) x.w = -x.w;
  return a + nb;
}

bool approx_equal(const PolyChain1& a, const PolyChain1& b, const Tolerance& tol, double slack) {
  PolyChain1 ca = canonicalize(a, tol), cb = canonicalize(b, tol);
  if (ca.segments.size() != cb.segments.size()) return false;
  for (std::size_t i = 0; i < ca.segments.size(); ++i) {
    const auto& x = ca.segments[i];
    const auto& y = cb.segments[i];
    if (distance(x.seg.a, y.seg.a) > tol.eps_point || distance(x.seg.b, y.seg.b) > tol.eps_point)
      return false;
    if (std::abs(x.mult - y.mult) > slack) return false;
  }
  return true;
}

bool approx_equal(const Chain0& a, const Chain0& b, const Tolerance& tol, double slack) {
  Chain0 d = canonicalize(a - b, tol);
  for (const auto& atom : d.atoms)
    if (std::abs(atom.w) > slack) return false;
  return true;
}

}  // namespace hmass
