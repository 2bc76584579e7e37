#include "hmass/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <omp.h>

namespace hmass::kernels {

namespace {

double dot(const Point& a, const Point& b, const Point& c, const Point& d) {
  // (b - a) . (d - c)
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += (b[i] - a[i]) * (d[i] - c[i]);
  return s;
}

double point_line_distance(const Point& x, const Segment& seg) {
  double len2 = dot(seg.a, seg.b, seg.a, seg.b);
  double t = dot(seg.a, x, seg.a, seg.b) / len2;
  return distance(x, lerp(seg.a, seg.b, t));
}

bool interior(double t, double len, double eps) {
  return t * len > eps && (1.0 - t) * len > eps;
}

void contacts_of_pair(std::span<const Segment> segs, std::size_t i, std::size_t j,
                      double eps, std::vector<double>& out_i, std::vector<double>& out_j) {
  const Segment& p = segs[i];
  const Segment& q = segs[j];
  SegmentContact c = segment_contact(p, q, eps);
  const double lp = p.length();
  const double lq = q.length();
  if (c.kind == SegmentContact::Kind::point) {
    if (interior(c.s, lp, eps)) out_i.push_back(c.s);
    if (interior(c.t, lq, eps)) out_j.push_back(c.t);
  } else if (c.kind == SegmentContact::Kind::overlap) {
    double pp = dot(p.a, p.b, p.a, p.b);
    double qq = dot(q.a, q.b, q.a, q.b);
    for (const Point* x : {&q.a, &q.b}) {
      double t = dot(p.a, *x, p.a, p.b) / pp;
      if (t > 0.0 && t < 1.0 && interior(t, lp, eps)) out_i.push_back(t);
    }
    for (const Point* x : {&p.a, &p.b}) {
      double t = dot(q.a, *x, q.a, q.b) / qq;
      if (t > 0.0 && t < 1.0 && interior(t, lq, eps)) out_j.push_back(t);
    }
  }
}

void sort_unique(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

SegmentContact segment_contact(const Segment& p, const Segment& q, double eps) {
  SegmentContact out;
  const double lp = p.length();
  const double lq = q.length();
  // Collinear overlap: both endpoints of the shorter one near the other's line.
  if (point_line_distance(q.a, p) <= eps && point_line_distance(q.b, p) <= eps &&
      point_line_distance(p.a, q) <= eps && point_line_distance(p.b, q) <= eps) {
    double pp = lp * lp;
    double ta = dot(p.a, q.a, p.a, p.b) / pp;
    double tb = dot(p.a, q.b, p.a, p.b) / pp;
    double lo = std::min(ta, tb), hi = std::max(ta, tb);
    if ((std::min(hi, 1.0) - std::max(lo, 0.0)) * lp > eps) {
      out.kind = SegmentContact::Kind::overlap;
      return out;
    }
  }
  // Closest points of two segments (Ericson, Real-Time Collision Detection 5.1.9).
  const double a = lp * lp;
  const double e = lq * lq;
  const double b = dot(p.a, p.b, q.a, q.b);
  double c = 0.0, f = 0.0;
  for (std::size_t k = 0; k < p.a.dim(); ++k) {
    double r = p.a[k] - q.a[k];
    c += (p.b[k] - p.a[k]) * r;
    f += (q.b[k] - q.a[k]) * r;
  }
  const double denom = a * e - b * b;
  double s = 0.0;
  if (denom > 1e-15 * a * e) s = std::clamp((b * f - c * e) / denom, 0.0, 1.0);
  double t = (b * s + f) / e;
  if (t < 0.0) {
    t = 0.0;
    s = std::clamp(-c / a, 0.0, 1.0);
  } else if (t > 1.0) {
    t = 1.0;
    s = std::clamp((b - c) / a, 0.0, 1.0);
  }
  if (distance(lerp(p.a, p.b, s), lerp(q.a, q.b, t)) <= eps) {
    out.kind = SegmentContact::Kind::point;
    out.s = s;
    out.t = t;
  }
  return out;
}

std::vector<double> subadditive_closure_serial(std::span<const double> psi) {
  std::vector<double> g(psi.begin(), psi.end());
  // Ascending order: when g[k] is updated every g[i], i < k, is already
  // closed, so a single sweep reaches the fixpoint.
  for (std::size_t k = 2; k < g.size(); ++k) {
    double best = g[k];
    for (std::size_t i = 1; i <= k / 2; ++i) best = std::min(best, g[i] + g[k - i]);
    g[k] = best;
  }
  return g;
}

std::vector<double> subadditive_closure_parallel(std::span<const double> psi) {
  std::vector<double> g(psi.begin(), psi.end());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(g.size());
  // Blocks [s, s + B) in ascending order. Splits with both parts below s only
  // read closed entries and run in parallel; splits with a part inside the
  // block are finished serially in ascending k. Every k sees the same
  // candidates as in the serial sweep, so the result is bitwise equal.
  constexpr std::ptrdiff_t B = 256;
  for (std::ptrdiff_t s = 2; s < n; s += B) {
    const std::ptrdiff_t e = std::min(n, s + B);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = s; k < e; ++k) {
      double best = g[k];
      for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(1, k - s + 1); i <= k / 2; ++i)
        best = std::min(best, g[i] + g[k - i]);
      g[k] = best;
    }
    for (std::ptrdiff_t k = s; k < e; ++k) {
      double best = g[k];
      for (std::ptrdiff_t i = 1; i <= std::min(k - s, k / 2); ++i)
        best = std::min(best, g[i] + g[k - i]);
      g[k] = best;
    }
  }
  return g;
}

std::vector<std::vector<double>> split_parameters_serial(std::span<const Segment> segs,
                                                         double eps) {
  std::vector<std::vector<double>> out(segs.size());
  for (std::size_t i = 0; i < segs.size(); ++i)
    for (std::size_t j = i + 1; j < segs.size(); ++j) contacts_of_pair(segs, i, j, eps, out[i], out[j]);
  for (auto& v : out) sort_unique(v);
  return out;
}

std::vector<std::vector<double>> split_parameters_parallel(std::span<const Segment> segs,
                                                           double eps) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(segs.size());
  // Row i collects contacts with j > i on both sides; merged afterwards in
  // row order so the result does not depend on scheduling.
  std::vector<std::vector<double>> own(segs.size());
  std::vector<std::vector<std::pair<std::size_t, double>>> other(segs.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    std::vector<double> tmp_j;
    for (std::ptrdiff_t j = i + 1; j < n; ++j) {
      tmp_j.clear();
      contacts_of_pair(segs, static_cast<std::size_t>(i), static_cast<std::size_t>(j), eps,
                       own[i], tmp_j);
      for (double t : tmp_j) other[i].emplace_back(static_cast<std::size_t>(j), t);
    }
  }
  std::vector<std::vector<double>> out = std::move(own);
  for (const auto& row : other)
    for (const auto& [j, t] : row) out[j].push_back(t);
  for (auto& v : out) sort_unique(v);
  return out;
}

namespace {

struct DisjointSet {
  std::vector<std::size_t> parent;
  explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

/// Cost of the unique flow supported on the forest `mask`, or +inf when the
/// support has a cycle or an unbalanced component.
double forest_cost(const ForestProblem& p, std::uint64_t mask,
                   const std::function<double(double)>& h, std::vector<double>* flow_out) {
  const std::size_t m = p.edges.size();
  DisjointSet ds(p.nodes);
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(p.nodes);
  for (std::size_t e = 0; e < m; ++e) {
    if (!(mask >> e & 1u)) continue;
    auto [u, v] = p.edges[e];
    if (!ds.unite(u, v)) return std::numeric_limits<double>::infinity();
    adj[u].emplace_back(v, e);
    adj[v].emplace_back(u, e);
  }
  std::vector<double> comp(p.nodes, 0.0);
  for (std::size_t v = 0; v < p.nodes; ++v) comp[ds.find(v)] += p.supply[v];
  for (std::size_t v = 0; v < p.nodes; ++v)
    if (ds.find(v) == v && std::abs(comp[v]) > p.balance_eps)
      return std::numeric_limits<double>::infinity();

  // Root each tree at its smallest node; flow on a tree edge equals the
  // supply of the subtree below it.
  std::vector<double> flow(m, 0.0);
  std::vector<double> sub(p.supply);
  std::vector<char> seen(p.nodes, 0);
  std::vector<std::size_t> order, parent_edge(p.nodes, m), parent_node(p.nodes, p.nodes);
  for (std::size_t r = 0; r < p.nodes; ++r) {
    if (seen[r]) continue;
    seen[r] = 1;
    std::size_t head = order.size();
    order.push_back(r);
    while (head < order.size()) {
      std::size_t u = order[head++];
      for (auto [v, e] : adj[u]) {
        if (seen[v]) continue;
        seen[v] = 1;
        parent_edge[v] = e;
        parent_node[v] = u;
        order.push_back(v);
      }
    }
  }
  double cost = 0.0;
  for (std::size_t k = order.size(); k-- > 0;) {
    std::size_t v = order[k];
    std::size_t e = parent_edge[v];
    if (e == m) continue;
    std::size_t u = parent_node[v];
    double x = p.edges[e].first == v ? sub[v] : -sub[v];
    flow[e] = x;
    sub[u] += sub[v];
    cost += h(std::abs(x)) * p.lengths[e];
  }
  if (flow_out) *flow_out = std::move(flow);
  return cost;
}

bool better(double c, std::uint64_t mask, double best_c, std::uint64_t best_mask) {
  return c < best_c || (c == best_c && mask < best_mask);
}

}  // namespace

ForestOptimum best_forest_serial(const ForestProblem& p,
                                 const std::function<double(double)>& h) {
  ForestOptimum out;
  out.cost = std::numeric_limits<double>::infinity();
  const std::uint64_t total = std::uint64_t{1} << p.edges.size();
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    double c = forest_cost(p, mask, h, nullptr);
    if (!std::isfinite(c)) continue;
    ++out.feasible_supports;
    if (!out.found || better(c, mask, out.cost, out.mask)) {
      out.found = true;
      out.cost = c;
      out.mask = mask;
    }
  }
  if (out.found) forest_cost(p, out.mask, h, &out.flow);
  return out;
}

ForestOptimum best_forest_parallel(const ForestProblem& p,
                                   const std::function<double(double)>& h) {
  const std::int64_t total = std::int64_t{1} << p.edges.size();
  const double inf = std::numeric_limits<double>::infinity();
  double best_c = inf;
  std::uint64_t best_mask = 0;
  std::uint64_t feasible = 0;
#pragma omp parallel
  {
    double local_c = inf;
    std::uint64_t local_mask = 0;
    std::uint64_t local_feasible = 0;
#pragma omp for schedule(static) nowait
    for (std::int64_t m = 0; m < total; ++m) {
      auto mask = static_cast<std::uint64_t>(m);
      double c = forest_cost(p, mask, h, nullptr);
      if (!std::isfinite(c)) continue;
      ++local_feasible;
      if (better(c, mask, local_c, local_mask) || local_c == inf) {
        local_c = c;
        local_mask = mask;
      }
    }
#pragma omp critical
    {
      feasible += local_feasible;
      if (local_c < inf && (best_c == inf || better(local_c, local_mask, best_c, best_mask))) {
        best_c = local_c;
        best_mask = local_mask;
      }
    }
  }
  ForestOptimum out;
  out.feasible_supports = feasible;
  if (best_c < inf) {
    out.found = true;
    out.cost = best_c;
    out.mask = best_mask;
    forest_cost(p, best_mask, h, &out.flow);
  } else {
    out.cost = inf;
  }
  return out;
}

}  // namespace hmass::kernels
