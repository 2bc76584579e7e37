#include "hmass/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "hmass/errors.hpp"

namespace hmass {

std::vector<double> GeoGraph::defect() const {
  std::vector<double> d(nodes.size(), 0.0);
  for (const Arc& a : arcs) {
    d[a.head] += a.mult;
    d[a.tail] -= a.mult;
  }
  return d;
}

Chain0 GeoGraph::boundary(const Tolerance& tol) const { return hmass::boundary(to_chain(), tol); }

PolyChain1 GeoGraph::to_chain() const {
  PolyChain1 c{dim, {}};
  for (const Arc& a : arcs) c.add(nodes[a.tail], nodes[a.head], a.mult);
  return c;
}

double GeoGraph::mass() const {
  double m = 0.0;
  for (const Arc& a : arcs) m += a.mult * a.length;
  return m;
}

double PathFlux::length() const {
  double l = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) l += distance(points[i], points[i + 1]);
  return l;
}

PolyChain1 PathFlux::as_chain(std::size_t dim) const {
  PolyChain1 c{dim, {}};
  for (std::size_t i = 0; i + 1 < points.size(); ++i) c.add(points[i], points[i + 1], weight);
  return c;
}

PolyChain1 Decomposition::reassemble() const {
  PolyChain1 c{dim, {}};
  for (const auto& p : paths) c = c + p.as_chain(dim);
  for (const auto& p : cycles) c = c + p.as_chain(dim);
  return c;
}

double Decomposition::mass() const {
  double m = 0.0;
  for (const auto& p : paths) m += p.weight * p.length();
  for (const auto& p : cycles) m += p.weight * p.length();
  return m;
}

GeoGraph build_graph(const PolyChain1& chain, const Tolerance& tol) {
  PolyChain1 canon = canonicalize(chain, tol);
  GeoGraph g;
  g.dim = canon.dim;
  std::map<Point, std::size_t> ids;
  for (const auto& s : canon.segments) {
    ids.emplace(s.seg.a, 0);
    ids.emplace(s.seg.b, 0);
  }
  for (auto& [p, id] : ids) {
    id = g.nodes.size();
    g.nodes.push_back(p);
  }
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    for (std::size_t j = i + 1; j < g.nodes.size(); ++j) {
      if (g.nodes[j][0] - g.nodes[i][0] > tol.eps_point) break;
      if (distance(g.nodes[i], g.nodes[j]) <= tol.eps_point)
        throw InputError("nodes " + std::to_string(i) + " and " + std::to_string(j) +
                         " lie within eps_point");
    }
  for (const auto& s : canon.segments) {
    std::size_t a = ids.at(s.seg.a), b = ids.at(s.seg.b);
    if (s.mult > 0)
      g.arcs.push_back({a, b, s.seg.length(), s.mult});
    else
      g.arcs.push_back({b, a, s.seg.length(), -s.mult});
  }
  return g;
}

namespace {

struct Residual {
  const GeoGraph& g;
  std::vector<double> r, out_sum, in_sum;
  std::vector<std::vector<std::size_t>> out;  // arc ids, ascending

  explicit Residual(const GeoGraph& graph)
      : g(graph), out_sum(graph.nodes.size(), 0.0), in_sum(graph.nodes.size(), 0.0),
        out(graph.nodes.size()) {
    for (std::size_t a = 0; a < g.arcs.size(); ++a) {
      r.push_back(g.arcs[a].mult);
      out_sum[g.arcs[a].tail] += g.arcs[a].mult;
      in_sum[g.arcs[a].head] += g.arcs[a].mult;
      out[g.arcs[a].tail].push_back(a);
    }
  }

  double source_excess(std::size_t v) const { return out_sum[v] - in_sum[v]; }

  std::size_t next_arc(std::size_t v, double eps) const {
    for (std::size_t a : out[v])
      if (r[a] > eps) return a;
    return g.arcs.size();
  }

  void subtract(std::size_t a, double w) {
    r[a] -= w;
    out_sum[g.arcs[a].tail] -= w;
    in_sum[g.arcs[a].head] -= w;
  }

  PathFlux extract(const std::vector<std::size_t>& arcs, double w) {
    PathFlux p;
    p.weight = w;
    p.nodes.push_back(g.arcs[arcs.front()].tail);
    for (std::size_t a : arcs) {
      subtract(a, w);
      p.nodes.push_back(g.arcs[a].head);
    }
    for (std::size_t v : p.nodes) p.points.push_back(g.nodes[v]);
    return p;
  }

  double bottleneck(const std::vector<std::size_t>& arcs) const {
    double w = std::numeric_limits<double>::infinity();
    for (std::size_t a : arcs) w = std::min(w, r[a]);
    return w;
  }
};

}  // namespace

Decomposition decompose(const GeoGraph& g, double eps) {
  Decomposition dec;
  dec.dim = g.dim;
  Residual res(g);
  const std::size_t n = g.nodes.size();
  const std::size_t none = g.arcs.size();
  double dropped = 0.0;
  std::vector<char> exhausted(n, 0);
  std::vector<std::ptrdiff_t> pos(n, -1);

  // Walk from `start` along the smallest residual arcs; a revisited node
  // closes a cycle, which is extracted on the spot.
  auto walk = [&](std::size_t start, bool stop_at_sink, std::vector<std::size_t>& arcs,
                  std::vector<std::size_t>& seq) {
    arcs.clear();
    seq.assign(1, start);
    pos[start] = 0;
    std::size_t cur = start;
    for (;;) {
      if (stop_at_sink && cur != start && -res.source_excess(cur) > eps) break;
      std::size_t a = res.next_arc(cur, eps);
      if (a == none) break;
      std::size_t nxt = g.arcs[a].head;
      if (pos[nxt] >= 0) {
        std::vector<std::size_t> cyc(arcs.begin() + pos[nxt], arcs.end());
        cyc.push_back(a);
        dec.cycles.push_back(res.extract(cyc, res.bottleneck(cyc)));
        for (std::size_t k = static_cast<std::size_t>(pos[nxt]) + 1; k < seq.size(); ++k) pos[seq[k]] = -1;
        seq.resize(static_cast<std::size_t>(pos[nxt]) + 1);
        arcs.resize(static_cast<std::size_t>(pos[nxt]));
        cur = nxt;
        if (!stop_at_sink) break;
        continue;
      }
      pos[nxt] = static_cast<std::ptrdiff_t>(seq.size());
      seq.push_back(nxt);
      arcs.push_back(a);
      cur = nxt;
    }
    for (std::size_t v : seq) pos[v] = -1;
    return cur;
  };

  std::vector<std::size_t> arcs, seq;
  for (;;) {
    std::size_t src = n;
    for (std::size_t v = 0; v < n; ++v)
      if (!exhausted[v] && res.source_excess(v) > eps) {
        src = v;
        break;
      }
    if (src == n) break;
    std::size_t end = walk(src, true, arcs, seq);
    if (arcs.empty()) {
      exhausted[src] = 1;
      continue;
    }
    double w = std::min(res.bottleneck(arcs), res.source_excess(src));
    double deficit = -res.source_excess(end);
    if (deficit > eps) w = std::min(w, deficit);
    dec.paths.push_back(res.extract(arcs, w));
  }

  for (;;) {
    std::size_t a0 = none;
    for (std::size_t a = 0; a < g.arcs.size(); ++a)
      if (res.r[a] > eps) {
        a0 = a;
        break;
      }
    if (a0 == none) break;
    std::size_t before = dec.cycles.size();
    walk(g.arcs[a0].tail, false, arcs, seq);
    if (dec.cycles.size() == before) {
      // Dead end: numerical leftovers that do not close up.
      for (std::size_t a : arcs) {
        dropped = std::max(dropped, res.r[a]);
        res.subtract(a, res.r[a]);
      }
      if (arcs.empty()) {
        dropped = std::max(dropped, res.r[a0]);
        res.subtract(a0, res.r[a0]);
      }
    }
  }
  dec.residual = dropped;
  for (double r : res.r) dec.residual = std::max(dec.residual, std::abs(r));
  return dec;
}

AcyclicityCertificate is_acyclic(const GeoGraph& g) {
  const std::size_t n = g.nodes.size();
  std::vector<std::vector<std::size_t>> out(n);
  for (std::size_t a = 0; a < g.arcs.size(); ++a)
    if (g.arcs[a].mult > 0) out[g.arcs[a].tail].push_back(a);
  std::vector<int> color(n, 0);  // 0 white, 1 on stack, 2 done
  AcyclicityCertificate cert;
  for (std::size_t s = 0; s < n; ++s) {
    if (color[s]) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{s, 0}};
    color[s] = 1;
    while (!stack.empty()) {
      auto& [v, k] = stack.back();
      if (k == out[v].size()) {
        color[v] = 2;
        stack.pop_back();
        continue;
      }
      std::size_t w = g.arcs[out[v][k++]].head;
      if (color[w] == 1) {
        cert.acyclic = false;
        std::size_t i = 0;
        while (stack[i].first != w) ++i;
        for (; i < stack.size(); ++i) cert.cycle.push_back(stack[i].first);
        cert.cycle.push_back(w);
        return cert;
      }
      if (color[w] == 0) {
        color[w] = 1;
        stack.emplace_back(w, 0);
      }
    }
  }
  return cert;
}

AcyclicSplit acyclic_part(const GeoGraph& g, double eps) {
  const std::size_t n = g.nodes.size();
  const std::size_t m = g.arcs.size();
  std::vector<double> x(m);
  for (std::size_t a = 0; a < m; ++a) x[a] = g.arcs[a].mult;

  // Residual arc 2a reduces x_a (head -> tail, cost -len), 2a+1 restores it
  // (tail -> head, cost +len).
  auto cap = [&](std::size_t ra) {
    std::size_t a = ra / 2;
    return ra % 2 == 0 ? x[a] : g.arcs[a].mult - x[a];
  };
  auto from = [&](std::size_t ra) { return ra % 2 == 0 ? g.arcs[ra / 2].head : g.arcs[ra / 2].tail; };
  auto to = [&](std::size_t ra) { return ra % 2 == 0 ? g.arcs[ra / 2].tail : g.arcs[ra / 2].head; };
  auto cost = [&](std::size_t ra) { return ra % 2 == 0 ? -g.arcs[ra / 2].length : g.arcs[ra / 2].length; };

  const std::size_t max_rounds = 10 * (m + 1) * (m + 1) + 100;
  for (std::size_t round = 0;; ++round) {
    if (round > max_rounds) throw ToleranceError("acyclic_part: cycle cancelling did not terminate");
    std::vector<double> dist(n, 0.0);
    std::vector<std::size_t> pred(n, 2 * m);
    std::size_t touched = n;
    for (std::size_t it = 0; it < n; ++it) {
      touched = n;
      for (std::size_t ra = 0; ra < 2 * m; ++ra) {
        if (cap(ra) <= eps) continue;
        double nd = dist[from(ra)] + cost(ra);
        if (nd < dist[to(ra)] - 1e-12) {
          dist[to(ra)] = nd;
          pred[to(ra)] = ra;
          touched = to(ra);
        }
      }
      if (touched == n) break;
    }
    if (touched == n) break;
    std::size_t v = touched;
    for (std::size_t k = 0; k < n; ++k) v = from(pred[v]);
    std::vector<std::size_t> cyc;
    std::size_t u = v;
    do {
      cyc.push_back(pred[u]);
      u = from(pred[u]);
    } while (u != v);
    double w = std::numeric_limits<double>::infinity();
    double c = 0.0;
    for (std::size_t ra : cyc) {
      w = std::min(w, cap(ra));
      c += cost(ra);
    }
    if (c >= -1e-12) break;
    for (std::size_t ra : cyc) {
      std::size_t a = ra / 2;
      if (ra % 2 == 0)
        x[a] = cap(ra) == w ? 0.0 : x[a] - w;
      else
        x[a] = cap(ra) == w ? g.arcs[a].mult : x[a] + w;
    }
  }

  AcyclicSplit out;
  out.acyclic.dim = g.dim;
  out.acyclic.nodes = g.nodes;
  out.cycles_removed.dim = g.dim;
  for (std::size_t a = 0; a < m; ++a) {
    const auto& arc = g.arcs[a];
    if (x[a] > eps) out.acyclic.arcs.push_back({arc.tail, arc.head, arc.length, x[a]});
    double b = arc.mult - x[a];
    if (b > eps) out.cycles_removed.add(g.nodes[arc.tail], g.nodes[arc.head], b);
  }
  return out;
}

}  // namespace hmass
