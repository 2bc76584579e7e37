#include "hmass/prune.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <string>

#include "hmass/errors.hpp"

namespace hmass {

bool shift_is_valid(const Point& shift, const std::vector<Point>& vertices, int finest_level,
                    double eps) {
  const double w = std::ldexp(1.0, -finest_level);
  for (const Point& v : vertices) {
    if (v.dim() != shift.dim()) throw InputError("shift dimension does not match the chain");
    for (std::size_t i = 0; i < v.dim(); ++i) {
      double r = (v[i] - shift[i]) / w;
      if (std::abs(r - std::round(r)) * w <= eps) return false;
    }
  }
  return true;
}

Point choose_shift_from(const std::function<Point()>& draw, const std::vector<Point>& vertices,
                        int finest_level, double eps) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    Point x = draw();
    if (shift_is_valid(x, vertices, finest_level, eps)) return x;
  }
  throw InputError("no valid grid shift after 64 attempts");
}

Point choose_shift(std::uint64_t seed, std::size_t dim, const std::vector<Point>& vertices,
                   int finest_level, double eps) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return choose_shift_from(
      [&] {
        Point x(dim);
        for (std::size_t i = 0; i < dim; ++i) x[i] = unit(rng);
        return x;
      },
      vertices, finest_level, eps);
}

namespace {

struct Hit {
  std::size_t seg = 0;
  double t = 0.0;
  double s = 0.0;  // arclength along the path
};

// First (or last) parameter in [0,1] where a -> b meets shift + k w, within eps.
std::optional<double> extreme_hit(double a, double b, double shift, double w, double len,
                                  double eps, bool first) {
  const double epsc = eps * std::abs(b - a) / len;  // eps measured along the segment
  if (a == b) {
    double r = (a - shift) / w;
    if (std::abs(r - std::round(r)) * w <= eps) return first ? 0.0 : 1.0;
    return std::nullopt;
  }
  const bool up = b > a;
  double c;
  if (up == first) {
    // Smallest hyperplane value >= min endpoint side.
    double lo = up ? a : b;
    c = shift + std::ceil((lo - epsc - shift) / w) * w;
    if (c > std::max(a, b) + epsc) return std::nullopt;
  } else {
    double hi = up ? b : a;
    c = shift + std::floor((hi + epsc - shift) / w) * w;
    if (c < std::min(a, b) - epsc) return std::nullopt;
  }
  return std::clamp((c - a) / (b - a), 0.0, 1.0);
}

}  // namespace

PruneResult prune_to_grid(const Decomposition& dec, const Grid& grid, const Tolerance& tol) {
  if (!dec.cycles.empty())
    throw InputError("prune_to_grid needs an acyclic flux (decomposition has cycles)");
  const double w = grid.width();
  PruneResult out;
  out.level = grid.level;
  out.pruned.dim = dec.dim;
  PolyChain1 sum{dec.dim, {}};
  for (std::size_t p = 0; p < dec.paths.size(); ++p) {
    const PathFlux& path = dec.paths[p];
    KeptInterval kept{p, false, 0.0, 0.0};
    std::optional<Hit> first, last;
    double s0 = 0.0;
    for (std::size_t j = 0; j + 1 < path.points.size(); ++j) {
      const Point& a = path.points[j];
      const Point& b = path.points[j + 1];
      const double len = distance(a, b);
      for (std::size_t i = 0; i < a.dim(); ++i) {
        if (auto t = extreme_hit(a[i], b[i], grid.shift[i], w, len, tol.eps_point, true)) {
          double s = s0 + *t * len;
          if (!first || s < first->s) first = Hit{j, *t, s};
        }
        if (auto t = extreme_hit(a[i], b[i], grid.shift[i], w, len, tol.eps_point, false)) {
          double s = s0 + *t * len;
          if (!last || s > last->s) last = Hit{j, *t, s};
        }
      }
      s0 += len;
    }
    if (first && last && last->s - first->s > tol.eps_point) {
      kept = {p, true, first->s, last->s};
      PathFlux q;
      q.weight = path.weight;
      q.points.push_back(lerp(path.points[first->seg], path.points[first->seg + 1], first->t));
      for (std::size_t j = first->seg + 1; j <= last->seg; ++j) q.points.push_back(path.points[j]);
      q.points.push_back(lerp(path.points[last->seg], path.points[last->seg + 1], last->t));
      // Drop zero-length pieces created by hits at vertices.
      std::vector<Point> pts;
      for (auto& x : q.points)
        if (pts.empty() || distance(pts.back(), x) > tol.eps_point) pts.push_back(std::move(x));
      q.points = std::move(pts);
      if (q.points.size() >= 2) {
        sum = sum + q.as_chain(dec.dim);
        out.pruned.paths.push_back(std::move(q));
      } else {
        kept.kept = false;
      }
    }
    out.kept.push_back(kept);
  }
  out.chain = canonicalize(sum, tol);
  return out;
}

TruncateResult truncate_boundary_pairs(const Decomposition& dec, long long n, const Tolerance& tol) {
  if (n < 0) throw InputError("pair count must be >= 0");
  if (!dec.cycles.empty())
    throw InputError("truncate_boundary_pairs needs an acyclic flux (decomposition has cycles)");
  TruncateResult out;
  out.kept.dim = dec.dim;
  std::vector<Point> ends;
  for (const auto& p : dec.paths) {
    ends.push_back(p.points.front());
    ends.push_back(p.points.back());
  }
  PointClusters cl = cluster_points(ends, tol.eps_point);
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> groups;
  for (std::size_t p = 0; p < dec.paths.size(); ++p)
    groups[{cl.id[2 * p], cl.id[2 * p + 1]}].push_back(p);
  struct Group {
    std::pair<std::size_t, std::size_t> key;
    double weight;
    const std::vector<std::size_t>* members;
  };
  std::vector<Group> order;
  for (const auto& [key, mem] : groups) {
    double wsum = 0.0;
    for (std::size_t p : mem) wsum += dec.paths[p].weight;
    order.push_back({key, wsum, &mem});
  }
  // Keys are ordered like the lexicographic order of their points.
  std::stable_sort(order.begin(), order.end(),
                   [](const Group& a, const Group& b) { return a.weight > b.weight; });
  out.groups = order.size();
  PolyChain1 sum{dec.dim, {}};
  for (std::size_t g = 0; g < order.size(); ++g) {
    if (static_cast<long long>(g) < n) {
      for (std::size_t p : *order[g].members) {
        sum = sum + dec.paths[p].as_chain(dec.dim);
        out.kept.paths.push_back(dec.paths[p]);
      }
    } else {
      out.removed_weight += order[g].weight;
    }
  }
  out.chain = canonicalize(sum, tol);
  return out;
}

ApproxReport diagonal_approx(const PolyChain1& chain, const TransportCost& h,
                             const ApproxOptions& opts) {
  const Tolerance& tol = opts.tol;
  PolyChain1 A = canonicalize(chain, tol);
  GeoGraph g = build_graph(A, tol);
  AcyclicSplit split = acyclic_part(g, tol.eps_mass);
  Decomposition dec = decompose(split.acyclic, tol.eps_mass);
  if (!dec.cycles.empty()) throw ToleranceError("acyclic part still decomposes with cycles");

  ApproxReport rep;
  rep.mass = mass(A);
  rep.h_mass = h_mass(A, h);
  rep.boundary_mass = mass0(boundary(A, tol));
  int finest = 0;
  for (const auto& st : opts.schedule)
    if (st.level) finest = std::max(finest, *st.level);
  if (opts.shift) {
    rep.shift = *opts.shift;
  } else {
    rep.shift = choose_shift(opts.seed, A.dim, g.nodes, finest, tol.eps_point);
  }

  for (const auto& st : opts.schedule) {
    Decomposition d = dec;
    if (st.level) d = prune_to_grid(d, Grid{rep.shift, *st.level}, tol).pruned;
    PolyChain1 part{A.dim, {}};
    if (st.pairs) {
      part = truncate_boundary_pairs(d, *st.pairs, tol).chain;
    } else {
      for (const auto& p : d.paths) part = part + p.as_chain(A.dim);
    }
    ApproxRecord r;
    r.step = st;
    r.chain = canonicalize(part + split.cycles_removed, tol);
    r.mass_gap = mass(canonicalize(A - r.chain, tol));
    r.h_mass = h_mass(r.chain, h);
    r.h_mass_gap = rep.h_mass - r.h_mass;
    Chain0 bd = boundary(r.chain, tol);
    r.boundary_mass = mass0(bd);
    r.boundary_support = bd.atoms.size();
    rep.steps.push_back(std::move(r));
  }
  return rep;
}

double shrinkage_violation(const PolyChain1& approx, const PolyChain1& chain, const Tolerance& tol) {
  PolyChain1 A = canonicalize(chain, tol);
  PolyChain1 An = canonicalize(approx, tol);
  auto dist_to_segment = [](const Point& x, const Segment& s) {
    double len2 = 0.0, dot = 0.0;
    for (std::size_t i = 0; i < x.dim(); ++i) {
      len2 += (s.b[i] - s.a[i]) * (s.b[i] - s.a[i]);
      dot += (x[i] - s.a[i]) * (s.b[i] - s.a[i]);
    }
    return distance(x, lerp(s.a, s.b, std::clamp(dot / len2, 0.0, 1.0)));
  };
  double worst = 0.0;
  for (const auto& piece : An.segments) {
    const WeightedSegment* host = nullptr;
    for (const auto& s : A.segments) {
      if (dist_to_segment(piece.seg.a, s.seg) <= tol.eps_point &&
          dist_to_segment(piece.seg.b, s.seg) <= tol.eps_point) {
        host = &s;
        break;
      }
    }
    double v;
    if (!host)
      v = std::abs(piece.mult);
    else if (piece.mult * host->mult < 0)
      v = std::abs(piece.mult);
    else
      v = std::abs(piece.mult) - std::abs(host->mult);
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace hmass
