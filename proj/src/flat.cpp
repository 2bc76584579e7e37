#include "hmass/flat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hmass/errors.hpp"
#include "hmass/mcf.hpp"

namespace hmass {

FlatNorm0Result flat_norm_0(const Chain0& t, double scale_cap, const Tolerance& tol) {
  if (!(scale_cap > 0) || !std::isfinite(scale_cap))
    throw InputError("scale_cap must be positive and finite");
  validate(t);
  const Chain0 c = canonicalize(t, tol);
  FlatNorm0Result out;
  out.filling.dim = c.dim;
  out.remainder = c;
  if (c.atoms.empty()) return out;

  std::vector<std::size_t> pos, neg;
  double sp = 0.0, sn = 0.0;
  for (std::size_t i = 0; i < c.atoms.size(); ++i) {
    if (c.atoms[i].w > 0) {
      pos.push_back(i);
      sp += c.atoms[i].w;
    } else {
      neg.push_back(i);
      sn -= c.atoms[i].w;
    }
  }
  // Nodes: atoms, then the drop node.
  const std::size_t drop = c.atoms.size();
  mcf::Network net(drop + 1);
  for (std::size_t i = 0; i < c.atoms.size(); ++i) net.add_supply(i, c.atoms[i].w);
  net.add_supply(drop, sn - sp);
  struct Pair {
    std::size_t p, n, arc;
  };
  std::vector<Pair> moves;
  for (std::size_t p : pos)
    for (std::size_t n : neg)
      moves.push_back({p, n, net.add_arc(p, n, 0, mcf::kInf, distance(c.atoms[p].x, c.atoms[n].x))});
  for (std::size_t p : pos) net.add_arc(p, drop, 0, mcf::kInf, scale_cap);
  for (std::size_t n : neg) net.add_arc(drop, n, 0, mcf::kInf, scale_cap);

  const mcf::Result r = net.solve();
  if (r.status != mcf::Status::optimal) throw ToleranceError("flat_norm_0: flow solve failed");
  // The two drop legs of a pair are charged separately, so each unit of
  // mass left in place costs scale_cap.
  out.value = r.primal;
  out.gap = r.gap();
  Chain0 moved{c.dim, {}};
  for (const Pair& m : moves) {
    double f = r.flow[m.arc];
    if (f <= tol.eps_mass) continue;
    out.filling.add(c.atoms[m.n].x, c.atoms[m.p].x, f);
    moved.add(c.atoms[m.p].x, f);
    moved.add(c.atoms[m.n].x, -f);
  }
  out.remainder = canonicalize(c - moved, tol);
  return out;
}

CellComplex2D::CellComplex2D(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  if (xs_.size() < 2 || ys_.size() < 2) throw InputError("complex needs at least one cell");
  for (const auto* v : {&xs_, &ys_})
    for (std::size_t i = 0; i + 1 < v->size(); ++i)
      if (!((*v)[i] < (*v)[i + 1]) || !std::isfinite((*v)[i + 1]))
        throw InputError("complex breaks must be finite and strictly increasing");
}

namespace {

std::vector<double> merged_breaks(double lo, double hi, double res, std::vector<double> extra,
                                  double eps) {
  if (!(hi > lo) || !(res > 0)) throw InputError("complex box or resolution invalid");
  const auto steps = static_cast<std::size_t>(std::ceil((hi - lo) / res - 1e-12));
  std::vector<double> v;
  for (std::size_t k = 0; k <= steps; ++k)
    v.push_back(k == steps ? hi : lo + (hi - lo) * static_cast<double>(k) / steps);
  for (double e : extra) {
    if (e < lo - eps || e > hi + eps) throw InputError("chain leaves the complex box");
    v.push_back(std::clamp(e, lo, hi));
  }
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v) {
    if (!out.empty() && x - out.back() <= eps) {
      // Keep the input coordinate over a uniform break it coincides with.
      if (std::find(extra.begin(), extra.end(), x) != extra.end() && out.size() > 1 &&
          x != hi)
        out.back() = x;
      continue;
    }
    out.push_back(x);
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace

CellComplex2D CellComplex2D::adapted(double x0, double x1, double y0, double y1, double res,
                                     const std::vector<double>& extra_x,
                                     const std::vector<double>& extra_y, double eps) {
  return CellComplex2D(merged_breaks(x0, x1, res, extra_x, eps),
                       merged_breaks(y0, y1, res, extra_y, eps));
}

CellComplex2D CellComplex2D::adapted(double x0, double x1, double y0, double y1, double res,
                                     const PolyChain1& chain, double eps) {
  if (chain.dim != 2) throw InputError("cell complexes are two-dimensional");
  std::vector<double> ex, ey;
  for (const auto& s : chain.segments)
    for (const Point* p : {&s.seg.a, &s.seg.b}) {
      ex.push_back((*p)[0]);
      ey.push_back((*p)[1]);
    }
  return adapted(x0, x1, y0, y1, res, ex, ey, eps);
}

std::size_t CellComplex2D::edge_count() const {
  return horizontal_count() + xs_.size() * (ys_.size() - 1);
}

Point CellComplex2D::vertex_point(std::size_t v) const {
  return Point{xs_[v % xs_.size()], ys_[v / xs_.size()]};
}

std::pair<std::size_t, std::size_t> CellComplex2D::edge_vertices(std::size_t e) const {
  const std::size_t nx = xs_.size();
  if (e < horizontal_count()) {
    std::size_t i = e % (nx - 1), j = e / (nx - 1);
    return {vertex(i, j), vertex(i + 1, j)};
  }
  e -= horizontal_count();
  std::size_t i = e % nx, j = e / nx;
  return {vertex(i, j), vertex(i, j + 1)};
}

double CellComplex2D::edge_length(std::size_t e) const {
  const std::size_t nx = xs_.size();
  if (e < horizontal_count()) {
    std::size_t i = e % (nx - 1);
    return xs_[i + 1] - xs_[i];
  }
  std::size_t j = (e - horizontal_count()) / nx;
  return ys_[j + 1] - ys_[j];
}

double CellComplex2D::face_area(std::size_t f) const {
  std::size_t i = f % (xs_.size() - 1), j = f / (xs_.size() - 1);
  return (xs_[i + 1] - xs_[i]) * (ys_[j + 1] - ys_[j]);
}

std::array<std::pair<std::size_t, int>, 4> CellComplex2D::face_boundary(std::size_t f) const {
  std::size_t i = f % (xs_.size() - 1), j = f / (xs_.size() - 1);
  return {{{hedge(i, j), +1}, {vedge(i + 1, j), +1}, {hedge(i, j + 1), -1}, {vedge(i, j), -1}}};
}

std::array<std::pair<std::size_t, int>, 2> CellComplex2D::edge_boundary(std::size_t e) const {
  auto [a, b] = edge_vertices(e);
  return {{{a, -1}, {b, +1}}};
}

bool CellComplex2D::boundary_squared_zero() const {
  for (std::size_t f = 0; f < face_count(); ++f) {
    std::vector<std::pair<std::size_t, int>> acc;
    for (auto [e, s] : face_boundary(f))
      for (auto [v, r] : edge_boundary(e)) acc.push_back({v, s * r});
    std::sort(acc.begin(), acc.end());
    for (std::size_t k = 0; k < acc.size();) {
      int sum = 0;
      std::size_t l = k;
      for (; l < acc.size() && acc[l].first == acc[k].first; ++l) sum += acc[l].second;
      if (sum != 0) return false;
      k = l;
    }
  }
  return true;
}

namespace {

// Index of the break within eps of x, or npos.
std::size_t find_break(const std::vector<double>& v, double x, double eps) {
  auto it = std::lower_bound(v.begin(), v.end(), x - eps);
  if (it != v.end() && std::abs(*it - x) <= eps) return static_cast<std::size_t>(it - v.begin());
  return static_cast<std::size_t>(-1);
}

std::size_t nearest_break(const std::vector<double>& v, double x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end()) return v.size() - 1;
  if (it == v.begin()) return 0;
  return (x - *(it - 1) <= *it - x) ? static_cast<std::size_t>(it - v.begin()) - 1
                                    : static_cast<std::size_t>(it - v.begin());
}

void add_run_x(const CellComplex2D& cx, std::vector<double>& t, std::size_t j, std::size_t ia,
               std::size_t ib, double m) {
  if (ia < ib)
    for (std::size_t i = ia; i < ib; ++i) t[cx.hedge(i, j)] += m;
  else
    for (std::size_t i = ib; i < ia; ++i) t[cx.hedge(i, j)] -= m;
}

void add_run_y(const CellComplex2D& cx, std::vector<double>& t, std::size_t i, std::size_t ja,
               std::size_t jb, double m) {
  if (ja < jb)
    for (std::size_t j = ja; j < jb; ++j) t[cx.vedge(i, j)] += m;
  else
    for (std::size_t j = jb; j < ja; ++j) t[cx.vedge(i, j)] -= m;
}

}  // namespace

SnapResult snap_to_complex(const PolyChain1& chain, const CellComplex2D& cx, bool allow_snap,
                           const Tolerance& tol) {
  if (chain.dim != 2) throw InputError("flat_norm_1_grid requires dimension 2");
  validate(chain, tol);
  SnapResult out;
  out.edge_coeffs.assign(cx.edge_count(), 0.0);
  const auto& xs = cx.xs();
  const auto& ys = cx.ys();
  const double eps = tol.eps_point;
  for (std::size_t k = 0; k < chain.segments.size(); ++k) {
    const auto& ws = chain.segments[k];
    const Point& a = ws.seg.a;
    const Point& b = ws.seg.b;
    const std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t ia = find_break(xs, a[0], eps), ib = find_break(xs, b[0], eps);
    std::size_t ja = find_break(ys, a[1], eps), jb = find_break(ys, b[1], eps);
    const bool on_vertices = ia != npos && ib != npos && ja != npos && jb != npos;
    if (on_vertices && (ia == ib || ja == jb)) {
      if (ja == jb)
        add_run_x(cx, out.edge_coeffs, ja, ia, ib, ws.mult);
      else
        add_run_y(cx, out.edge_coeffs, ia, ja, jb, ws.mult);
      continue;
    }
    if (!allow_snap)
      throw InputError("segment " + std::to_string(k) + " does not lie on complex edges");
    if (a[0] < xs.front() - eps || a[0] > xs.back() + eps || b[0] < xs.front() - eps ||
        b[0] > xs.back() + eps || a[1] < ys.front() - eps || a[1] > ys.back() + eps ||
        b[1] < ys.front() - eps || b[1] > ys.back() + eps)
      throw InputError("segment " + std::to_string(k) + " leaves the complex box");
    ia = nearest_break(xs, a[0]);
    ib = nearest_break(xs, b[0]);
    ja = nearest_break(ys, a[1]);
    jb = nearest_break(ys, b[1]);
    add_run_x(cx, out.edge_coeffs, ja, ia, ib, ws.mult);
    add_run_y(cx, out.edge_coeffs, ib, ja, jb, ws.mult);
    // Straight-line homotopy to the snapped segment, then the staircase
    // triangle.
    const Point a2{xs[ia], ys[ja]}, b2{xs[ib], ys[jb]};
    const double da = distance(a, a2), db = distance(b, b2);
    const double len = std::max(distance(a, b), distance(a2, b2));
    const double tri = 0.5 * std::abs(b2[0] - a2[0]) * std::abs(b2[1] - a2[1]);
    out.snap_error += std::abs(ws.mult) * (std::max(da, db) * len + da + db + tri);
  }
  return out;
}

FlatNorm1Result flat_norm_1_grid(const PolyChain1& t, const CellComplex2D& cx, bool allow_snap,
                                 const Tolerance& tol) {
  SnapResult sn = snap_to_complex(t, cx, allow_snap, tol);
  const std::vector<double>& te = sn.edge_coeffs;
  const std::size_t F = cx.face_count(), E = cx.edge_count();
  const std::size_t nx = cx.xs().size(), ny = cx.ys().size();
  const std::size_t outer = F;

  // Dual: maximize sum_e t_e y_e over |y_e| <= len_e, |u_f| <= area_f with y
  // a flow from the face left of each edge to the face on its right and u_f
  // a flow from f to the outer node.
  mcf::Network net(F + 1);
  std::vector<std::size_t> left(E), right(E);
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      std::size_t e = cx.hedge(i, j);
      left[e] = j + 1 < ny ? cx.face(i, j) : outer;
      right[e] = j > 0 ? cx.face(i, j - 1) : outer;
    }
  for (std::size_t j = 0; j + 1 < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      std::size_t e = cx.vedge(i, j);
      left[e] = i > 0 ? cx.face(i - 1, j) : outer;
      right[e] = i + 1 < nx ? cx.face(i, j) : outer;
    }
  for (std::size_t e = 0; e < E; ++e) {
    double c = cx.edge_length(e);
    net.add_arc(left[e], right[e], -c, c, -te[e]);
  }
  for (std::size_t f = 0; f < F; ++f) {
    double a = cx.face_area(f);
    net.add_arc(f, outer, -a, a, 0.0);
  }
  const mcf::Result r = net.solve();
  if (r.status != mcf::Status::optimal) throw ToleranceError("flat_norm_1_grid: solve failed");

  FlatNorm1Result out;
  out.snap_error = sn.snap_error;
  out.filling.resize(F);
  for (std::size_t f = 0; f < F; ++f) out.filling[f] = r.potential[f] - r.potential[outer];
  out.remainder = te;
  for (std::size_t f = 0; f < F; ++f)
    for (auto [e, s] : cx.face_boundary(f)) out.remainder[e] -= s * out.filling[f];
  long double primal = 0;
  for (std::size_t e = 0; e < E; ++e)
    primal += static_cast<long double>(cx.edge_length(e)) * std::abs(out.remainder[e]);
  for (std::size_t f = 0; f < F; ++f)
    primal += static_cast<long double>(cx.face_area(f)) * std::abs(out.filling[f]);
  out.value = static_cast<double>(primal);
  out.gap = out.value - (-r.primal);
  return out;
}

double wasserstein1(const Chain0& mu_plus, const Chain0& mu_minus, const Tolerance& tol) {
  validate(mu_plus);
  validate(mu_minus);
  if (mu_plus.dim != mu_minus.dim) throw InputError("measures differ in dimension");
  double sp = 0.0, sn = 0.0;
  for (std::size_t i = 0; i < mu_plus.atoms.size(); ++i) {
    if (mu_plus.atoms[i].w < 0)
      throw InputError("mu_plus atom " + std::to_string(i) + " has negative weight");
    sp += mu_plus.atoms[i].w;
  }
  for (std::size_t i = 0; i < mu_minus.atoms.size(); ++i) {
    if (mu_minus.atoms[i].w < 0)
      throw InputError("mu_minus atom " + std::to_string(i) + " has negative weight");
    sn += mu_minus.atoms[i].w;
  }
  const double slack = std::max(tol.eps_mass, 1e-12 * std::max(sp, sn));
  if (std::abs(sp - sn) > slack) throw InputError("wasserstein1 needs equal total masses");
  const std::size_t P = mu_plus.atoms.size(), N = mu_minus.atoms.size();
  if (P == 0 || N == 0) return 0.0;
  mcf::Network net(P + N);
  for (std::size_t i = 0; i < P; ++i) net.add_supply(i, mu_plus.atoms[i].w);
  for (std::size_t j = 0; j < N; ++j) net.add_supply(P + j, -mu_minus.atoms[j].w);
  net.add_supply(P + N - 1, sn - sp);  // rounding only
  for (std::size_t i = 0; i < P; ++i)
    for (std::size_t j = 0; j < N; ++j)
      net.add_arc(i, P + j, 0, mcf::kInf, distance(mu_plus.atoms[i].x, mu_minus.atoms[j].x));
  const mcf::Result r = net.solve();
  if (r.status != mcf::Status::optimal) throw ToleranceError("wasserstein1: flow solve failed");
  return r.primal;
}

}  // namespace hmass
