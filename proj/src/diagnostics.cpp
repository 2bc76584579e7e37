#include "hmass/diagnostics.hpp"

#include <string>

#include "hmass/errors.hpp"

namespace hmass {

PolyChain1 dashes_chain(int n) {
  if (n < 1) throw InputError("sequence index must be >= 1");
  const double nn = n;
  PolyChain1 c{2, {}};
  for (int k = -n; k < n; ++k) {
    double x = k / nn;
    c.add(Point{x, 0.0}, Point{x + 1.0 / (nn * nn), 0.0}, 1.0);
  }
  return c;
}

double nested_squares_alpha(int n) {
  if (n < 1) throw InputError("sequence index must be >= 1");
  return 1.0 - 1.0 / (static_cast<double>(n) * n);
}

PolyChain1 nested_squares_chain(int n) {
  const double a = nested_squares_alpha(n);
  const Point c[4] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  PolyChain1 out{2, {}};
  for (int i = 0; i < 4; ++i) out.add(c[i], c[(i + 1) % 4], n);
  if (a > 0) {
    for (int i = 0; i < 4; ++i) {
      const Point& p = c[i];
      const Point& q = c[(i + 1) % 4];
      out.add(Point{a * p[0], a * p[1]}, Point{a * q[0], a * q[1]}, -n);
    }
  }
  return out;
}

std::vector<WeakDistanceRow> weak_distance_report(const std::vector<PolyChain1>& seq,
                                                  const PolyChain1& limit,
                                                  const std::optional<FlatGrid>& flat,
                                                  const Tolerance& tol) {
  std::vector<WeakDistanceRow> rows;
  const Chain0 dl = boundary(limit, tol);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq[i].dim != limit.dim)
      throw InputError("sequence element " + std::to_string(i) + " differs in dimension");
    WeakDistanceRow r;
    r.index = i;
    const PolyChain1 c = canonicalize(seq[i], tol);
    const PolyChain1 diff = canonicalize(seq[i] - limit, tol);
    r.mass = mass(c);
    r.mass_diff = mass(diff);
    const Chain0 dc = boundary(c, tol);
    r.boundary_mass = mass0(dc);
    r.boundary_diff = mass0(canonicalize(dc - dl, tol));
    if (flat) {
      auto cx = CellComplex2D::adapted(flat->x0, flat->x1, flat->y0, flat->y1, flat->res, diff,
                                       tol.eps_point);
      auto fr = flat_norm_1_grid(diff, cx, false, tol);
      r.flat_diff = fr.value;
      r.flat_gap = fr.gap;
    }
    rows.push_back(r);
  }
  return rows;
}

std::vector<CounterexampleRow> counterexample_rows(int n_max, const FlatGrid& grid,
                                                   const Tolerance& tol) {
  if (n_max < 1) throw InputError("n_max must be >= 1");
  std::vector<CounterexampleRow> rows;
  for (const std::string family : {"dashes", "squares"}) {
    for (int n = 1; n <= n_max; ++n) {
      const bool dashes = family == "dashes";
      const PolyChain1 c = canonicalize(dashes ? dashes_chain(n) : nested_squares_chain(n), tol);
      CounterexampleRow r;
      r.family = family;
      r.n = n;
      r.mass = mass(c);
      r.boundary_mass = mass0(boundary(c, tol));
      if (dashes) {
        r.flat_bound = r.mass;
      } else {
        const double a = nested_squares_alpha(n);
        r.flat_bound = 4.0 * n * (1.0 - a * a);
      }
      auto cx = CellComplex2D::adapted(grid.x0, grid.x1, grid.y0, grid.y1, grid.res, c,
                                       tol.eps_point);
      auto fr = flat_norm_1_grid(c, cx, false, tol);
      r.flat_norm = fr.value;
      r.flat_gap = fr.gap;
      rows.push_back(r);
    }
  }
  return rows;
}

}  // namespace hmass
