#pragma once

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "hmass/chain.hpp"

namespace hmass {

/// Flat norm of a 0-chain. The filling D is a 1-chain of straight segments
/// from negative to positive atoms; the remainder is T - dD.
struct FlatNorm0Result {
  double value = 0.0;
  PolyChain1 filling;
  Chain0 remainder;
  double gap = 0.0;  // LP duality gap of the certificate
};

/// min over transport plans of (moved mass * distance) + scale_cap * (mass
/// left in place). Exact; solved as a min-cost flow with drop arcs.
FlatNorm0Result flat_norm_0(const Chain0& t, double scale_cap = 1.0, const Tolerance& tol = {});

/// Rectilinear 2-complex on the product of two sorted break lists. Edges are
/// oriented along +x or +y, faces counterclockwise.
class CellComplex2D {
 public:
  CellComplex2D(std::vector<double> xs, std::vector<double> ys);

  /// Uniform breaks of spacing <= res over [x0,x1] x [y0,y1], merged with
  /// the extra coordinates (within eps) so that inputs with those vertex
  /// coordinates lie on edges.
  static CellComplex2D adapted(double x0, double x1, double y0, double y1, double res,
                               const std::vector<double>& extra_x = {},
                               const std::vector<double>& extra_y = {}, double eps = 1e-9);
  /// Adapted to the vertex coordinates of a chain.
  static CellComplex2D adapted(double x0, double x1, double y0, double y1, double res,
                               const PolyChain1& chain, double eps = 1e-9);

  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }
  std::size_t vertex_count() const { return xs_.size() * ys_.size(); }
  std::size_t horizontal_count() const { return (xs_.size() - 1) * ys_.size(); }
  std::size_t edge_count() const;
  std::size_t face_count() const { return (xs_.size() - 1) * (ys_.size() - 1); }

  std::size_t vertex(std::size_t i, std::size_t j) const { return j * xs_.size() + i; }
  std::size_t hedge(std::size_t i, std::size_t j) const { return j * (xs_.size() - 1) + i; }
  std::size_t vedge(std::size_t i, std::size_t j) const {
    return horizontal_count() + j * xs_.size() + i;
  }
  std::size_t face(std::size_t i, std::size_t j) const { return j * (xs_.size() - 1) + i; }

  Point vertex_point(std::size_t v) const;
  std::pair<std::size_t, std::size_t> edge_vertices(std::size_t e) const;  // tail, head
  double edge_length(std::size_t e) const;
  double face_area(std::size_t f) const;

  /// Signed incidences: four (edge, +-1) per face, two (vertex, +-1) per edge.
  std::array<std::pair<std::size_t, int>, 4> face_boundary(std::size_t f) const;
  std::array<std::pair<std::size_t, int>, 2> edge_boundary(std::size_t e) const;
  /// The composition of the two boundary maps vanishes.
  bool boundary_squared_zero() const;

 private:
  std::vector<double> xs_, ys_;
};

/// Edge coefficients of a chain on the complex. Axis-parallel segments whose
/// endpoints are vertices of the complex map exactly; with allow_snap other
/// segments are replaced by an x-then-y staircase between the nearest
/// vertices, and snap_error bounds the flat distance moved.
struct SnapResult {
  std::vector<double> edge_coeffs;
  double snap_error = 0.0;
};
SnapResult snap_to_complex(const PolyChain1& chain, const CellComplex2D& cx, bool allow_snap,
                           const Tolerance& tol = {});

struct FlatNorm1Result {
  double value = 0.0;
  std::vector<double> filling;    // per face
  std::vector<double> remainder;  // per edge: t - d(filling)
  double gap = 0.0;
  double snap_error = 0.0;
};

/// min over face coefficients w of sum_e len_e |t_e - (dw)_e| + sum_f area_f |w_f|,
/// solved through its dual min-cost circulation. Requires d = 2.
FlatNorm1Result flat_norm_1_grid(const PolyChain1& t, const CellComplex2D& cx,
                                 bool allow_snap = false, const Tolerance& tol = {});

/// Wasserstein-1 between nonnegative atomic measures of equal mass.
double wasserstein1(const Chain0& mu_plus, const Chain0& mu_minus, const Tolerance& tol = {});

}  // namespace hmass
