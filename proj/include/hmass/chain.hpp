#pragma once

#include <cstddef>
#include <vector>

#include "hmass/exec.hpp"
#include "hmass/point.hpp"

namespace hmass {

class TransportCost;

/// Snapping radius for points and the threshold below which a multiplicity
/// counts as zero.
struct Tolerance {
  double eps_point = 1e-9;
  double eps_mass = 1e-12;
};

struct Segment {
  Point a;  // tail
  Point b;  // head
  double length() const { return distance(a, b); }
};

struct WeightedSegment {
  Segment seg;
  double mult = 0.0;
};

/// Polyhedral 1-chain: a finite sum of weighted oriented segments. The same
/// object serves as a polyhedral flux (the vector measure mult * tangent * H^1).
struct PolyChain1 {
  std::size_t dim = 2;
  std::vector<WeightedSegment> segments;

  bool empty() const { return segments.empty(); }
  void add(Point a, Point b, double mult) {
    segments.push_back({{std::move(a), std::move(b)}, mult});
  }
};

struct Atom {
  Point x;
  double w = 0.0;
};

/// Polyhedral 0-chain, equivalently a finite signed atomic measure.
struct Chain0 {
  std::size_t dim = 2;
  std::vector<Atom> atoms;

  bool empty() const { return atoms.empty(); }
  void add(Point x, double w) { atoms.push_back({std::move(x), w}); }
};

/// Checks dimensions, finiteness and positive segment length.
/// Throws InputError naming the offending segment index.
void validate(const PolyChain1& chain, const Tolerance& tol = {});
void validate(const Chain0& chain);

/// Canonical representative of the equivalence class of `chain`: overlaps and
/// crossings are split, multiplicities of coinciding pieces summed, pieces
/// with |mult| < eps_mass dropped. Each segment is oriented so that its tail
/// is lexicographically smaller than its head; segments are sorted by
/// (tail, head).
PolyChain1 canonicalize(const PolyChain1& chain, const Tolerance& tol = {},
                        Exec exec = Exec::parallel);

/// Merges atoms closer than eps_point, drops |w| < eps_mass, sorts by point.
Chain0 canonicalize(const Chain0& chain, const Tolerance& tol = {});

/// Sum of mult * (delta_head - delta_tail), canonicalized. Valid on any
/// well-formed chain; refinement does not change the result.
Chain0 boundary(const PolyChain1& chain, const Tolerance& tol = {});

double mass(const PolyChain1& chain);
double mass0(const Chain0& chain);

/// sum_i h(|mult_i|) * length_i. Refinement invariant only on canonical input.
double h_mass(const PolyChain1& chain, const TransportCost& h);

PolyChain1 operator+(const PolyChain1& a, const PolyChain1& b);
PolyChain1 operator-(const PolyChain1& a, const PolyChain1& b);
PolyChain1 scaled(const PolyChain1& a, double c);
Chain0 operator+(const Chain0& a, const Chain0& b);
Chain0 operator-(const Chain0& a, const Chain0& b);

/// Structural comparison of canonical forms, multiplicities and weights
/// within `slack`.
bool approx_equal(const PolyChain1& a, const PolyChain1& b, const Tolerance& tol = {},
                  double slack = 1e-12);
bool approx_equal(const Chain0& a, const Chain0& b, const Tolerance& tol = {},
                  double slack = 1e-12);

/// Union-find clustering of points within eps. Ids are assigned in
/// lexicographic order of the cluster representatives. A representative is
/// the lowest-priority member, ties broken lexicographically. Throws
/// InputError when a cluster is wider than eps (eps exceeds the feature size).
struct PointClusters {
  std::vector<Point> reps;
  std::vector<std::size_t> id;  // per input point
};
PointClusters cluster_points(const std::vector<Point>& pts, double eps,
                             const std::vector<int>& priority = {});

}  // namespace hmass
