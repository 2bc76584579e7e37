#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "hmass/chain.hpp"
#include "hmass/cost.hpp"
#include "hmass/decomp.hpp"

namespace hmass {

/// Shifted rectilinear grid: the hyperplanes {y : y_i = shift_i + k * width}
/// for every coordinate i and integer k, with width = 2^-level.
struct Grid {
  Point shift;
  int level = 0;
  double width() const { return std::ldexp(1.0, -level); }
};

/// True when no vertex lies within eps of a hyperplane of the grid at
/// `finest_level` (coarser dyadic levels are subsets of it).
bool shift_is_valid(const Point& shift, const std::vector<Point>& vertices, int finest_level,
                    double eps);

/// Draws shifts from `draw` until one is valid; throws InputError after 64
/// rejected candidates.
Point choose_shift_from(const std::function<Point()>& draw, const std::vector<Point>& vertices,
                        int finest_level, double eps);

/// Deterministic shift in [0,1)^d from `seed` (mt19937_64), validated against
/// the vertices.
Point choose_shift(std::uint64_t seed, std::size_t dim, const std::vector<Point>& vertices = {},
                   int finest_level = 0, double eps = 1e-9);

/// Kept part of one path: arclength parameters [start, end] along the path.
struct KeptInterval {
  std::size_t path = 0;
  bool kept = false;
  double start = 0.0;
  double end = 0.0;
};

struct PruneResult {
  PolyChain1 chain;                 // canonicalized sum of pruned paths
  Decomposition pruned;             // the pruned paths themselves
  std::vector<KeptInterval> kept;   // one per input path
  int level = 0;
};

/// Restricts every path to the span between its first and last grid hit.
/// Paths that hit the grid at most once become zero. Rejects decompositions
/// with cycles.
PruneResult prune_to_grid(const Decomposition& dec, const Grid& grid, const Tolerance& tol = {});

/// Keeps the n endpoint pairs (start, end) of largest total path weight; ties
/// go to the lexicographically smaller pair. Rejects decompositions with cycles.
struct TruncateResult {
  PolyChain1 chain;       // canonicalized
  Decomposition kept;     // paths of the kept groups
  double removed_weight = 0.0;
  std::size_t groups = 0;  // number of distinct endpoint pairs in the input
};
TruncateResult truncate_boundary_pairs(const Decomposition& dec, long long n,
                                       const Tolerance& tol = {});

/// One step of the diagonal approximation: a grid level (none: no pruning)
/// and a pair count (none: keep all pairs).
struct ApproxStep {
  std::optional<int> level;
  std::optional<long long> pairs;
};

struct ApproxOptions {
  std::vector<ApproxStep> schedule;
  std::uint64_t seed = 0;
  std::optional<Point> shift;  // overrides the seeded shift
  Tolerance tol{};
};

struct ApproxRecord {
  ApproxStep step;
  PolyChain1 chain;          // A_n, canonicalized
  double mass_gap = 0.0;     // mass(A - A_n)
  double h_mass = 0.0;       // h_mass(A_n)
  double h_mass_gap = 0.0;   // h_mass(A) - h_mass(A_n)
  double boundary_mass = 0.0;
  std::size_t boundary_support = 0;
};

struct ApproxReport {
  Point shift;
  double mass = 0.0;           // mass(A)
  double h_mass = 0.0;         // h_mass(A)
  double boundary_mass = 0.0;  // mass0(boundary(A))
  std::vector<ApproxRecord> steps;
};

/// A_n = truncate(prune(F^a)) + F^b for each schedule step, where F^a is the
/// acyclic part of the canonicalized input and F^b the removed cycles.
ApproxReport diagonal_approx(const PolyChain1& chain, const TransportCost& h,
                             const ApproxOptions& opts);

/// Worst violation of 0 <= mult(A_n)/mult(A) <= 1 over the pieces of A_n,
/// measured as an excess multiplicity. Pieces of A_n off the support of A
/// count with their full multiplicity.
double shrinkage_violation(const PolyChain1& approx, const PolyChain1& chain,
                           const Tolerance& tol = {});

}  // namespace hmass
