#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hmass/chain.hpp"
#include "hmass/flat.hpp"

namespace hmass {

/// sum_{k=-n}^{n-1} [(k/n, 0), (k/n + 1/n^2, 0)]: short dashes of vanishing
/// mass whose boundary mass grows like 4n.
PolyChain1 dashes_chain(int n);

/// n times the boundary of [-1,1]^2 minus n times the boundary of
/// [-a,a]^2 with a = 1 - 1/n^2: boundaryless with mass growing like 16n.
/// For n = 1 the inner square is a point and is left out.
PolyChain1 nested_squares_chain(int n);
double nested_squares_alpha(int n);

/// Flat-norm settings for sequence diagnostics on [x0,x1] x [y0,y1].
struct FlatGrid {
  double x0 = -1, x1 = 1, y0 = -1, y1 = 1;
  double res = 1.0 / 64;
};

struct WeakDistanceRow {
  std::size_t index = 0;
  double mass_diff = 0.0;      // mass(chain_n - limit)
  double boundary_diff = 0.0;  // mass0(d chain_n - d limit)
  double mass = 0.0;
  double boundary_mass = 0.0;
  std::optional<double> flat_diff;  // grid flat norm of chain_n - limit
  double flat_gap = 0.0;
};

std::vector<WeakDistanceRow> weak_distance_report(const std::vector<PolyChain1>& seq,
                                                  const PolyChain1& limit,
                                                  const std::optional<FlatGrid>& flat = {},
                                                  const Tolerance& tol = {});

/// One row per (family, n) for the two sequences above. flat_bound is the
/// closed-form upper bound (the chain's mass for dashes, the annulus filling
/// n * 4 (1 - a^2) for squares).
struct CounterexampleRow {
  std::string family;  // "dashes" or "squares"
  int n = 0;
  double mass = 0.0;
  double boundary_mass = 0.0;
  double flat_norm = 0.0;
  double flat_bound = 0.0;
  double flat_gap = 0.0;
};

std::vector<CounterexampleRow> counterexample_rows(int n_max, const FlatGrid& grid = {},
                                                   const Tolerance& tol = {});

}  // namespace hmass
