#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "hmass/chain.hpp"

namespace hmass {

/// Discrete carrier of a polyhedral flux: one arc per canonical segment,
/// oriented along positive multiplicity.
struct GeoGraph {
  struct Arc {
    std::size_t tail = 0;
    std::size_t head = 0;
    double length = 0.0;
    double mult = 0.0;  // > 0
  };

  std::size_t dim = 2;
  std::vector<Point> nodes;  // lexicographically sorted
  std::vector<Arc> arcs;

  /// inflow - outflow per node, i.e. the boundary atom at that node.
  std::vector<double> defect() const;
  Chain0 boundary(const Tolerance& tol = {}) const;
  PolyChain1 to_chain() const;
  double mass() const;
};

/// A weighted simple path (or simple cycle: front == back) of the flux.
struct PathFlux {
  std::vector<Point> points;
  std::vector<std::size_t> nodes;  // node ids in the source graph; empty after pruning
  double weight = 0.0;

  double length() const;
  PolyChain1 as_chain(std::size_t dim) const;  // weight on every piece
};

struct Decomposition {
  std::size_t dim = 2;
  std::vector<PathFlux> paths;
  std::vector<PathFlux> cycles;
  double residual = 0.0;  // largest arc multiplicity left unassigned

  /// Sum of all paths and cycles as a chain (not canonicalized).
  PolyChain1 reassemble() const;
  /// Sum of weight * length over paths and cycles.
  double mass() const;
};

/// Graph of a chain; canonicalizes internally. Throws InputError when two
/// distinct canonical vertices lie within eps_point.
GeoGraph build_graph(const PolyChain1& chain, const Tolerance& tol = {});

/// Greedy bottleneck extraction: paths from sources (positive outgoing
/// defect) to sinks first, then cycles. Ties go to the smallest node id, then
/// the smallest arc id. A walk that revisits a node splits off that cycle.
Decomposition decompose(const GeoGraph& g, double eps_mass = 1e-12);

struct AcyclicityCertificate {
  bool acyclic = true;
  std::vector<std::size_t> cycle;  // node ids, front == back, when not acyclic
};
AcyclicityCertificate is_acyclic(const GeoGraph& g);

struct AcyclicSplit {
  GeoGraph acyclic;           // F^a, same boundary as the input
  PolyChain1 cycles_removed;  // F^b, boundaryless, same orientation as the input
};

/// Removes the largest-mass boundaryless part that is sign-consistent with
/// the flux by negative-cycle cancelling in the residual graph.
AcyclicSplit acyclic_part(const GeoGraph& g, double eps_mass = 1e-12);

}  // namespace hmass
