#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hmass/chain.hpp"
#include "hmass/cost.hpp"
#include "hmass/exec.hpp"

namespace hmass {

enum class EdgeMode { complete, grid };

/// Branched transport instance: move mu_plus to mu_minus along edges of a
/// candidate graph at cost sum_e h(|flow_e|) len_e.
struct Instance {
  Chain0 mu_plus;
  Chain0 mu_minus;
  double grid_res = 0.0;  // 0: no grid points
  std::vector<Point> steiner_points;
  TransportCost cost = TransportCost::identity();
  EdgeMode edges = EdgeMode::complete;
};

/// Checks signs, dimensions and equal masses; messages name atom indices.
void validate(const Instance& inst, const Tolerance& tol = {});

/// Undirected candidate graph. Nodes are the atoms of both measures (merged
/// within eps_point), the Steiner points and the grid points; an edge is
/// dropped when another node lies in its open interior.
struct CandidateGraph {
  std::size_t dim = 2;
  std::vector<Point> nodes;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<double> lengths;
  std::vector<double> supply;  // mu_plus - mu_minus per node

  /// Flux with mult flow[e] on edge e, zero edges left out.
  PolyChain1 flux(const std::vector<double>& flow, double eps_mass = 0.0) const;
};

CandidateGraph build_candidate_graph(const Instance& inst, const Tolerance& tol = {});

/// sum_e h(|flow_e|) len_e.
double flux_cost(const CandidateGraph& g, const std::vector<double>& flow, const TransportCost& h);

enum class Optimality { certified_bruteforce, local, bound_pair };
std::string to_string(Optimality o);

struct Solution {
  PolyChain1 flux;
  std::vector<double> flow;  // per candidate edge, signed along (first -> second)
  double cost_value = 0.0;
  Optimality optimality = Optimality::local;
  double lower = 0.0;  // valid lower bound on the graph optimum
  double upper = 0.0;  // = cost_value
  std::uint64_t iterations = 0;
  double gap() const { return upper - lower; }
};

struct BruteLimits {
  std::size_t max_edges = 20;
};

/// Exhaustive search over forest supports. On a concave cost the minimum of
/// a concave function over the flow polytope sits at a vertex, and vertices
/// are forest flows, so the result is the certified graph optimum. Throws
/// InputError for non-concave costs and for graphs over the edge limit.
Solution solve_bruteforce(const Instance& inst, const BruteLimits& limits = {},
                          const Tolerance& tol = {}, Exec exec = Exec::parallel);
Solution solve_bruteforce(const CandidateGraph& g, const TransportCost& h,
                          const BruteLimits& limits = {}, const Tolerance& tol = {},
                          Exec exec = Exec::parallel);

/// W1 flow followed by path rerouting on the marginal cost
/// h(|x| + w) - h(|x|); stops when no move gains more than 1e-10 or after
/// 10^4 accepted moves. The result is made acyclic. The seed only orders
/// the candidate moves.
Solution solve_local(const Instance& inst, std::uint64_t seed = 0, const Tolerance& tol = {});
Solution solve_local(const CandidateGraph& g, const TransportCost& h, std::uint64_t seed = 0,
                     const Tolerance& tol = {});

/// Graph W1: min-cost flow with cost = edge length.
double graph_w1(const CandidateGraph& g, std::vector<double>* flow = nullptr);

/// Uniform measure of total mass `mass` on the segment [a, b].
struct UniformSegmentMeasure {
  Point a, b;
  double mass = 1.0;
  /// n atoms of weight mass/n at the cell midpoints.
  Chain0 discretize(int n) const;
  /// W1 between the measure and discretize(n): mass * |b - a| / (4 n).
  double w1_to_discretization(int n) const;
};

struct DiracStage {
  int n = 0;
  Chain0 mu_plus, mu_minus;
  double w1_plus = 0.0;   // W1(mu_plus^n, mu_plus)
  double w1_minus = 0.0;  // W1(mu_minus^n, mu_minus)
};

struct ExperimentRow {
  int n = 0;
  double cost = 0.0;
  double w1_plus = 0.0;
  double w1_minus = 0.0;
  Optimality optimality = Optimality::local;
  double lower = 0.0;
};

/// Solves each stage on the candidate graph of its own atoms plus the base
/// instance's Steiner points and grid. Brute force when the graph has at
/// most `brute_edges` edges and the cost is concave, local search otherwise.
std::vector<ExperimentRow> prescribed_boundary_experiment(const Instance& base,
                                                          const std::vector<DiracStage>& stages,
                                                          std::size_t brute_edges = 16,
                                                          const Tolerance& tol = {});

/// Uniform measure on [(0,0),(1,0)] against a unit atom at (1,0).
std::vector<DiracStage> uniform_segment_schedule(const std::vector<int>& ns);

struct EquivalenceReport {
  double flux_objective = 0.0;  // sum over candidate edges
  double chain_h_mass = 0.0;    // h_mass of the canonical chain
  double difference = 0.0;
  bool agree = false;  // difference <= 1e-9
};

/// Evaluates the same flow through the edge objective and through the
/// canonical chain's h-mass.
EquivalenceReport flux_chain_agreement(const CandidateGraph& g, const std::vector<double>& flow,
                                       const TransportCost& h, const Tolerance& tol = {});
EquivalenceReport minimal_hmass_equivalence_check(const Instance& inst,
                                                  const Tolerance& tol = {});

}  // namespace hmass
