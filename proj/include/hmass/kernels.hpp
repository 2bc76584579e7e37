#pragma once

// Data-parallel inner loops. Each kernel has an OpenMP version and a serial
// reference version; the two agree bitwise.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "hmass/chain.hpp"

namespace hmass::kernels {

/// Largest grid-subadditive function below psi on the grid {0, d, 2d, ...}.
/// psi[0] must be 0; entries may be +inf.
std::vector<double> subadditive_closure_serial(std::span<const double> psi);
std::vector<double> subadditive_closure_parallel(std::span<const double> psi);

/// For every segment, the sorted interior parameters t in (0,1) at which some
/// other segment touches, crosses, or collinearly overlaps it.
std::vector<std::vector<double>> split_parameters_serial(std::span<const Segment> segs,
                                                         double eps);
std::vector<std::vector<double>> split_parameters_parallel(std::span<const Segment> segs,
                                                           double eps);

/// Contact between two segments within eps.
struct SegmentContact {
  enum class Kind { none, point, overlap } kind = Kind::none;
  double s = 0.0;  // parameter on the first segment (point contact)
  double t = 0.0;  // parameter on the second segment (point contact)
};
SegmentContact segment_contact(const Segment& p, const Segment& q, double eps);

/// Single-commodity flow on an undirected graph whose supports are forests.
struct ForestProblem {
  std::size_t nodes = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<double> lengths;
  std::vector<double> supply;  // required outflow - inflow per node
  double balance_eps = 1e-12;
};

struct ForestOptimum {
  bool found = false;
  std::uint64_t mask = 0;
  double cost = 0.0;
  std::vector<double> flow;  // signed, along edge (first -> second)
  std::uint64_t feasible_supports = 0;
};

/// Exhaustive minimum of sum_e h(|flow_e|) * length_e over all forest
/// supports that admit a conservation-respecting flow. Ties resolve to the
/// smallest support mask.
ForestOptimum best_forest_serial(const ForestProblem& p,
                                 const std::function<double(double)>& h);
ForestOptimum best_forest_parallel(const ForestProblem& p,
                                   const std::function<double(double)>& h);

}  // namespace hmass::kernels
