#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace hmass::mcf {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Status { optimal, infeasible };

struct Result {
  Status status = Status::infeasible;
  std::vector<double> flow;       // per arc, within [lower, upper]
  std::vector<double> potential;  // per node; reduced cost = cost + pi[s] - pi[t]
  double primal = 0.0;            // sum cost * flow
  double dual = 0.0;              // Lagrangian dual value at `potential`
  double gap() const { return primal - dual; }
};

/// Minimum-cost flow by the primal network simplex method (strongly feasible
/// spanning trees, block-search pricing, big-M artificial root). Supplies are
/// required outflow minus inflow; they must sum to zero.
class Network {
 public:
  explicit Network(std::size_t nodes) : supply_(nodes, 0.0) {}

  std::size_t add_node() {
    supply_.push_back(0.0);
    return supply_.size() - 1;
  }
  std::size_t add_arc(std::size_t s, std::size_t t, double lower, double upper, double cost);
  void add_supply(std::size_t v, double b) { supply_[v] += b; }

  std::size_t nodes() const { return supply_.size(); }
  std::size_t arcs() const { return src_.size(); }

  Result solve() const;

 private:
  std::vector<double> supply_;
  std::vector<std::size_t> src_, dst_;
  std::vector<double> lower_, upper_, cost_;
};

}  // namespace hmass::mcf
