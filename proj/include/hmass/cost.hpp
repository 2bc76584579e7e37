#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "hmass/exec.hpp"

namespace hmass {

/// Transportation cost h: [0, inf) -> [0, inf) with h(0) = 0, subadditive and
/// nondecreasing. Closed-form families are evaluated exactly; tabulated costs
/// by linear interpolation on a uniform grid.
class TransportCost {
 public:
  struct Power {
    double alpha;  // h(m) = m^alpha, alpha in (0, 1]
  };
  struct Affine {
    double a;  // h(m) = a m + b for m > 0
    double b;
  };
  struct Capped {
    std::shared_ptr<const TransportCost> base;  // h(m) = min(base(m), cap m)
    double cap;
  };
  struct Tabulated {
    double delta;
    std::vector<double> values;  // values[k] = h(k delta)
  };
  using Family = std::variant<Power, Affine, Capped, Tabulated>;

  static TransportCost power(double alpha);
  static TransportCost identity() { return power(1.0); }
  static TransportCost affine(double a, double b);
  static TransportCost capped(const TransportCost& base, double cap);
  static TransportCost tabulated(double delta, std::vector<double> values);

  /// h(m). Throws InputError for negative or non-finite m, and for m beyond
  /// the range of a tabulated cost.
  double operator()(double m) const;

  /// Right derivative at 0; +inf for power(alpha < 1) and affine(b > 0).
  /// Tabulated costs report h(delta)/delta and set grid_estimated.
  double h_prime_0() const;
  bool h_prime_0_grid_estimated() const;

  /// Concavity on [0, m_max]: analytic for closed forms, second differences
  /// on the grid for tabulated costs.
  bool is_concave(double m_max) const;

  /// Largest argument the cost accepts (+inf for closed forms).
  double domain_max() const;

  const Family& family() const { return family_; }
  std::string name() const;

  /// Admissibility cannot be derived from the value oracle; callers assert it.
  bool admissible_asserted = false;

 private:
  explicit TransportCost(Family f) : family_(std::move(f)) {}
  Family family_;
};

/// Samples of psi on the grid {0, delta, 2 delta, ...}; entries may be +inf.
struct CostSamples {
  double delta = 0.0;
  std::vector<double> values;
};

/// Uniform grid on [0, m_max] with step delta.
struct GridSpec {
  double delta = 0.0;
  double m_max = 0.0;
  std::size_t points() const;  // number of grid points including 0
  static GridSpec with_steps(double m_max, std::size_t steps = 4096) {
    return {m_max / static_cast<double>(steps), m_max};
  }
};

/// Lower semi-continuous subadditive envelope of psi restricted to the grid:
/// the pointwise largest grid-subadditive function below psi.
TransportCost subadditive_lsc_envelope(const CostSamples& psi, Exec exec = Exec::parallel);

/// Grid infimum of h(m)/m over (M/2, M], certified by checking h(m) >= alpha m
/// at every grid point of (0, M]. Throws InputError when h vanishes there.
double la62_alpha(const TransportCost& h, double M, double delta);

struct EnvelopeResult {
  TransportCost cost;
  double alpha = 0.0;
  double M = 0.0;
};

/// Envelope of h + indicator of [0, M] on the grid. Requires m_max >= 2M and M
/// on the grid.
EnvelopeResult make_h_M(const TransportCost& h, double M, const GridSpec& grid,
                        Exec exec = Exec::parallel);

/// Envelope of min(h, N m) on the grid.
TransportCost make_h_N(const TransportCost& h, double N, const GridSpec& grid,
                       Exec exec = Exec::parallel);

/// Worst violation of each superlinear-envelope inequality on the grid
/// (positive means violated by that amount).
struct HMCheck {
  double linear_lower = 0.0;     // alpha m <= h_M(m)
  double dominates_h = 0.0;      // h(m) <= h_M(m)
  double linear_upper = 0.0;     // h_M(m) <= 2 h(M) m / M for m >= M
  double equals_below_M = 0.0;   // |h_M(m) - h(m)| for m <= M
  double worst() const;
};
HMCheck check_h_M(const TransportCost& h, const EnvelopeResult& env, const GridSpec& grid);

/// Worst violations of h(0) = 0, monotonicity and subadditivity on the grid.
struct CostCheck {
  double at_zero = 0.0;
  double monotone = 0.0;
  double subadditive = 0.0;
  double worst() const;
};
CostCheck check_transport_cost(const TransportCost& h, const GridSpec& grid);

}  // namespace hmass
