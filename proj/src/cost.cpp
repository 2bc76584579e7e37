#include "hmass/cost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hmass/errors.hpp"
#include "hmass/kernels.hpp"

namespace hmass {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::size_t grid_index(double m, double delta, const char* what) {
  double k = m / delta;
  double r = std::round(k);
  if (std::abs(k - r) > 1e-9 * std::max(1.0, k))
    throw InputError(std::string(what) + " is not on the grid");
  return static_cast<std::size_t>(r);
}

}  // namespace

TransportCost TransportCost::power(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InputError("power cost needs alpha in (0, 1]");
  return TransportCost(Power{alpha});
}

TransportCost TransportCost::affine(double a, double b) {
  if (!(a > 0.0) || !(b >= 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw InputError("affine cost needs a > 0 and b >= 0");
  return TransportCost(Affine{a, b});
}

TransportCost TransportCost::capped(const TransportCost& base, double cap) {
  if (!(cap > 0.0) || !std::isfinite(cap)) throw InputError("capped cost needs cap > 0");
  return TransportCost(Capped{std::make_shared<const TransportCost>(base), cap});
}

TransportCost TransportCost::tabulated(double delta, std::vector<double> values) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InputError("tabulated cost needs delta > 0");
  if (values.size() < 2) throw InputError("tabulated cost needs at least two samples");
  if (values[0] != 0.0) throw InputError("tabulated cost needs h(0) = 0");
  for (double v : values)
    if (!std::isfinite(v) || v < 0.0) throw InputError("tabulated cost values must be finite and >= 0");
  return TransportCost(Tabulated{delta, std::move(values)});
}

double TransportCost::operator()(double m) const {
  if (!(m >= 0.0) || !std::isfinite(m)) throw InputError("cost evaluated at negative or non-finite m");
  if (m == 0.0) return 0.0;
  return std::visit(
      Overloaded{
          [&](const Power& p) { return p.alpha == 1.0 ? m : std::pow(m, p.alpha); },
          [&](const Affine& a) { return a.a * m + a.b; },
          [&](const Capped& c) { return std::min((*c.base)(m), c.cap * m); },
          [&](const Tabulated& t) {
            const double x = m / t.delta;
            const double last = static_cast<double>(t.values.size() - 1);
            if (x > last * (1.0 + 1e-12))
              throw InputError("tabulated cost evaluated beyond its grid");
            if (x >= last) return t.values.back();
            auto k = static_cast<std::size_t>(x);
            double f = x - static_cast<double>(k);
            return t.values[k] + f * (t.values[k + 1] - t.values[k]);
          },
      },
      family_);
}

double TransportCost::h_prime_0() const {
  return std::visit(Overloaded{
                        [](const Power& p) { return p.alpha < 1.0 ? kInf : 1.0; },
                        [](const Affine& a) { return a.b > 0.0 ? kInf : a.a; },
                        [](const Capped& c) { return std::min(c.base->h_prime_0(), c.cap); },
                        [](const Tabulated& t) { return t.values[1] / t.delta; },
                    },
                    family_);
}

bool TransportCost::h_prime_0_grid_estimated() const {
  if (std::holds_alternative<Tabulated>(family_)) return true;
  if (const auto* c = std::get_if<Capped>(&family_)) return c->base->h_prime_0_grid_estimated();
  return false;
}

bool TransportCost::is_concave(double m_max) const {
  return std::visit(Overloaded{
                        [](const Power&) { return true; },
                        [](const Affine&) { return true; },
                        [&](const Capped& c) { return c.base->is_concave(m_max); },
                        [&](const Tabulated& t) {
                          double scale = *std::max_element(t.values.begin(), t.values.end());
                          std::size_t last = std::min<std::size_t>(
                              t.values.size() - 1,
                              static_cast<std::size_t>(std::ceil(m_max / t.delta)));
                          for (std::size_t k = 1; k < last; ++k) {
                            double d2 = t.values[k + 1] - 2.0 * t.values[k] + t.values[k - 1];
                            if (d2 > 1e-12 * std::max(1.0, scale)) return false;
                          }
                          return true;
                        },
                    },
                    family_);
}

double TransportCost::domain_max() const {
  return std::visit(Overloaded{
                        [](const Power&) { return kInf; },
                        [](const Affine&) { return kInf; },
                        [](const Capped& c) { return c.base->domain_max(); },
                        [](const Tabulated& t) {
                          return t.delta * static_cast<double>(t.values.size() - 1);
                        },
                    },
                    family_);
}

std::string TransportCost::name() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const Power& p) { os << "power(" << p.alpha << ")"; },
                 [&](const Affine& a) { os << "affine(" << a.a << "," << a.b << ")"; },
                 [&](const Capped& c) { os << "capped(" << c.base->name() << "," << c.cap << ")"; },
                 [&](const Tabulated& t) {
                   os << "tabulated(delta=" << t.delta << ",n=" << t.values.size() << ")";
                 },
             },
             family_);
  return os.str();
}

std::size_t GridSpec::points() const {
  if (!(delta > 0.0) || !(m_max > 0.0)) throw InputError("grid needs delta > 0 and m_max > 0");
  return static_cast<std::size_t>(std::floor(m_max / delta + 1e-9)) + 1;
}

TransportCost subadditive_lsc_envelope(const CostSamples& psi, Exec exec) {
  if (!(psi.delta > 0.0) || !std::isfinite(psi.delta)) throw InputError("envelope grid needs delta > 0");
  if (psi.values.empty() || psi.values[0] != 0.0) throw InputError("envelope needs psi(0) = 0");
  for (double v : psi.values)
    if (std::isnan(v) || v < 0.0) throw InputError("envelope needs psi >= 0");
  std::vector<double> g = exec == Exec::parallel ? kernels::subadditive_closure_parallel(psi.values)
                                                 : kernels::subadditive_closure_serial(psi.values);
  // The interpolant of a finite grid function is continuous, hence already
  // lower semi-continuous; no further adjustment is applied on the grid.
  for (double v : g)
    if (!std::isfinite(v)) throw InputError("envelope is infinite at a grid point");
  return TransportCost::tabulated(psi.delta, std::move(g));
}

double la62_alpha(const TransportCost& h, double M, double delta) {
  if (!(M > 0.0) || !(delta > 0.0)) throw InputError("la62_alpha needs M > 0 and delta > 0");
  const std::size_t kM = grid_index(M, delta, "M");
  if (kM == 0) throw InputError("M must be at least one grid step");
  double alpha = kInf;
  for (std::size_t k = kM / 2 + 1; k <= kM; ++k) {
    double m = static_cast<double>(k) * delta;
    alpha = std::min(alpha, h(m) / m);
  }
  if (!(alpha > 0.0)) throw InputError("cost vanishes on (M/2, M]");
  // Doubling: every grid m in (0, M/2] has 2^j m in (M/2, M] on the grid, so
  // subadditivity gives h(m) >= alpha m. Checked directly.
  for (std::size_t k = 1; k <= kM; ++k) {
    double m = static_cast<double>(k) * delta;
    if (h(m) < alpha * m - 1e-12 * std::max(1.0, alpha * m))
      throw ToleranceError("linear lower bound fails below M; cost is not subadditive on the grid");
  }
  return alpha;
}

EnvelopeResult make_h_M(const TransportCost& h, double M, const GridSpec& grid, Exec exec) {
  const std::size_t n = grid.points();
  if (grid.m_max < 2.0 * M * (1.0 - 1e-12)) throw InputError("make_h_M needs m_max >= 2M");
  const std::size_t kM = grid_index(M, grid.delta, "M");
  CostSamples psi{grid.delta, std::vector<double>(n, kInf)};
  for (std::size_t k = 0; k <= kM; ++k) psi.values[k] = h(static_cast<double>(k) * grid.delta);
  return {subadditive_lsc_envelope(psi, exec), la62_alpha(h, M, grid.delta), M};
}

TransportCost make_h_N(const TransportCost& h, double N, const GridSpec& grid, Exec exec) {
  if (!(N > 0.0)) throw InputError("make_h_N needs N > 0");
  const std::size_t n = grid.points();
  CostSamples psi{grid.delta, std::vector<double>(n)};
  for (std::size_t k = 0; k < n; ++k) {
    double m = static_cast<double>(k) * grid.delta;
    psi.values[k] = std::min(h(m), N * m);
  }
  return subadditive_lsc_envelope(psi, exec);
}

double HMCheck::worst() const {
  return std::max({linear_lower, dominates_h, linear_upper, equals_below_M});
}

HMCheck check_h_M(const TransportCost& h, const EnvelopeResult& env, const GridSpec& grid) {
  HMCheck c{-kInf, -kInf, -kInf, 0.0};
  const std::size_t n = grid.points();
  const double hM_at_M = h(env.M);
  for (std::size_t k = 0; k < n; ++k) {
    const double m = static_cast<double>(k) * grid.delta;
    const double hm = env.cost(m);
    const double base = h(m);
    c.linear_lower = std::max(c.linear_lower, env.alpha * m - hm);
    c.dominates_h = std::max(c.dominates_h, base - hm);
    if (m >= env.M * (1.0 - 1e-12))
      c.linear_upper = std::max(c.linear_upper, hm - 2.0 * hM_at_M / env.M * m);
    else
      c.equals_below_M = std::max(c.equals_below_M, std::abs(hm - base));
    if (std::abs(m - env.M) <= 1e-12 * env.M)
      c.equals_below_M = std::max(c.equals_below_M, std::abs(hm - base));
  }
  return c;
}

double CostCheck::worst() const { return std::max({at_zero, monotone, subadditive}); }

CostCheck check_transport_cost(const TransportCost& h, const GridSpec& grid) {
  const std::size_t n = grid.points();
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = h(static_cast<double>(k) * grid.delta);
  CostCheck c;
  c.at_zero = std::abs(v[0]);
  for (std::size_t k = 0; k + 1 < n; ++k) c.monotone = std::max(c.monotone, v[k] - v[k + 1]);
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = i; i + j < n; ++j) c.subadditive = std::max(c.subadditive, v[i + j] - v[i] - v[j]);
  return c;
}

}  // namespace hmass
