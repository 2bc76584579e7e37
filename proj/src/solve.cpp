#include "hmass/solve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <string>
#include <variant>

#include "hmass/errors.hpp"
#include "hmass/kernels.hpp"
#include "hmass/mcf.hpp"

namespace hmass {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double total_mass(const Chain0& c) {
  double s = 0.0;
  for (const auto& a : c.atoms) s += a.w;
  return s;
}

double balance_slack(const CandidateGraph& g, const Tolerance& tol) {
  double s = 0.0;
  for (double b : g.supply) s += std::abs(b);
  return std::max(tol.eps_mass, 1e-12 * s);
}

// Distance from x to the segment [a, b] and the parameter of the foot point.
std::pair<double, double> foot(const Point& x, const Point& a, const Point& b) {
  double len2 = 0.0, dot = 0.0;
  for (std::size_t i = 0; i < x.dim(); ++i) {
    len2 += (b[i] - a[i]) * (b[i] - a[i]);
    dot += (x[i] - a[i]) * (b[i] - a[i]);
  }
  double t = std::clamp(dot / len2, 0.0, 1.0);
  return {distance(x, lerp(a, b, t)), t};
}

}  // namespace

void validate(const Instance& inst, const Tolerance& tol) {
  validate(inst.mu_plus);
  validate(inst.mu_minus);
  if (inst.mu_plus.dim != inst.mu_minus.dim)
    throw InputError("mu_plus and mu_minus differ in dimension");
  for (std::size_t i = 0; i < inst.mu_plus.atoms.size(); ++i)
    if (inst.mu_plus.atoms[i].w < 0)
      throw InputError("mu_plus atom " + std::to_string(i) + " has negative weight");
  for (std::size_t i = 0; i < inst.mu_minus.atoms.size(); ++i)
    if (inst.mu_minus.atoms[i].w < 0)
      throw InputError("mu_minus atom " + std::to_string(i) + " has negative weight");
  for (std::size_t i = 0; i < inst.steiner_points.size(); ++i)
    if (inst.steiner_points[i].dim() != inst.mu_plus.dim || !inst.steiner_points[i].finite())
      throw InputError("steiner point " + std::to_string(i) + " is malformed");
  if (!(inst.grid_res >= 0) || !std::isfinite(inst.grid_res))
    throw InputError("grid_res must be finite and >= 0");
  const double sp = total_mass(inst.mu_plus), sn = total_mass(inst.mu_minus);
  if (std::abs(sp - sn) > std::max(tol.eps_mass, 1e-12 * std::max(sp, sn)))
    throw InputError("mu_plus and mu_minus have different total mass");
}

PolyChain1 CandidateGraph::flux(const std::vector<double>& flow, double eps_mass) const {
  PolyChain1 c{dim, {}};
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (std::abs(flow[e]) > eps_mass) c.add(nodes[edges[e].first], nodes[edges[e].second], flow[e]);
  return c;
}

CandidateGraph build_candidate_graph(const Instance& inst, const Tolerance& tol) {
  validate(inst, tol);
  const std::size_t d = inst.mu_plus.dim;
  std::vector<Point> pts;
  std::vector<int> prio;
  std::vector<double> sup;
  for (const auto& a : inst.mu_plus.atoms) {
    pts.push_back(a.x);
    prio.push_back(0);
    sup.push_back(a.w);
  }
  for (const auto& a : inst.mu_minus.atoms) {
    pts.push_back(a.x);
    prio.push_back(0);
    sup.push_back(-a.w);
  }
  for (const auto& p : inst.steiner_points) {
    pts.push_back(p);
    prio.push_back(1);
    sup.push_back(0.0);
  }
  const std::size_t non_grid = pts.size();
  std::vector<std::vector<long>> grid_index;
  if (inst.grid_res > 0 && !pts.empty()) {
    Point lo = pts.front(), hi = pts.front();
    for (const auto& p : pts)
      for (std::size_t i = 0; i < d; ++i) {
        lo[i] = std::min(lo[i], p[i]);
        hi[i] = std::max(hi[i], p[i]);
      }
    std::vector<long> count(d);
    double total = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      count[i] = static_cast<long>(std::ceil((hi[i] - lo[i]) / inst.grid_res - 1e-12)) + 1;
      total *= static_cast<double>(count[i]);
    }
    if (total > 1e6) throw InputError("candidate grid too large for grid_res");
    std::vector<long> idx(d, 0);
    while (true) {
      Point p(d);
      for (std::size_t i = 0; i < d; ++i) p[i] = lo[i] + static_cast<double>(idx[i]) * inst.grid_res;
      pts.push_back(p);
      prio.push_back(2);
      sup.push_back(0.0);
      grid_index.push_back(idx);
      std::size_t i = 0;
      while (i < d && ++idx[i] == count[i]) idx[i++] = 0;
      if (i == d) break;
    }
  }

  PointClusters cl = cluster_points(pts, tol.eps_point, prio);
  CandidateGraph g;
  g.dim = d;
  g.nodes = cl.reps;
  g.supply.assign(g.nodes.size(), 0.0);
  for (std::size_t k = 0; k < pts.size(); ++k) g.supply[cl.id[k]] += sup[k];

  std::vector<std::pair<std::size_t, std::size_t>> cand;
  auto push = [&](std::size_t u, std::size_t v) {
    if (u == v) return;
    cand.push_back({std::min(u, v), std::max(u, v)});
  };
  if (inst.edges == EdgeMode::complete || grid_index.empty()) {
    for (std::size_t u = 0; u < g.nodes.size(); ++u)
      for (std::size_t v = u + 1; v < g.nodes.size(); ++v) push(u, v);
  } else {
    // King moves between grid points; free nodes see each other and the
    // grid points of their neighbourhood.
    for (std::size_t a = 0; a < grid_index.size(); ++a)
      for (std::size_t b = a + 1; b < grid_index.size(); ++b) {
        bool near = true;
        for (std::size_t i = 0; i < d && near; ++i)
          near = std::abs(grid_index[a][i] - grid_index[b][i]) <= 1;
        if (near) push(cl.id[non_grid + a], cl.id[non_grid + b]);
      }
    const double reach = inst.grid_res * std::sqrt(static_cast<double>(d)) * (1 + 1e-12);
    for (std::size_t a = 0; a < non_grid; ++a) {
      for (std::size_t b = a + 1; b < non_grid; ++b) push(cl.id[a], cl.id[b]);
      for (std::size_t b = non_grid; b < pts.size(); ++b)
        if (distance(pts[a], pts[b]) <= reach) push(cl.id[a], cl.id[b]);
    }
  }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  for (auto [u, v] : cand) {
    bool blocked = false;
    for (std::size_t w = 0; w < g.nodes.size() && !blocked; ++w) {
      if (w == u || w == v) continue;
      auto [dist, t] = foot(g.nodes[w], g.nodes[u], g.nodes[v]);
      blocked = dist <= tol.eps_point && t > 0.0 && t < 1.0;
    }
    if (blocked) continue;
    g.edges.push_back({u, v});
    g.lengths.push_back(distance(g.nodes[u], g.nodes[v]));
  }
  return g;
}

double flux_cost(const CandidateGraph& g, const std::vector<double>& flow, const TransportCost& h) {
  double c = 0.0;
  for (std::size_t e = 0; e < g.edges.size(); ++e)
    if (flow[e] != 0.0) c += h(std::abs(flow[e])) * g.lengths[e];
  return c;
}

std::string to_string(Optimality o) {
  switch (o) {
    case Optimality::certified_bruteforce:
      return "certified-bruteforce";
    case Optimality::local:
      return "local";
    case Optimality::bound_pair:
      return "bound-pair";
  }
  return "?";
}

Solution solve_bruteforce(const CandidateGraph& g, const TransportCost& h,
                          const BruteLimits& limits, const Tolerance& tol, Exec exec) {
  if (g.edges.size() > limits.max_edges || g.edges.size() > 62)
    throw InputError("brute force limit exceeded: " + std::to_string(g.edges.size()) +
                     " candidate edges");
  double m = 0.0;
  for (double b : g.supply) m += std::max(b, 0.0);
  if (!h.is_concave(m))
    throw InputError("brute force certifies concave costs only; got " + h.name());
  kernels::ForestProblem p;
  p.nodes = g.nodes.size();
  p.edges = g.edges;
  p.lengths = g.lengths;
  p.supply = g.supply;
  p.balance_eps = balance_slack(g, tol);
  const double zero = p.balance_eps;
  auto hf = [&h, zero](double x) { return x <= zero ? 0.0 : h(x); };
  kernels::ForestOptimum best =
      exec == Exec::serial ? kernels::best_forest_serial(p, hf) : kernels::best_forest_parallel(p, hf);
  if (!best.found) throw InputError("no feasible flow on the candidate graph");
  Solution s;
  s.flow = best.flow;
  for (double& x : s.flow)
    if (std::abs(x) <= zero) x = 0.0;
  s.flux = g.flux(s.flow);
  s.cost_value = flux_cost(g, s.flow, h);
  s.optimality = Optimality::certified_bruteforce;
  s.lower = s.upper = s.cost_value;
  s.iterations = best.feasible_supports;
  return s;
}

Solution solve_bruteforce(const Instance& inst, const BruteLimits& limits, const Tolerance& tol,
                          Exec exec) {
  return solve_bruteforce(build_candidate_graph(inst, tol), inst.cost, limits, tol, exec);
}

double graph_w1(const CandidateGraph& g, std::vector<double>* flow) {
  const std::size_t E = g.edges.size();
  mcf::Network net(g.nodes.size());
  double total = 0.0;
  for (std::size_t v = 0; v < g.nodes.size(); ++v) total += g.supply[v];
  for (std::size_t v = 0; v < g.nodes.size(); ++v)
    net.add_supply(v, g.supply[v] - (v + 1 == g.nodes.size() ? total : 0.0));
  for (std::size_t e = 0; e < E; ++e) {
    net.add_arc(g.edges[e].first, g.edges[e].second, 0, mcf::kInf, g.lengths[e]);
    net.add_arc(g.edges[e].second, g.edges[e].first, 0, mcf::kInf, g.lengths[e]);
  }
  const mcf::Result r = net.solve();
  if (r.status != mcf::Status::optimal) throw InputError("candidate graph cannot route the supply");
  if (flow) {
    flow->assign(E, 0.0);
    for (std::size_t e = 0; e < E; ++e) (*flow)[e] = r.flow[2 * e] - r.flow[2 * e + 1];
  }
  return r.primal;
}

namespace {

// inf of h(m)/m over (0, M].
double min_ratio(const TransportCost& h, double M) {
  using TC = TransportCost;
  if (const auto* c = std::get_if<TC::Capped>(&h.family()))
    return std::min(min_ratio(*c->base, M), c->cap);
  if (const auto* t = std::get_if<TC::Tabulated>(&h.family())) {
    // Linear pieces through the grid: the ratio is monotone on each piece.
    double r = h(M) / M;
    for (std::size_t k = 1; k < t->values.size() && static_cast<double>(k) * t->delta < M; ++k)
      r = std::min(r, t->values[k] / (static_cast<double>(k) * t->delta));
    return r;
  }
  return h(M) / M;  // power and affine: ratio decreasing in m
}

// Directed view of a signed edge flow.
struct Residual {
  const CandidateGraph& g;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj;  // (neighbour, edge)
  explicit Residual(const CandidateGraph& graph) : g(graph), adj(graph.nodes.size()) {
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      adj[g.edges[e].first].push_back({g.edges[e].second, e});
      adj[g.edges[e].second].push_back({g.edges[e].first, e});
    }
  }
  // Flow along edge e in the direction leaving u.
  double along(const std::vector<double>& x, std::size_t e, std::size_t u) const {
    return g.edges[e].first == u ? x[e] : -x[e];
  }
  void add(std::vector<double>& x, std::size_t e, std::size_t u, double w) const {
    if (g.edges[e].first == u)
      x[e] += w;
    else
      x[e] -= w;
  }
};

// Cancels directed cycles of the flow; each cancellation lowers every
// touched |x_e|, so no nondecreasing cost goes up.
void cancel_cycles(const Residual& R, std::vector<double>& x, double eps) {
  const std::size_t n = R.g.nodes.size();
  while (true) {
    std::vector<int> color(n, 0);
    std::vector<std::pair<std::size_t, std::size_t>> via(n, {n, 0});  // (prev node, edge)
    bool found = false;
    for (std::size_t s = 0; s < n && !found; ++s) {
      if (color[s]) continue;
      std::vector<std::pair<std::size_t, std::size_t>> stack{{s, 0}};
      color[s] = 1;
      while (!stack.empty() && !found) {
        auto& [u, k] = stack.back();
        if (k == R.adj[u].size()) {
          color[u] = 2;
          stack.pop_back();
          continue;
        }
        auto [v, e] = R.adj[u][k++];
        if (R.along(x, e, u) <= eps) continue;
        if (color[v] == 1) {
          // Cycle v -> ... -> u -> v.
          std::vector<std::pair<std::size_t, std::size_t>> cyc{{u, e}};
          for (std::size_t w = u; w != v; w = via[w].first) cyc.push_back({via[w].first, via[w].second});
          double bott = kInf;
          for (auto [a, ce] : cyc) bott = std::min(bott, R.along(x, ce, a));
          for (auto [a, ce] : cyc) {
            R.add(x, ce, a, -bott);
            if (std::abs(x[ce]) <= eps) x[ce] = 0.0;
          }
          found = true;
        } else if (color[v] == 0) {
          color[v] = 1;
          via[v] = {u, e};
          stack.push_back({v, 0});
        }
      }
    }
    if (!found) return;
  }
}

struct PathPiece {
  std::vector<std::size_t> nodes;
  std::vector<std::size_t> edges;
  double weight = 0.0;
};

std::vector<PathPiece> path_decomposition(const Residual& R, std::vector<double> x,
                                          std::vector<double> excess, double eps) {
  std::vector<PathPiece> out;
  const std::size_t n = R.g.nodes.size();
  for (std::size_t s = 0; s < n; ++s) {
    while (excess[s] > eps) {
      PathPiece p;
      p.nodes.push_back(s);
      std::size_t u = s;
      while (excess[u] >= -eps || u == s) {
        std::size_t next_e = R.g.edges.size(), next_v = n;
        for (auto [v, e] : R.adj[u])
          if (R.along(x, e, u) > eps && (next_e == R.g.edges.size() || e < next_e)) {
            next_e = e;
            next_v = v;
          }
        if (next_e == R.g.edges.size()) break;
        p.edges.push_back(next_e);
        p.nodes.push_back(next_v);
        u = next_v;
        if (excess[u] < -eps) break;
      }
      if (p.edges.empty() || excess[u] >= -eps) return out;  // inconsistent; stop quietly
      double w = std::min(excess[s], -excess[u]);
      for (std::size_t k = 0; k < p.edges.size(); ++k)
        w = std::min(w, R.along(x, p.edges[k], p.nodes[k]));
      for (std::size_t k = 0; k < p.edges.size(); ++k) R.add(x, p.edges[k], p.nodes[k], -w);
      excess[s] -= w;
      excess[u] += w;
      p.weight = w;
      out.push_back(std::move(p));
    }
  }
  return out;
}

}  // namespace

Solution solve_local(const CandidateGraph& g, const TransportCost& h, std::uint64_t seed,
                     const Tolerance& tol) {
  const double eps = balance_slack(g, tol);
  const std::size_t n = g.nodes.size(), E = g.edges.size();
  Solution s;
  std::vector<double> x;
  const double w1 = graph_w1(g, &x);
  for (double& v : x)
    if (std::abs(v) <= eps) v = 0.0;
  Residual R(g);
  cancel_cycles(R, x, eps);
  auto hc = [&](double m) { return m <= eps ? 0.0 : h(m); };

  std::mt19937_64 rng(seed);
  std::uint64_t accepted = 0;
  const double min_gain = 1e-10;
  while (accepted < 10000) {
    std::vector<PathPiece> paths = path_decomposition(R, x, g.supply, eps);
    std::vector<std::size_t> order(paths.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    bool improved = false;
    for (std::size_t pi : order) {
      const PathPiece& p = paths[pi];
      const double w = p.weight;
      const std::size_t L = p.edges.size();
      for (std::size_t i = 0; i < L && !improved; ++i) {
        for (std::size_t j = L; j > i && !improved; --j) {
          // Take the chunk nodes[i..j] out and route it again.
          std::vector<double> y = x;
          double saved = 0.0;
          for (std::size_t k = i; k < j; ++k) {
            std::size_t e = p.edges[k];
            double before = std::abs(y[e]);
            R.add(y, e, p.nodes[k], -w);
            if (std::abs(y[e]) <= eps) y[e] = 0.0;
            saved += (hc(before) - hc(std::abs(y[e]))) * g.lengths[e];
          }
          const std::size_t src = p.nodes[i], dst = p.nodes[j];
          std::vector<double> dist(n, kInf);
          std::vector<std::pair<std::size_t, std::size_t>> via(n, {n, E});
          using QE = std::pair<double, std::size_t>;
          std::priority_queue<QE, std::vector<QE>, std::greater<>> pq;
          dist[src] = 0.0;
          pq.push({0.0, src});
          while (!pq.empty()) {
            auto [du, u] = pq.top();
            pq.pop();
            if (du > dist[u]) continue;
            if (u == dst) break;
            for (auto [v, e] : R.adj[u]) {
              double a = R.along(y, e, u);
              if (a < -eps) continue;  // only forward or empty edges
              a = std::max(a, 0.0);
              double c = (hc(a + w) - hc(a)) * g.lengths[e];
              if (du + c < dist[v]) {
                dist[v] = du + c;
                via[v] = {u, e};
                pq.push({dist[v], v});
              }
            }
          }
          if (dist[dst] < saved - min_gain) {
            for (std::size_t v = dst; v != src; v = via[v].first) R.add(y, via[v].second, via[v].first, w);
            for (double& v : y)
              if (std::abs(v) <= eps) v = 0.0;
            cancel_cycles(R, y, eps);
            x = std::move(y);
            improved = true;
            ++accepted;
          }
        }
      }
      if (improved) break;
    }
    if (!improved) break;
  }

  s.flow = x;
  s.flux = g.flux(s.flow);
  s.cost_value = flux_cost(g, s.flow, h);
  double M = 0.0;
  for (double b : g.supply) M += std::max(b, 0.0);
  s.lower = M > 0 ? min_ratio(h, M) * w1 : 0.0;
  s.lower = std::min(s.lower, s.cost_value);
  s.upper = s.cost_value;
  s.optimality = Optimality::bound_pair;
  s.iterations = accepted;
  return s;
}

Solution solve_local(const Instance& inst, std::uint64_t seed, const Tolerance& tol) {
  return solve_local(build_candidate_graph(inst, tol), inst.cost, seed, tol);
}

Chain0 UniformSegmentMeasure::discretize(int n) const {
  if (n < 1) throw InputError("discretization needs n >= 1");
  Chain0 c{a.dim(), {}};
  for (int k = 0; k < n; ++k) c.add(lerp(a, b, (k + 0.5) / n), mass / n);
  return c;
}

double UniformSegmentMeasure::w1_to_discretization(int n) const {
  return mass * distance(a, b) / (4.0 * n);
}

std::vector<DiracStage> uniform_segment_schedule(const std::vector<int>& ns) {
  UniformSegmentMeasure mu{Point{0.0, 0.0}, Point{1.0, 0.0}, 1.0};
  std::vector<DiracStage> out;
  for (int n : ns) {
    DiracStage st;
    st.n = n;
    st.mu_plus = mu.discretize(n);
    st.mu_minus = Chain0{2, {{Point{1.0, 0.0}, 1.0}}};
    st.w1_plus = mu.w1_to_discretization(n);
    st.w1_minus = 0.0;
    out.push_back(std::move(st));
  }
  return out;
}

std::vector<ExperimentRow> prescribed_boundary_experiment(const Instance& base,
                                                          const std::vector<DiracStage>& stages,
                                                          std::size_t brute_edges,
                                                          const Tolerance& tol) {
  std::vector<ExperimentRow> rows;
  for (std::size_t k = 0; k < stages.size(); ++k) {
    Instance inst = base;
    inst.mu_plus = stages[k].mu_plus;
    inst.mu_minus = stages[k].mu_minus;
    try {
      validate(inst, tol);
    } catch (const InputError& e) {
      throw InputError("schedule entry " + std::to_string(k) + ": " + e.what());
    }
    CandidateGraph g = build_candidate_graph(inst, tol);
    double m = 0.0;
    for (double b : g.supply) m += std::max(b, 0.0);
    Solution s = g.edges.size() <= brute_edges && inst.cost.is_concave(m)
                     ? solve_bruteforce(g, inst.cost, {brute_edges}, tol)
                     : solve_local(g, inst.cost, 0, tol);
    rows.push_back({stages[k].n, s.cost_value, stages[k].w1_plus, stages[k].w1_minus,
                    s.optimality, s.lower});
  }
  return rows;
}

EquivalenceReport flux_chain_agreement(const CandidateGraph& g, const std::vector<double>& flow,
                                       const TransportCost& h, const Tolerance& tol) {
  EquivalenceReport r;
  r.flux_objective = flux_cost(g, flow, h);
  r.chain_h_mass = h_mass(canonicalize(g.flux(flow), tol), h);
  r.difference = std::abs(r.flux_objective - r.chain_h_mass);
  r.agree = r.difference <= 1e-9;
  return r;
}

EquivalenceReport minimal_hmass_equivalence_check(const Instance& inst, const Tolerance& tol) {
  CandidateGraph g = build_candidate_graph(inst, tol);
  Solution s = solve_bruteforce(g, inst.cost, {}, tol);
  return flux_chain_agreement(g, s.flow, inst.cost, tol);
}

}  // namespace hmass
