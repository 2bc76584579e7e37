#include "hmass/mcf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hmass/errors.hpp"

namespace hmass::mcf {

std::size_t Network::add_arc(std::size_t s, std::size_t t, double lower, double upper,
                             double cost) {
  if (s >= nodes() || t >= nodes()) throw InputError("arc endpoint out of range");
  if (!std::isfinite(lower) || !(upper >= lower) || !std::isfinite(cost))
    throw InputError("arc needs finite lower <= upper and finite cost");
  src_.push_back(s);
  dst_.push_back(t);
  lower_.push_back(lower);
  upper_.push_back(upper);
  cost_.push_back(cost);
  return src_.size() - 1;
}

namespace {

using Real = long double;

enum State : int { kUpper = -1, kTree = 0, kLower = 1 };

class Simplex {
 public:
  Simplex(const std::vector<double>& supply, const std::vector<std::size_t>& src,
          const std::vector<std::size_t>& dst, const std::vector<double>& lower,
          const std::vector<double>& upper, const std::vector<double>& cost)
      : n_(supply.size()), m_(src.size()), root_(supply.size()) {
    const std::size_t arcs = m_ + n_;
    s_.assign(src.begin(), src.end());
    t_.assign(dst.begin(), dst.end());
    s_.resize(arcs);
    t_.resize(arcs);
    cap_.resize(arcs);
    c_.resize(arcs);
    f_.assign(arcs, 0);
    state_.assign(arcs, kLower);
    std::vector<Real> b(supply.begin(), supply.end());
    Real max_cost = 0;
    for (std::size_t a = 0; a < m_; ++a) {
      // Shift to 0 <= y <= upper - lower.
      cap_[a] = std::isinf(upper[a]) ? -1 : Real(upper[a]) - Real(lower[a]);
      c_[a] = cost[a];
      b[src[a]] -= lower[a];
      b[dst[a]] += lower[a];
      max_cost = std::max(max_cost, std::abs(Real(cost[a])));
    }
    art_cost_ = (max_cost + 1) * Real(n_ + 1);

    const std::size_t N = n_ + 1;
    parent_.assign(N, N);
    pred_.assign(N, arcs);
    up_.assign(N, 0);
    depth_.assign(N, 0);
    pi_.assign(N, 0);
    first_child_.assign(N, N);
    next_sib_.assign(N, N);
    prev_sib_.assign(N, N);
    for (std::size_t v = 0; v < n_; ++v) {
      const std::size_t a = m_ + v;
      cap_[a] = -1;  // unbounded
      c_[a] = art_cost_;
      state_[a] = kTree;
      if (b[v] >= 0) {
        s_[a] = v;
        t_[a] = root_;
        f_[a] = b[v];
        up_[v] = 1;
        pi_[v] = -art_cost_;
      } else {
        s_[a] = root_;
        t_[a] = v;
        f_[a] = -b[v];
        up_[v] = 0;
        pi_[v] = art_cost_;
      }
      parent_[v] = root_;
      pred_[v] = a;
      depth_[v] = 1;
      link_child(root_, v);
    }
    eps_rc_ = 1e-13L * std::max<Real>(1, max_cost);
  }

  void run() {
    const std::size_t arcs = m_ + n_;
    const std::size_t block = std::max<std::size_t>(16, static_cast<std::size_t>(std::sqrt(double(arcs))));
    const std::size_t max_pivots = 200 * arcs + 100000;
    std::size_t next = 0, pivots = 0;
    for (;;) {
      // Block search: scan blocks cyclically, pivot on the worst arc of the
      // first block that has a violating arc.
      std::size_t best = arcs;
      Real best_v = -eps_rc_;
      std::size_t in_block = 0;
      for (std::size_t k = 0; k < arcs; ++k) {
        std::size_t a = next;
        next = next + 1 == arcs ? 0 : next + 1;
        if (state_[a] != kTree) {
          Real v = Real(state_[a]) * reduced(a);
          if (v < best_v) {
            best_v = v;
            best = a;
          }
        }
        if (++in_block == block) {
          if (best != arcs) break;
          in_block = 0;
        }
      }
      if (best == arcs) return;
      pivot(best);
      if (++pivots > max_pivots) throw ToleranceError("network simplex exceeded its pivot limit");
    }
  }

  bool feasible() const {
    for (std::size_t v = 0; v < n_; ++v)
      if (f_[m_ + v] > 1e-9L) return false;
    return true;
  }

  Real flow(std::size_t a) const { return f_[a]; }
  Real potential(std::size_t v) const { return pi_[v]; }

 private:
  Real reduced(std::size_t a) const { return c_[a] + pi_[s_[a]] - pi_[t_[a]]; }
  Real residual_up(std::size_t a) const { return cap_[a] < 0 ? -1 : cap_[a] - f_[a]; }

  void link_child(std::size_t p, std::size_t v) {
    const std::size_t N = n_ + 1;
    next_sib_[v] = first_child_[p];
    prev_sib_[v] = N;
    if (first_child_[p] != N) prev_sib_[first_child_[p]] = v;
    first_child_[p] = v;
  }
  void unlink_child(std::size_t p, std::size_t v) {
    const std::size_t N = n_ + 1;
    if (prev_sib_[v] != N)
      next_sib_[prev_sib_[v]] = next_sib_[v];
    else
      first_child_[p] = next_sib_[v];
    if (next_sib_[v] != N) prev_sib_[next_sib_[v]] = prev_sib_[v];
    next_sib_[v] = prev_sib_[v] = N;
  }

  // Residual capacity of the tree arc above w in the direction of the cycle.
  // toward_root: the cycle traverses w -> parent(w).
  Real tree_residual(std::size_t w, bool toward_root) const {
    std::size_t a = pred_[w];
    bool increase = (up_[w] != 0) == toward_root;
    if (increase) {
      Real r = residual_up(a);
      return r < 0 ? Real(-1) : r;
    }
    return f_[a];
  }

  void pivot(std::size_t e) {
    std::size_t first, second;
    if (state_[e] == kLower) {
      first = s_[e];
      second = t_[e];
    } else {
      first = t_[e];
      second = s_[e];
    }
    // Join node.
    std::size_t u = first, v = second;
    while (u != v) {
      if (depth_[u] > depth_[v])
        u = parent_[u];
      else if (depth_[v] > depth_[u])
        v = parent_[v];
      else {
        u = parent_[u];
        v = parent_[v];
      }
    }
    const std::size_t join = u;

    // Leaving arc; -1 encodes an infinite residual.
    auto less = [](Real a, Real b) { return a >= 0 && (b < 0 || a < b); };
    auto less_eq = [](Real a, Real b) { return a >= 0 && (b < 0 || a <= b); };
    Real delta = state_[e] == kLower ? residual_up(e) : f_[e];
    if (state_[e] == kLower && delta < 0) delta = -1;
    int side = 0;  // 0: entering arc, 1: first side, 2: second side
    std::size_t u_out = 0;
    for (std::size_t w = first; w != join; w = parent_[w]) {
      Real r = tree_residual(w, false);
      if (less(r, delta)) {
        delta = r;
        u_out = w;
        side = 1;
      }
    }
    for (std::size_t w = second; w != join; w = parent_[w]) {
      Real r = tree_residual(w, true);
      if (less_eq(r, delta)) {
        delta = r;
        u_out = w;
        side = 2;
      }
    }
    if (delta < 0) throw ToleranceError("unbounded min-cost flow (negative cycle of infinite capacity)");

    if (delta > 0) {
      f_[e] += state_[e] == kLower ? delta : -delta;
      for (std::size_t w = first; w != join; w = parent_[w])
        f_[pred_[w]] += up_[w] ? -delta : delta;
      for (std::size_t w = second; w != join; w = parent_[w])
        f_[pred_[w]] += up_[w] ? delta : -delta;
    }

    if (side == 0) {
      state_[e] = state_[e] == kLower ? kUpper : kLower;
      return;
    }

    const std::size_t leaving = pred_[u_out];
    bool to_lower = side == 1 ? (up_[u_out] != 0) : (up_[u_out] == 0);
    if (to_lower) {
      f_[leaving] = 0;
      state_[leaving] = kLower;
    } else {
      f_[leaving] = cap_[leaving];
      state_[leaving] = kUpper;
    }
    state_[e] = kTree;

    const std::size_t u_in = side == 1 ? first : second;
    const std::size_t v_in = side == 1 ? second : first;

    // Reverse the tree path u_in -> ... -> u_out and hang it below v_in.
    std::vector<std::size_t>& path = path_buf_;
    path.clear();
    for (std::size_t w = u_in;; w = parent_[w]) {
      path.push_back(w);
      if (w == u_out) break;
    }
    unlink_child(parent_[u_out], u_out);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) unlink_child(path[i + 1], path[i]);
    std::vector<std::size_t> old_pred(path.size());
    std::vector<char> old_up(path.size());
    for (std::size_t i = 0; i < path.size(); ++i) {
      old_pred[i] = pred_[path[i]];
      old_up[i] = up_[path[i]];
    }
    parent_[u_in] = v_in;
    pred_[u_in] = e;
    up_[u_in] = s_[e] == u_in;
    link_child(v_in, u_in);
    for (std::size_t i = 1; i < path.size(); ++i) {
      parent_[path[i]] = path[i - 1];
      pred_[path[i]] = old_pred[i - 1];
      up_[path[i]] = !old_up[i - 1];
      link_child(path[i - 1], path[i]);
    }

    // Potentials and depths of the moved subtree.
    std::vector<std::size_t>& stack = stack_buf_;
    stack.clear();
    stack.push_back(u_in);
    const std::size_t N = n_ + 1;
    while (!stack.empty()) {
      std::size_t w = stack.back();
      stack.pop_back();
      std::size_t p = parent_[w];
      std::size_t a = pred_[w];
      pi_[w] = up_[w] ? pi_[p] - c_[a] : pi_[p] + c_[a];
      depth_[w] = depth_[p] + 1;
      for (std::size_t ch = first_child_[w]; ch != N; ch = next_sib_[ch]) stack.push_back(ch);
    }
  }

  std::size_t n_, m_, root_;
  std::vector<std::size_t> s_, t_;
  std::vector<Real> cap_, c_, f_;  // cap_ < 0 means unbounded
  std::vector<int> state_;
  std::vector<std::size_t> parent_, pred_, depth_, first_child_, next_sib_, prev_sib_;
  std::vector<char> up_;
  std::vector<Real> pi_;
  Real art_cost_ = 0, eps_rc_ = 0;
  std::vector<std::size_t> path_buf_, stack_buf_;
};

}  // namespace

Result Network::solve() const {
  Real total = 0;
  Real scale = 0;
  for (double b : supply_) {
    total += b;
    scale += std::abs(Real(b));
  }
  if (std::abs(total) > 1e-12L * std::max<Real>(1, scale))
    throw InputError("min-cost flow supplies do not sum to zero");

  Simplex sx(supply_, src_, dst_, lower_, upper_, cost_);
  sx.run();

  Result r;
  r.status = sx.feasible() ? Status::optimal : Status::infeasible;
  const std::size_t m = src_.size();
  r.flow.resize(m);
  r.potential.resize(supply_.size());
  Real primal = 0, dual = 0;
  // Re-anchor potentials at node 0 to keep the reported values small.
  const Real anchor = supply_.empty() ? 0 : sx.potential(0);
  for (std::size_t v = 0; v < supply_.size(); ++v) {
    Real pi = sx.potential(v) - anchor;
    r.potential[v] = static_cast<double>(pi);
    dual -= Real(supply_[v]) * pi;
  }
  bool dual_unbounded = false;
  for (std::size_t a = 0; a < m; ++a) {
    Real x = sx.flow(a) + Real(lower_[a]);
    r.flow[a] = static_cast<double>(x);
    primal += Real(cost_[a]) * x;
    Real rc = Real(cost_[a]) + (sx.potential(src_[a]) - sx.potential(dst_[a]));
    if (rc >= 0)
      dual += Real(lower_[a]) * rc;
    else if (std::isinf(upper_[a]))
      dual_unbounded = dual_unbounded || rc < -1e-12L;
    else
      dual += Real(upper_[a]) * rc;
  }
  r.primal = static_cast<double>(primal);
  r.dual = dual_unbounded ? -kInf : static_cast<double>(dual);
  return r;
}

}  // namespace hmass::mcf
