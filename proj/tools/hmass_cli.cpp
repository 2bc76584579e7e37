// Command-line driver. Reports are JSON lines (one object per line) or CSV.
// Exit codes: 0 success, 1 tolerance failure, 2 input error.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "hmass/chain.hpp"
#include "hmass/cost.hpp"
#include "hmass/decomp.hpp"
#include "hmass/diagnostics.hpp"
#include "hmass/errors.hpp"
#include "hmass/flat.hpp"
#include "hmass/io.hpp"
#include "hmass/prune.hpp"
#include "hmass/solve.hpp"

using hmass::io::Json;

namespace {

struct RunConfig {
  std::string input;
  std::string output;
  std::uint64_t seed = 0;
  double eps_point = 1e-9;
  double eps_mass = 1e-12;
  std::string grid_levels;
  std::string pairs;
  std::string cost = "sqrt";
  double grid_res = 0.0;
  int n_max = 8;
  std::string method = "auto";
  std::string box;
  double m_max = 4.0;
  std::size_t steps = 4096;
  double M = 0.0;
  double N = 0.0;
  bool csv = false;

  hmass::Tolerance tol() const {
    if (!(eps_point >= 0) || !(eps_mass >= 0)) throw hmass::InputError("tolerances must be >= 0");
    return {eps_point, eps_mass};
  }
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw hmass::InputError("cannot write " + path);
    }
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }
  void line(const Json& j) { os() << j.dump() << '\n'; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

template <class T>
std::vector<T> parse_list(const std::string& text, const char* flag) {
  std::vector<T> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      long long v = std::stoll(item, &used);
      if (used != item.size() || v < 0) throw std::invalid_argument(item);
      out.push_back(static_cast<T>(v));
    } catch (const std::exception&) {
      throw hmass::InputError(std::string(flag) + ": bad entry '" + item + "'");
    }
  }
  return out;
}

Json load_input(const RunConfig& cfg) {
  if (cfg.input.empty()) throw hmass::InputError("--input is required");
  return hmass::io::parse(hmass::io::read_file(cfg.input));
}

int cmd_decompose(const RunConfig& cfg) {
  const auto tol = cfg.tol();
  hmass::PolyChain1 chain = hmass::io::chain1_from_json(load_input(cfg));
  hmass::validate(chain, tol);
  hmass::GeoGraph g = hmass::build_graph(chain, tol);
  hmass::Decomposition d = hmass::decompose(g, tol.eps_mass);
  const hmass::PolyChain1 canon = g.to_chain();
  const double reassembly =
      hmass::mass(hmass::canonicalize(d.reassemble() - canon, tol));
  const bool ok = d.residual < tol.eps_mass || d.residual == 0.0;
  Output out(cfg.output);
  out.line({{"decomposition", hmass::io::to_json(d)},
            {"paths", d.paths.size()},
            {"cycles", d.cycles.size()},
            {"residual", d.residual},
            {"mass", hmass::mass(canon)},
            {"decomposition_mass", d.mass()},
            {"reassembly_error", reassembly},
            {"acyclic", hmass::is_acyclic(g).acyclic},
            {"conserved", ok}});
  return ok ? 0 : 1;
}

int cmd_approx(const RunConfig& cfg) {
  const auto tol = cfg.tol();
  hmass::PolyChain1 chain = hmass::io::chain1_from_json(load_input(cfg));
  hmass::validate(chain, tol);
  auto levels = parse_list<int>(cfg.grid_levels, "--grid-levels");
  auto pairs = parse_list<long long>(cfg.pairs, "--pairs");
  if (levels.empty() && pairs.empty())
    throw hmass::InputError("approx needs --grid-levels and/or --pairs");
  if (!levels.empty() && !pairs.empty() && levels.size() != pairs.size())
    throw hmass::InputError("--grid-levels and --pairs must have the same length");
  hmass::ApproxOptions opts;
  opts.seed = cfg.seed;
  opts.tol = tol;
  const std::size_t steps = std::max(levels.size(), pairs.size());
  for (std::size_t k = 0; k < steps; ++k) {
    hmass::ApproxStep st;
    if (!levels.empty()) st.level = levels[k];
    if (!pairs.empty()) st.pairs = pairs[k];
    opts.schedule.push_back(st);
  }
  const hmass::TransportCost h = hmass::io::parse_cost(cfg.cost);
  hmass::ApproxReport rep = hmass::diagonal_approx(chain, h, opts);
  bool ok = true;
  Output out(cfg.output);
  if (cfg.csv) {
    out.os() << "step,level,pairs,mass_gap,h_mass_gap,boundary_mass,boundary_support\n";
  } else {
    out.line({{"shift", hmass::io::to_json(rep.shift)},
              {"mass", rep.mass},
              {"h_mass", rep.h_mass},
              {"boundary_mass", rep.boundary_mass},
              {"cost", hmass::io::to_json(h)}});
  }
  for (std::size_t k = 0; k < rep.steps.size(); ++k) {
    const auto& r = rep.steps[k];
    const double shrink = hmass::shrinkage_violation(r.chain, chain, tol);
    const bool step_ok = r.boundary_mass <= rep.boundary_mass + tol.eps_mass && shrink <= tol.eps_mass;
    ok = ok && step_ok;
    if (cfg.csv) {
      out.os() << k << ',' << (r.step.level ? std::to_string(*r.step.level) : "") << ','
               << (r.step.pairs ? std::to_string(*r.step.pairs) : "") << ',' << fmt(r.mass_gap)
               << ',' << fmt(r.h_mass_gap) << ',' << fmt(r.boundary_mass) << ','
               << r.boundary_support << '\n';
    } else {
      Json j{{"step", k},
             {"mass_gap", r.mass_gap},
             {"h_mass", r.h_mass},
             {"h_mass_gap", r.h_mass_gap},
             {"boundary_mass", r.boundary_mass},
             {"boundary_support", r.boundary_support},
             {"shrinkage_violation", shrink},
             {"ok", step_ok}};
      j["level"] = r.step.level ? Json(*r.step.level) : Json(nullptr);
      j["pairs"] = r.step.pairs ? Json(*r.step.pairs) : Json(nullptr);
      out.line(j);
    }
  }
  return ok ? 0 : 1;
}

int cmd_counterexamples(const RunConfig& cfg) {
  const auto tol = cfg.tol();
  hmass::FlatGrid grid;
  if (cfg.grid_res > 0) grid.res = cfg.grid_res;
  auto rows = hmass::counterexample_rows(cfg.n_max, grid, tol);
  Output out(cfg.output);
  bool ok = true;
  out.os() << "family,n,mass,boundary_mass,flat_norm,flat_bound\n";
  for (const auto& r : rows) {
    ok = ok && std::abs(r.flat_gap) < 1e-8;
    out.os() << r.family << ',' << r.n << ',' << fmt(r.mass) << ',' << fmt(r.boundary_mass) << ','
             << fmt(r.flat_norm) << ',' << fmt(r.flat_bound) << '\n';
  }
  return ok ? 0 : 1;
}

int cmd_solve(const RunConfig& cfg, bool cost_given) {
  const auto tol = cfg.tol();
  hmass::Instance inst = hmass::io::instance_from_json(load_input(cfg));
  if (cost_given) inst.cost = hmass::io::parse_cost(cfg.cost);
  if (cfg.grid_res > 0) inst.grid_res = cfg.grid_res;
  hmass::validate(inst, tol);
  hmass::CandidateGraph g = hmass::build_candidate_graph(inst, tol);
  hmass::Solution s;
  if (cfg.method == "brute") {
    s = hmass::solve_bruteforce(g, inst.cost, {}, tol);
  } else if (cfg.method == "local") {
    s = hmass::solve_local(g, inst.cost, cfg.seed, tol);
  } else if (cfg.method == "auto") {
    double m = 0.0;
    for (double b : g.supply) m += std::max(b, 0.0);
    s = g.edges.size() <= 16 && inst.cost.is_concave(m)
            ? hmass::solve_bruteforce(g, inst.cost, {}, tol)
            : hmass::solve_local(g, inst.cost, cfg.seed, tol);
  } else {
    throw hmass::InputError("--method must be brute, local or auto");
  }
  const double w1 = hmass::wasserstein1(inst.mu_plus, inst.mu_minus, tol);
  const double hp = inst.cost.h_prime_0();
  Json j = hmass::io::to_json(s);
  j["candidate_nodes"] = g.nodes.size();
  j["candidate_edges"] = g.edges.size();
  j["wasserstein1"] = w1;
  j["cost_name"] = inst.cost.name();
  j["admissibility"] = "user-asserted";
  bool ok = hmass::approx_equal(hmass::boundary(s.flux, tol),
                                hmass::canonicalize(inst.mu_minus - inst.mu_plus, tol), tol, 1e-9);
  if (std::isfinite(hp)) {
    j["w1_bound"] = hp * w1;
    ok = ok && s.cost_value <= hp * w1 + 1e-8;
  }
  j["ok"] = ok;
  Output out(cfg.output);
  out.line(j);
  return ok ? 0 : 1;
}

int cmd_envelope(const RunConfig& cfg) {
  const hmass::TransportCost h = hmass::io::parse_cost(cfg.cost);
  if (!(cfg.m_max > 0) || cfg.steps < 1) throw hmass::InputError("need --m-max > 0 and --steps >= 1");
  if (cfg.M > 0 && cfg.N > 0) throw hmass::InputError("give at most one of --M and --N");
  const hmass::GridSpec grid = hmass::GridSpec::with_steps(cfg.m_max, cfg.steps);
  hmass::TransportCost g = h;
  double alpha = 0.0;
  bool ok = true;
  if (cfg.M > 0) {
    auto env = hmass::make_h_M(h, cfg.M, grid);
    g = env.cost;
    alpha = env.alpha;
    ok = hmass::check_h_M(h, env, grid).worst() <= 1e-6;
  } else if (cfg.N > 0) {
    g = hmass::make_h_N(h, cfg.N, grid);
  } else {
    hmass::CostSamples psi{grid.delta, {}};
    for (std::size_t k = 0; k < grid.points(); ++k) psi.values.push_back(h(k * grid.delta));
    g = hmass::subadditive_lsc_envelope(psi);
  }
  Output out(cfg.output);
  if (alpha > 0) out.os() << "# alpha=" << fmt(alpha) << '\n';
  out.os() << "m,h,envelope\n";
  for (std::size_t k = 0; k < grid.points(); ++k) {
    double m = k * grid.delta;
    out.os() << fmt(m) << ',' << fmt(h(m)) << ',' << fmt(g(m)) << '\n';
  }
  return ok ? 0 : 1;
}

int cmd_flatnorm(const RunConfig& cfg) {
  const auto tol = cfg.tol();
  Json in = load_input(cfg);
  Output out(cfg.output);
  if (in.is_object() && in.contains("atoms")) {
    hmass::Chain0 t = hmass::io::chain0_from_json(in);
    auto r = hmass::flat_norm_0(t, 1.0, tol);
    out.line({{"value", r.value},
              {"gap", r.gap},
              {"filling", hmass::io::to_json(r.filling)},
              {"remainder", hmass::io::to_json(r.remainder)}});
    return std::abs(r.gap) < 1e-9 ? 0 : 1;
  }
  hmass::PolyChain1 t = hmass::io::chain1_from_json(in);
  hmass::validate(t, tol);
  if (t.dim != 2) throw hmass::InputError("flatnorm of 1-chains needs dim 2");
  double x0 = -1, x1 = 1, y0 = -1, y1 = 1;
  if (!cfg.box.empty()) {
    std::stringstream ss(cfg.box);
    char c1, c2, c3;
    if (!(ss >> x0 >> c1 >> x1 >> c2 >> y0 >> c3 >> y1) || c1 != ',' || c2 != ',' || c3 != ',')
      throw hmass::InputError("--box expects x0,x1,y0,y1");
  } else {
    for (const auto& s : t.segments)
      for (const hmass::Point* p : {&s.seg.a, &s.seg.b}) {
        x0 = std::min(x0, (*p)[0]);
        x1 = std::max(x1, (*p)[0]);
        y0 = std::min(y0, (*p)[1]);
        y1 = std::max(y1, (*p)[1]);
      }
  }
  const double res = cfg.grid_res > 0 ? cfg.grid_res : 1.0 / 64;
  auto cx = hmass::CellComplex2D::adapted(x0, x1, y0, y1, res, t, tol.eps_point);
  auto r = hmass::flat_norm_1_grid(t, cx, true, tol);
  out.line({{"value", r.value},
            {"gap", r.gap},
            {"snap_error", r.snap_error},
            {"faces", cx.face_count()},
            {"edges", cx.edge_count()},
            {"filling", r.filling},
            {"remainder", r.remainder}});
  return std::abs(r.gap) < 1e-8 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polyhedral 1-currents: decompositions, approximations, flat norms, branched transport"};
  app.require_subcommand(1);
  RunConfig cfg;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "input JSON file");
    sub->add_option("--output", cfg.output, "output file (default stdout)");
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_option("--eps-point", cfg.eps_point, "point identification radius");
    sub->add_option("--eps-mass", cfg.eps_mass, "multiplicity zero threshold");
  };
  auto* dec = app.add_subcommand("decompose", "path/cycle decomposition of a chain");
  common(dec);
  auto* apx = app.add_subcommand("approx", "grid pruning and pair truncation sequence");
  common(apx);
  apx->add_option("--grid-levels", cfg.grid_levels, "dyadic levels k1,k2,...");
  apx->add_option("--pairs", cfg.pairs, "endpoint-pair counts n1,n2,...");
  apx->add_option("--cost", cfg.cost, "transport cost (name or JSON)");
  apx->add_flag("--csv", cfg.csv, "CSV instead of JSON lines");
  auto* cex = app.add_subcommand("counterexamples", "mass, boundary mass and flat norm of the two sequences");
  common(cex);
  cex->add_option("--n-max", cfg.n_max, "largest index");
  cex->add_option("--grid-res", cfg.grid_res, "flat-norm grid resolution (default 1/64)");
  auto* sol = app.add_subcommand("solve", "branched transport on a candidate graph");
  common(sol);
  auto* cost_opt = sol->add_option("--cost", cfg.cost, "override the instance cost");
  sol->add_option("--grid-res", cfg.grid_res, "override the instance grid resolution");
  sol->add_option("--method", cfg.method, "brute, local or auto");
  auto* env = app.add_subcommand("envelope", "subadditive envelope of a cost on a grid");
  common(env);
  env->add_option("--cost", cfg.cost, "transport cost (name or JSON)");
  env->add_option("--m-max", cfg.m_max, "grid end");
  env->add_option("--steps", cfg.steps, "grid steps");
  env->add_option("--M", cfg.M, "superlinear envelope parameter");
  env->add_option("--N", cfg.N, "linear cap parameter");
  auto* fln = app.add_subcommand("flatnorm", "flat norm of a 0-chain or a planar 1-chain");
  common(fln);
  fln->add_option("--grid-res", cfg.grid_res, "grid resolution for 1-chains (default 1/64)");
  fln->add_option("--box", cfg.box, "x0,x1,y0,y1 (default: [-1,1]^2 grown to the chain)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  try {
    if (*dec) return cmd_decompose(cfg);
    if (*apx) return cmd_approx(cfg);
    if (*cex) return cmd_counterexamples(cfg);
    if (*sol) return cmd_solve(cfg, cost_opt->count() > 0);
    if (*env) return cmd_envelope(cfg);
    if (*fln) return cmd_flatnorm(cfg);
  } catch (const hmass::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const hmass::ToleranceError& e) {
    std::cerr << "tolerance failure: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
