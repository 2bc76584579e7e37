#include "hmass/io.hpp"

#include <fstream>
#include <sstream>

#include "hmass/errors.hpp"

namespace hmass::io {

Json to_json(const Point& p) { return Json(p.vec()); }

Json to_json(const PolyChain1& c) {
  Json segs = Json::array();
  for (const auto& s : c.segments)
    segs.push_back({{"a", to_json(s.seg.a)}, {"b", to_json(s.seg.b)}, {"mult", s.mult}});
  return {{"dim", c.dim}, {"segments", segs}};
}

Json to_json(const Chain0& c) {
  Json atoms = Json::array();
  for (const auto& a : c.atoms) atoms.push_back({{"x", to_json(a.x)}, {"w", a.w}});
  return {{"dim", c.dim}, {"atoms", atoms}};
}

Json to_json(const TransportCost& h) {
  using TC = TransportCost;
  Json j;
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, TC::Power>) {
          j = {{"family", "power"}, {"alpha", f.alpha}};
        } else if constexpr (std::is_same_v<T, TC::Affine>) {
          j = {{"family", "affine"}, {"a", f.a}, {"b", f.b}};
        } else if constexpr (std::is_same_v<T, TC::Capped>) {
          j = {{"family", "capped"}, {"base", to_json(*f.base)}, {"cap", f.cap}};
        } else {
          j = {{"family", "tabulated"}, {"delta", f.delta}, {"values", f.values}};
        }
      },
      h.family());
  j["admissibility"] = h.admissible_asserted ? "user-asserted" : "not asserted";
  return j;
}

namespace {

Json path_json(const PathFlux& p, const char* kind) {
  Json pts = Json::array();
  for (const auto& x : p.points) pts.push_back(to_json(x));
  return {{"nodes", pts}, {"weight", p.weight}, {"kind", kind}};
}

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    throw InputError(where + ": missing field '" + key + "'");
  return j.at(key);
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw InputError(where + ": expected a number");
  return j.get<double>();
}

std::size_t dim_field(const Json& j, const std::string& where) {
  const Json& d = field(j, "dim", where);
  if (!d.is_number_integer() || d.get<long long>() < 1)
    throw InputError(where + ".dim: expected a positive integer");
  return d.get<std::size_t>();
}

}  // namespace

Json to_json(const Decomposition& d) {
  Json out = Json::array();
  for (const auto& p : d.paths) out.push_back(path_json(p, "path"));
  for (const auto& c : d.cycles) out.push_back(path_json(c, "cycle"));
  return out;
}

Json to_json(const PruneResult& r) {
  Json kept = Json::array();
  for (const auto& k : r.kept)
    kept.push_back({{"path", k.path}, {"kept", k.kept}, {"start", k.start}, {"end", k.end}});
  return {{"level", r.level}, {"chain", to_json(r.chain)}, {"kept_intervals", kept}};
}

Json to_json(const Solution& s) {
  return {{"flux", to_json(s.flux)},          {"cost", s.cost_value},
          {"optimality", to_string(s.optimality)}, {"lower", s.lower},
          {"upper", s.upper},                  {"iterations", s.iterations}};
}

Json to_json(const Instance& inst) {
  Json st = Json::array();
  for (const auto& p : inst.steiner_points) st.push_back(to_json(p));
  return {{"mu_plus", to_json(inst.mu_plus)},
          {"mu_minus", to_json(inst.mu_minus)},
          {"grid_res", inst.grid_res},
          {"steiner_points", st},
          {"cost", to_json(inst.cost)},
          {"edges", inst.edges == EdgeMode::complete ? "complete" : "grid"}};
}

Point point_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected an array of coordinates");
  std::vector<double> c;
  for (std::size_t i = 0; i < j.size(); ++i)
    c.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return Point(std::move(c));
}

PolyChain1 chain1_from_json(const Json& j) {
  PolyChain1 c;
  c.dim = dim_field(j, "chain1");
  const Json& segs = field(j, "segments", "chain1");
  if (!segs.is_array()) throw InputError("chain1.segments: expected an array");
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const std::string w = "chain1.segments[" + std::to_string(i) + "]";
    c.add(point_from_json(field(segs[i], "a", w), w + ".a"),
          point_from_json(field(segs[i], "b", w), w + ".b"),
          number(field(segs[i], "mult", w), w + ".mult"));
  }
  return c;
}

Chain0 chain0_from_json(const Json& j, const std::string& where) {
  Chain0 c;
  c.dim = dim_field(j, where);
  const Json& atoms = field(j, "atoms", where);
  if (!atoms.is_array()) throw InputError(where + ".atoms: expected an array");
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const std::string w = where + ".atoms[" + std::to_string(i) + "]";
    c.add(point_from_json(field(atoms[i], "x", w), w + ".x"), number(field(atoms[i], "w", w), w + ".w"));
  }
  return c;
}

TransportCost cost_from_json(const Json& j) {
  if (j.is_string()) return parse_cost(j.get<std::string>());
  const Json& fam = field(j, "family", "cost");
  if (!fam.is_string()) throw InputError("cost.family: expected a string");
  const std::string f = fam.get<std::string>();
  TransportCost h = TransportCost::identity();
  if (f == "power") {
    h = TransportCost::power(number(field(j, "alpha", "cost"), "cost.alpha"));
  } else if (f == "affine") {
    h = TransportCost::affine(number(field(j, "a", "cost"), "cost.a"),
                              number(field(j, "b", "cost"), "cost.b"));
  } else if (f == "capped") {
    h = TransportCost::capped(cost_from_json(field(j, "base", "cost")),
                              number(field(j, "cap", "cost"), "cost.cap"));
  } else if (f == "tabulated") {
    const Json& v = field(j, "values", "cost");
    if (!v.is_array()) throw InputError("cost.values: expected an array");
    std::vector<double> vals;
    for (std::size_t i = 0; i < v.size(); ++i)
      vals.push_back(number(v[i], "cost.values[" + std::to_string(i) + "]"));
    h = TransportCost::tabulated(number(field(j, "delta", "cost"), "cost.delta"), std::move(vals));
  } else {
    throw InputError("cost.family: unknown family '" + f + "'");
  }
  if (j.contains("admissibility") && j["admissibility"] == "user-asserted")
    h.admissible_asserted = true;
  return h;
}

TransportCost parse_cost(const std::string& spec) {
  auto num = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw InputError("cost '" + spec + "': bad number '" + s + "'");
    }
  };
  if (!spec.empty() && spec.front() == '{') return cost_from_json(parse(spec));
  if (spec == "identity") return TransportCost::identity();
  if (spec == "sqrt") return TransportCost::power(0.5);
  if (spec.rfind("power:", 0) == 0) return TransportCost::power(num(spec.substr(6)));
  if (spec.rfind("affine:", 0) == 0) {
    auto rest = spec.substr(7);
    auto comma = rest.find(',');
    if (comma == std::string::npos) throw InputError("cost '" + spec + "': expected affine:A,B");
    return TransportCost::affine(num(rest.substr(0, comma)), num(rest.substr(comma + 1)));
  }
  if (spec.rfind("capped:", 0) == 0) {
    auto rest = spec.substr(7);
    auto colon = rest.rfind(':');
    if (colon == std::string::npos) throw InputError("cost '" + spec + "': expected capped:NAME:CAP");
    return TransportCost::capped(parse_cost(rest.substr(0, colon)), num(rest.substr(colon + 1)));
  }
  throw InputError("unknown cost '" + spec + "'");
}

Instance instance_from_json(const Json& j) {
  Instance inst;
  inst.mu_plus = chain0_from_json(field(j, "mu_plus", "instance"), "instance.mu_plus");
  inst.mu_minus = chain0_from_json(field(j, "mu_minus", "instance"), "instance.mu_minus");
  if (j.contains("grid_res")) inst.grid_res = number(j["grid_res"], "instance.grid_res");
  if (j.contains("steiner_points")) {
    const Json& s = j["steiner_points"];
    if (!s.is_array()) throw InputError("instance.steiner_points: expected an array");
    for (std::size_t i = 0; i < s.size(); ++i)
      inst.steiner_points.push_back(
          point_from_json(s[i], "instance.steiner_points[" + std::to_string(i) + "]"));
  }
  if (j.contains("cost")) inst.cost = cost_from_json(j["cost"]);
  if (j.contains("edges")) {
    if (j["edges"] == "complete")
      inst.edges = EdgeMode::complete;
    else if (j["edges"] == "grid")
      inst.edges = EdgeMode::grid;
    else
      throw InputError("instance.edges: expected \"complete\" or \"grid\"");
  }
  return inst;
}

Json parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace hmass::io
