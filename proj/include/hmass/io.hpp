#pragma once

#include <string>

#include <json.hpp>

#include "hmass/chain.hpp"
#include "hmass/cost.hpp"
#include "hmass/decomp.hpp"
#include "hmass/flat.hpp"
#include "hmass/prune.hpp"
#include "hmass/solve.hpp"

namespace hmass::io {

using Json = nlohmann::json;

// Doubles are written with round-trip precision, so parse(dump(x)) == x.
Json to_json(const Point& p);
Json to_json(const PolyChain1& c);
Json to_json(const Chain0& c);
Json to_json(const TransportCost& h);
Json to_json(const Decomposition& d);
Json to_json(const PruneResult& r);
Json to_json(const Solution& s);
Json to_json(const Instance& inst);

// Parsers throw InputError with the JSON path of the offending field.
Point point_from_json(const Json& j, const std::string& where);
PolyChain1 chain1_from_json(const Json& j);
Chain0 chain0_from_json(const Json& j, const std::string& where = "chain0");
TransportCost cost_from_json(const Json& j);
Instance instance_from_json(const Json& j);

/// "identity", "sqrt", "power:A", "affine:A,B", "capped:NAME:CAP", or a JSON
/// object as accepted by cost_from_json.
TransportCost parse_cost(const std::string& spec);

Json parse(const std::string& text);
std::string read_file(const std::string& path);

}  // namespace hmass::io
