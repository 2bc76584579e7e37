#include <doctest.h>

#include <random>

#include "hmass/errors.hpp"
#include "hmass/io.hpp"

using namespace hmass;

TEST_CASE("chains round-trip bit for bit") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  PolyChain1 c;
  Chain0 z;
  for (int i = 0; i < 50; ++i) {
    c.add(Point{u(rng), u(rng) / 3}, Point{u(rng) * 1e-7, u(rng)}, u(rng) / 7);
    z.add(Point{u(rng) / 11, u(rng)}, u(rng));
  }
  auto c2 = io::chain1_from_json(io::parse(io::to_json(c).dump()));
  REQUIRE(c2.segments.size() == c.segments.size());
  for (std::size_t i = 0; i < c.segments.size(); ++i) {
    CHECK(c2.segments[i].seg.a == c.segments[i].seg.a);
    CHECK(c2.segments[i].seg.b == c.segments[i].seg.b);
    CHECK(c2.segments[i].mult == c.segments[i].mult);
  }
  auto z2 = io::chain0_from_json(io::parse(io::to_json(z).dump()));
  REQUIRE(z2.atoms.size() == z.atoms.size());
  for (std::size_t i = 0; i < z.atoms.size(); ++i) {
    CHECK(z2.atoms[i].x == z.atoms[i].x);
    CHECK(z2.atoms[i].w == z.atoms[i].w);
  }
}

TEST_CASE("instances round-trip") {
  Instance in;
  in.mu_plus = {2, {{Point{0.1, 0.2}, 1.0}}};
  in.mu_minus = {2, {{Point{0.3, 0.7}, 1.0}}};
  in.steiner_points = {Point{0.2, 0.45}};
  in.grid_res = 0.125;
  in.edges = EdgeMode::grid;
  in.cost = TransportCost::capped(TransportCost::power(1.0 / 3), 2.5);
  in.cost.admissible_asserted = true;
  auto j = io::to_json(in);
  auto back = io::instance_from_json(io::parse(j.dump()));
  CHECK(io::to_json(back) == j);
  CHECK(back.cost(0.7) == in.cost(0.7));
  CHECK(j["cost"]["admissibility"] == "user-asserted");
}

TEST_CASE("malformed and invalid input names the field") {
  CHECK_THROWS_AS(io::parse("{\"dim\": 2, \"segments\": ["), InputError);
  CHECK_THROWS_WITH_AS(io::chain1_from_json(io::parse(R"({"dim":2,"segments":[{"a":[0,0],"b":[1,0]}]})")),
                       doctest::Contains("chain1.segments[0]"), InputError);
  CHECK_THROWS_WITH_AS(io::chain0_from_json(io::parse(R"({"dim":2,"atoms":[{"x":[0,"a"],"w":1}]})")),
                       doctest::Contains("chain0.atoms[0].x[1]"), InputError);
  CHECK_THROWS_AS(io::chain1_from_json(io::parse(R"({"dim":0,"segments":[]})")), InputError);
  CHECK_THROWS_AS(io::cost_from_json(io::parse(R"({"family":"cubic"})")), InputError);
  CHECK_THROWS_AS(io::read_file("/nonexistent/file.json"), InputError);
}

TEST_CASE("named costs") {
  CHECK(io::parse_cost("identity")(3.0) == 3.0);
  CHECK(io::parse_cost("sqrt")(4.0) == 2.0);
  CHECK(io::parse_cost("power:0.25")(16.0) == doctest::Approx(2.0));
  CHECK(io::parse_cost("affine:2,1")(3.0) == 7.0);
  CHECK(io::parse_cost("capped:sqrt:0.5")(4.0) == 2.0);
  CHECK(io::parse_cost("capped:sqrt:0.5")(0.25) == 0.125);
  CHECK(io::parse_cost(R"({"family":"power","alpha":0.5})")(9.0) == 3.0);
  CHECK_THROWS_AS(io::parse_cost("power:x"), InputError);
  CHECK_THROWS_AS(io::parse_cost("affine:1"), InputError);
  CHECK_THROWS_AS(io::parse_cost("cubic"), InputError);
  CHECK_THROWS_AS(io::parse_cost("power:2"), InputError);
}
