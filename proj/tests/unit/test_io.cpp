#include <doctest.h>

#include <cmath>

#include "boxcast/errors.hpp"
#include "boxcast/io.hpp"
#include "boxcast/random.hpp"
#include "oracles.hpp"

using namespace boxcast;

TEST_CASE("behavior round trip is bit exact") {
  Rng rng(7);
  for (int i = 0; i < 20; ++i) {
    Behavior p = oracle::random_nonlocal_222(rng, 0.1, 0.9);
    Behavior q = io::behavior_from_json(io::parse(io::dump(io::to_json(p))));
    CHECK(q.scenario() == p.scenario());
    CHECK(q.table() == p.table());
  }
  Behavior b = product(pr_box(), uniform_box(Scenario::bipartite()));
  CHECK(io::behavior_from_json(io::parse(io::dump(io::to_json(b)))).table() == b.table());
}

TEST_CASE("behavior table nests inputs before outputs") {
  io::Json j = io::to_json(pr_box());
  // P(a=1,b=1|x=1,y=1) = 0 for the PR box, P(0,1|1,1) = 1/2
  CHECK(j["table"][1][1][1][1].get<double>() == 0.0);
  CHECK(j["table"][1][1][0][1].get<double>() == 0.5);
  CHECK(j["scenario"]["wings"].size() == 2);
}

TEST_CASE("malformed behavior inputs are rejected") {
  io::Json j = io::to_json(pr_box());
  io::Json bad = j;
  bad["table"][0].erase(1);
  CHECK_THROWS_AS(io::behavior_from_json(bad), ParseError);
  bad = j;
  bad.erase("scenario");
  CHECK_THROWS_AS(io::behavior_from_json(bad), ParseError);
  bad = j;
  bad["table"][0][0][0][0] = "x";
  CHECK_THROWS_AS(io::behavior_from_json(bad), ParseError);
  bad = j;
  bad["table"][0][0][0][0] = 0.7;
  CHECK_THROWS_AS(io::behavior_from_json(bad), ValidationError);
  CHECK_THROWS_AS(io::parse("{\"scenario\": "), ParseError);
}

TEST_CASE("losr map round trip preserves images") {
  LosrMap m = random_losr(3);
  LosrMap m2 = io::losr_from_json(io::parse(io::dump(io::to_json(m))));
  Behavior p = pr_box();
  CHECK(apply(m2, p).table() == apply(m, p).table());
}

TEST_CASE("assemblage round trip") {
  Assemblage w = werner_assemblage(0.8);
  Assemblage w2 = io::assemblage_from_json(io::parse(io::dump(io::to_json(w))));
  CHECK(max_abs_diff(w, w2) == 0.0);
  CHECK_FALSE(w2.factors());
  Assemblage p = product_assemblage(w, werner_assemblage(0.6));
  Assemblage p2 = io::assemblage_from_json(io::to_json(p));
  CHECK(max_abs_diff(p, p2) == 0.0);
  REQUIRE(p2.factors());
  CHECK(*p2.factors() == *p.factors());

  io::Json bad = io::to_json(w);
  bad["elements"].erase("1,1");
  CHECK_THROWS_AS(io::assemblage_from_json(bad), ParseError);
}

TEST_CASE("catalogue round trip") {
  VertexCatalogue ns = ns_vertices_222();
  VertexCatalogue back = io::catalogue_from_json(io::to_json(ns));
  REQUIRE(back.size() == ns.size());
  for (std::size_t k = 0; k < ns.size(); ++k) CHECK(back.vertices[k].table() == ns.vertices[k].table());
  CHECK_THROWS_AS(io::catalogue_from_json(io::Json::array()), ParseError);
}

TEST_CASE("infinite values survive serialisation") {
  ElrResult r(pr_box());
  r.value = r.upper_bound = INFINITY;
  r.weights = {1.0};
  io::Json j = io::to_json(r);
  CHECK(j["value"] == "inf");
  CHECK(io::parse(io::dump(j))["upper_bound"] == "inf");
}

TEST_CASE("digest is stable and content sensitive") {
  CHECK(io::digest("") == "cbf29ce484222325");
  CHECK(io::digest("a") == "af63dc4c8601ec8c");
  CHECK(io::digest("ab") != io::digest("ba"));
}
