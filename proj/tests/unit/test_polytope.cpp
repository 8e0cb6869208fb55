#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "boxcast/behavior.hpp"
#include "boxcast/errors.hpp"
#include "boxcast/polytope.hpp"
#include "boxcast/random.hpp"

using namespace boxcast;

namespace {

double dot(const std::vector<double>& f, const Behavior& b) {
  double s = 0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * b.table()[i];
  return s;
}

}  // namespace

TEST_CASE("catalogue sizes") {
  CHECK(local_deterministic_vertices(Scenario::bipartite()).size() == 16);
  CHECK(local_deterministic_vertices(Scenario::bipartite({1, 2}, {1, 2})).size() == 4);
  CHECK(ns_vertices_222().size() == 24);
  VertexCatalogue lr = lrns_broadcast_222();
  CHECK(lr.size() == 576);
  CHECK(lr.scenario == Scenario::broadcast());
  CHECK_THROWS_AS(local_deterministic_vertices(Scenario::broadcast(), 1000), CapacityError);
}

TEST_CASE("local vertices are 0/1 and self-members") {
  VertexCatalogue cat = local_deterministic_vertices(Scenario::bipartite());
  for (std::size_t k = 0; k < cat.size(); ++k) {
    for (double v : cat.vertices[k].table()) CHECK((v == 0.0 || v == 1.0));
    MembershipResult m = membership(cat.vertices[k], cat);
    CHECK(m.inside);
    CHECK(m.residual <= 1e-7);
  }
}

TEST_CASE("ns vertices") {
  VertexCatalogue ns = ns_vertices_222();
  VertexCatalogue loc = local_deterministic_vertices(Scenario::bipartite());
  for (const Behavior& v : ns.vertices) CHECK(is_nonsignalling(v).ok);
  for (std::size_t k = 16; k < 24; ++k) CHECK_FALSE(membership(ns.vertices[k], loc).inside);
  CHECK(max_abs_diff(ns.vertices[16], pr_box()) == 0.0);
}

TEST_CASE("uniform box inside every catalogue") {
  CHECK(membership(uniform_box(Scenario::bipartite()), local_deterministic_vertices(Scenario::bipartite())).inside);
  CHECK(membership(uniform_box(Scenario::bipartite()), ns_vertices_222()).inside);
  CHECK(membership(uniform_box(Scenario::broadcast()), lrns_broadcast_222()).inside);
}

TEST_CASE("pr box separated with CHSH ratio 2") {
  VertexCatalogue loc = local_deterministic_vertices(Scenario::bipartite());
  MembershipResult m = membership(pr_box(), loc);
  REQUIRE_FALSE(m.inside);
  CHECK(m.margin > 0);
  Behavior c = uniform_box(Scenario::bipartite());
  const auto& f = m.functional.coefficients;
  double ratio = (dot(f, pr_box()) - dot(f, c)) / (m.functional.threshold - dot(f, c));
  CHECK(ratio == doctest::Approx(2.0).epsilon(1e-9));
  for (const Behavior& v : loc.vertices) CHECK(dot(f, v) <= m.functional.threshold + 1e-12);
}

TEST_CASE("random convex combinations are inside") {
  Rng rng(21);
  VertexCatalogue loc = local_deterministic_vertices(Scenario::bipartite());
  for (int t = 0; t < 100; ++t) {
    auto w = rng.dirichlet(16, 0.3);
    MembershipResult m = membership(combine(loc, w), loc);
    CHECK(m.inside);
    CHECK(m.residual <= 1e-7);
    double total = 0;
    for (double v : m.weights) {
      CHECK(v >= 0);
      total += v;
    }
    CHECK(std::abs(total - 1) < 1e-9);
  }
}

TEST_CASE("lrns membership") {
  Rng rng(23);
  VertexCatalogue lr = lrns_broadcast_222();
  for (int t = 0; t < 10; ++t) {
    MembershipResult m = membership(random_lrns_mixture(rng), lr);
    CHECK(m.inside);
    CHECK(m.residual <= 1e-7);
  }
  // PR (x) PR is a broadcast of a nonlocal box; it cannot be in LR_ns
  MembershipResult m = membership(product(pr_box(), pr_box()), lr);
  CHECK_FALSE(m.inside);
  CHECK(m.margin > 0);
  for (const Behavior& v : lr.vertices) CHECK(dot(m.functional.coefficients, v) <= m.functional.threshold + 1e-12);
}

TEST_CASE("products of local deterministic pairs are quadripartite-local") {
  VertexCatalogue loc = local_deterministic_vertices(Scenario::bipartite());
  VertexCatalogue loc4 = local_deterministic_vertices(Scenario::broadcast());
  CHECK(loc4.size() == 65536);
  Rng rng(29);
  for (int t = 0; t < 5; ++t) {
    Behavior p = product(loc.vertices[rng.index(16)], loc.vertices[rng.index(16)]);
    CHECK(membership(p, loc4).inside);
  }
}
