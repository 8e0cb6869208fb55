#include <doctest.h>

#include <cmath>

#include "boxcast/behavior.hpp"
#include "boxcast/errors.hpp"
#include "boxcast/polytope.hpp"
#include "boxcast/random.hpp"

using namespace boxcast;

TEST_CASE("scenario validation") {
  CHECK_THROWS_AS(Scenario({{2, 2}, {0, 2}}, {{0}, {1}}), ValidationError);
  CHECK_THROWS_AS(Scenario({{2, 2}, {2, 2}}, {{0, 1}, {}}), ValidationError);
  CHECK_THROWS_AS(Scenario({{2, 2}, {2, 2}}, {{1}, {0}}), ValidationError);
  Scenario b = Scenario::broadcast();
  CHECK(b.num_settings() == 16);
  CHECK(b.num_outcomes() == 16);
  CHECK(b.alice_inputs() == 4);
  int digits[4] = {1, 0, 1, 1};
  CHECK(b.setting_index(digits) == 11);
  CHECK(b.setting_digits(11) == std::vector<int>{1, 0, 1, 1});
}

TEST_CASE("behavior validation") {
  CHECK_THROWS_AS(Behavior(Scenario::bipartite(), std::vector<double>(15, 0.25)), DimensionError);
  std::vector<double> t(16, 0.25);
  t[0] = 0.3;
  CHECK_THROWS_AS(Behavior(Scenario::bipartite(), t), ValidationError);
}

TEST_CASE("is_nonsignalling examples") {
  int r0[] = {0, 1};
  std::vector<std::vector<int>> resp{{0, 1}, {1, 1}};
  (void)r0;
  CHECK(is_nonsignalling(deterministic_box(Scenario::bipartite(), resp)).ok);
  CHECK(is_nonsignalling(pr_box()).ok);
  // P(a|x,y) = delta_{a,y}, Bob outputs 0
  std::vector<double> t(16, 0.0);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) t[(x * 2 + y) * 4 + y * 2 + 0] = 1.0;
  NsReport r = is_nonsignalling(Behavior(Scenario::bipartite(), t));
  CHECK_FALSE(r.ok);
  CHECK(r.max_violation == doctest::Approx(1.0));
}

TEST_CASE("pr box marginals are uniform") {
  Behavior pr = pr_box();
  for (int s = 0; s < 4; ++s) {
    CHECK(pr(s, 0) + pr(s, 1) == doctest::Approx(0.5));  // a = 0
    CHECK(pr(s, 0) + pr(s, 2) == doctest::Approx(0.5));  // b = 0
  }
}

TEST_CASE("product and marginal_pair") {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    Behavior p = random_ns_222(rng), q = random_ns_222(rng);
    Behavior pq = product(p, q);
    CHECK(max_abs_diff(marginal_pair(pq, 0), p) < 1e-12);
    CHECK(max_abs_diff(marginal_pair(pq, 1), q) < 1e-12);
    CHECK(is_nonsignalling(pq).ok);
    const int cell[2] = {0, 2};
    CHECK(is_nonsignalling(pq, cell).ok);
  }
  Behavior pp = product(pr_box(), pr_box());
  CHECK(max_abs_diff(marginal_pair(pp, 0), pr_box()) < 1e-15);
  CHECK(max_abs_diff(marginal_pair(pp, 1), pr_box()) < 1e-15);
  // product of deterministic boxes stays deterministic
  std::vector<std::vector<int>> r1{{0, 1}, {1, 0}}, r2{{1, 1}, {0, 0}};
  Behavior d = product(deterministic_box(Scenario::bipartite(), r1), deterministic_box(Scenario::bipartite(), r2));
  for (double v : d.table()) CHECK((v == 0.0 || v == 1.0));
}

TEST_CASE("marginal_pair matches brute-force summation") {
  Rng rng(5);
  for (int t = 0; t < 10; ++t) {
    Behavior b4 = random_broadcast_ns(rng);
    Behavior m0 = marginal_pair(b4, 0);
    for (int x0 = 0; x0 < 2; ++x0)
      for (int x1 = 0; x1 < 2; ++x1)
        for (int y0 = 0; y0 < 2; ++y0)
          for (int y1 = 0; y1 < 2; ++y1)
            for (int a0 = 0; a0 < 2; ++a0)
              for (int b0 = 0; b0 < 2; ++b0) {
                double s = 0;
                for (int a1 = 0; a1 < 2; ++a1)
                  for (int b1 = 0; b1 < 2; ++b1)
                    s += b4.table()[((((x0 * 2 + x1) * 2 + y0) * 2 + y1) * 16) + ((a0 * 2 + a1) * 2 + b0) * 2 + b1];
                CHECK(std::abs(s - m0.table()[(x0 * 2 + y0) * 4 + a0 * 2 + b0]) < 1e-12);
              }
  }
}

TEST_CASE("marginal_pair rejects signalling across pairs") {
  // pair-0 output copies x1
  std::vector<double> t(256, 0.0);
  Scenario sc = Scenario::broadcast();
  for (int s = 0; s < 16; ++s) {
    auto sd = sc.setting_digits(s);
    int od[4] = {sd[1], 0, 0, 0};
    t[s * 16 + sc.outcome_index(od)] = 1.0;
  }
  CHECK_THROWS_AS(marginal_pair(Behavior(sc, t), 0), SignallingError);
}

TEST_CASE("is_broadcast_of") {
  Behavior pp = product(pr_box(), pr_box());
  CHECK(is_broadcast_of(pp, pr_box()));
  std::vector<std::vector<int>> r{{0, 0}, {0, 0}};
  CHECK_FALSE(is_broadcast_of(product(pr_box(), deterministic_box(Scenario::bipartite(), r)), pr_box()));
  // perturbation of size 1e-3 inside pair 0
  std::vector<double> t = pp.table();
  Scenario sc = pp.scenario();
  for (int s = 0; s < 16; ++s) {
    auto sd = sc.setting_digits(s);
    if (sd[0] != 0 || sd[2] != 0) continue;
    int b1 = sd[1] & sd[3];
    int hi[4] = {0, 0, 0, b1}, lo[4] = {1, 0, 1, b1};
    t[s * 16 + sc.outcome_index(hi)] += 1e-3;
    t[s * 16 + sc.outcome_index(lo)] -= 1e-3;
  }
  CHECK_FALSE(is_broadcast_of(Behavior(sc, t), pr_box()));
}

TEST_CASE("condition_on_pair0") {
  Rng rng(9);
  Behavior p = random_ns_222(rng), q = random_ns_222(rng);
  Behavior pq = product(p, q);
  for (int a0 = 0; a0 < 2; ++a0)
    for (int b0 = 0; b0 < 2; ++b0) {
      ProbVector c = condition_on_pair0(pq, a0, b0, 1, 0, 1, 1);
      for (int k = 0; k < 4; ++k) CHECK(std::abs(c[k] - q(3, k)) < 1e-12);
    }
  // perfectly correlated pairs: a1 = a0, b1 = b0, uniform over (a0,b0)
  Scenario sc = Scenario::broadcast();
  std::vector<double> t(256, 0.0);
  for (int s = 0; s < 16; ++s)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        int od[4] = {a, a, b, b};
        t[s * 16 + sc.outcome_index(od)] = 0.25;
      }
  Behavior corr(sc, t);
  ProbVector pm = condition_on_pair0(corr, 1, 0, 0, 0, 0, 0);
  CHECK(pm[1 * 2 + 0] == doctest::Approx(1.0));
  // zero-probability event
  std::vector<std::vector<int>> r{{0, 0}, {0, 0}};
  Behavior det = product(deterministic_box(Scenario::bipartite(), r), pr_box());
  CHECK_THROWS_AS(condition_on_pair0(det, 1, 0, 0, 0, 0, 0), ConditioningError);
}

TEST_CASE("condition_on_pair0 reconstructs NS boxes") {
  Rng rng(13);
  for (int t = 0; t < 10; ++t) {
    Behavior b4 = random_broadcast_ns(rng);
    Behavior m0 = marginal_pair(b4, 0);
    const Scenario& sc = b4.scenario();
    double worst = 0;
    for (int s = 0; s < 16; ++s) {
      auto sd = sc.setting_digits(s);
      for (int a0 = 0; a0 < 2; ++a0)
        for (int b0 = 0; b0 < 2; ++b0) {
          double w = m0(sd[0] * 2 + sd[2], a0 * 2 + b0);
          if (w <= 1e-12) continue;
          ProbVector c = condition_on_pair0(b4, a0, b0, sd[0], sd[2], sd[1], sd[3]);
          for (int a1 = 0; a1 < 2; ++a1)
            for (int b1 = 0; b1 < 2; ++b1) {
              int od[4] = {a0, a1, b0, b1};
              // direct ratio oracle
              worst = std::max(worst, std::abs(w * c[a1 * 2 + b1] - b4(s, sc.outcome_index(od))));
            }
        }
    }
    CHECK(worst < 1e-10);
  }
}
