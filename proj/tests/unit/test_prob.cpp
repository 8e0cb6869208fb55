#include <doctest.h>

#include <cmath>
#include <limits>

#include "boxcast/errors.hpp"
#include "boxcast/prob.hpp"
#include "boxcast/random.hpp"

using namespace boxcast;

TEST_CASE("kl_divergence examples") {
  ProbVector half({0.5, 0.5});
  CHECK(kl_divergence(half, half) == 0.0);
  CHECK(kl_divergence(ProbVector({1.0, 0.0}), half) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::isinf(kl_divergence(half, ProbVector({1.0, 0.0}))));
}

TEST_CASE("kl_divergence errors") {
  CHECK_THROWS_AS(kl_divergence(ProbVector({1.0}), ProbVector({0.5, 0.5})), DimensionError);
  CHECK_THROWS_AS(ProbVector({0.6, 0.6}), ValidationError);
  CHECK_THROWS_AS(ProbVector({1.1, -0.1}), ValidationError);
  // drift below 1e-9 is absorbed
  ProbVector p({0.5 + 4e-10, 0.5});
  CHECK(std::abs(p[0] + p[1] - 1.0) < 1e-15);
}

TEST_CASE("kl asymmetry and non-negativity") {
  ProbVector p({0.9, 0.1}), q({0.5, 0.5});
  CHECK(kl_divergence(p, q) != doctest::Approx(kl_divergence(q, p)));
  Rng rng(7);
  for (int t = 0; t < 200; ++t) {
    ProbVector a(rng.dirichlet(5)), b(rng.dirichlet(5));
    CHECK(kl_divergence(a, b) >= 0.0);
  }
}

namespace {

double direct_kl(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0) s += p[i] * std::log(p[i] / q[i]) / std::log(2.0);
  return s;
}

}  // namespace

TEST_CASE("chain_rule_split against direct evaluation") {
  Rng rng(11);
  for (int t = 0; t < 100; ++t) {
    auto pw = rng.dirichlet(4), qw = rng.dirichlet(4);
    JointTable p(2, 2, pw), q(2, 2, qw);
    ChainSplit cs = chain_rule_split(p, q);
    double pa0 = pw[0] + pw[1], pa1 = pw[2] + pw[3];
    double qa0 = qw[0] + qw[1], qa1 = qw[2] + qw[3];
    double marg = direct_kl({pa0, pa1}, {qa0, qa1});
    double cond = pa0 * direct_kl({pw[0] / pa0, pw[1] / pa0}, {qw[0] / qa0, qw[1] / qa0}) +
                  pa1 * direct_kl({pw[2] / pa1, pw[3] / pa1}, {qw[2] / qa1, qw[3] / qa1});
    CHECK(std::abs(cs.marginal_kl - marg) < 1e-12);
    CHECK(std::abs(cs.conditional_kl_avg - cond) < 1e-12);
    CHECK(std::abs(cs.marginal_kl + cs.conditional_kl_avg - direct_kl(pw, qw)) < 1e-10);
  }
}

TEST_CASE("chain_rule_split trivial cases") {
  JointTable p(2, 3, {0.1, 0.2, 0.1, 0.3, 0.2, 0.1});
  ChainSplit same = chain_rule_split(p, p);
  CHECK(same.marginal_kl == 0.0);
  CHECK(same.conditional_kl_avg == 0.0);

  std::vector<double> pa{0.3, 0.7}, pb{0.2, 0.5, 0.3}, qa{0.6, 0.4}, qb{0.3, 0.3, 0.4};
  std::vector<double> pj, qj;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 3; ++b) {
      pj.push_back(pa[a] * pb[b]);
      qj.push_back(qa[a] * qb[b]);
    }
  ChainSplit cs = chain_rule_split(JointTable(2, 3, pj), JointTable(2, 3, qj));
  CHECK(cs.marginal_kl == doctest::Approx(kl_divergence(ProbVector(pa), ProbVector(qa))).epsilon(1e-12));
  CHECK(cs.conditional_kl_avg == doctest::Approx(kl_divergence(ProbVector(pb), ProbVector(qb))).epsilon(1e-12));
  CHECK_THROWS_AS(chain_rule_split(JointTable(2, 3, pj), JointTable(3, 2, qj)), DimensionError);
}
