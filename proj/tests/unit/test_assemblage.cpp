#include <doctest.h>

#include <cmath>

#include "boxcast/assemblage.hpp"
#include "boxcast/errors.hpp"
#include "oracles.hpp"

using namespace boxcast;

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

CMatrix basis(int n, int k) {
  CMatrix p = CMatrix::Zero(n, n);
  p(k, k) = 1.0;
  return p;
}

double min_eig(const CMatrix& m) { return Eigen::SelfAdjointEigenSolver<CMatrix>(m).eigenvalues()(0); }

}  // namespace

TEST_CASE("werner assemblage has the closed form") {
  for (double v : {0.0, 0.3, 0.8, 1.0}) {
    Assemblage w = werner_assemblage(v);
    REQUIRE(w.inputs() == 2);
    REQUIRE(w.outputs() == 2);
    const CMatrix dirs[2] = {pauli(3), pauli(1)};
    for (int x = 0; x < 2; ++x)
      for (int a = 0; a < 2; ++a) {
        const CMatrix want = (CMatrix::Identity(2, 2) - (a ? -1.0 : 1.0) * v * dirs[x]) / 4.0;
        CHECK(max_abs(w(a, x) - want) <= 1e-14);
      }
  }
  CHECK_THROWS_AS(werner_assemblage(1.2), ValidationError);
}

TEST_CASE("assemblage invariants are enforced") {
  const CMatrix h = CMatrix::Identity(2, 2) / 4.0;
  CHECK_NOTHROW(Assemblage(2, 2, {h, h, h, h}));
  CHECK_THROWS_AS(Assemblage(2, 2, {h, h, h}), DimensionError);
  CHECK_THROWS_AS(Assemblage(2, 2, {h, h, h, h * 1.1}), ValidationError);
  const CMatrix neg = (CMatrix(2, 2) << 0.5, 0.0, 0.0, -0.25).finished();
  const CMatrix fix = (CMatrix(2, 2) << 0.0, 0.0, 0.0, 0.75).finished();
  CHECK_THROWS_AS(Assemblage(1, 2, {neg, fix}), ValidationError);
  // both inputs normalised, different reduced states
  CHECK_THROWS_AS(Assemblage(2, 2, {basis(2, 0) / 2.0, basis(2, 0) / 2.0, basis(2, 1) / 2.0, basis(2, 1) / 2.0}),
                  SignallingError);
  CHECK_THROWS_AS(Assemblage(2, 2, {h, h, h, h}, AssemblageFactors{}), DimensionError);
}

TEST_CASE("werner steering threshold") {
  for (int k = 0; k <= 10; ++k) {
    const double v = 0.5 + 0.05 * k;
    FeasibilityResult r = is_unsteerable(werner_assemblage(v));
    CAPTURE(v);
    if (v <= 1.0 / std::sqrt(2.0) - 0.05) {
      CHECK(r.status == FeasibilityStatus::model_found);
      REQUIRE(r.model);
      CHECK(max_abs_diff(assemble(2, 2, *r.model), werner_assemblage(v)) <= 1e-6);
      for (const CMatrix& s : r.model->states) CHECK(min_eig(s) >= -1e-8);
    }
    if (v >= 1.0 / std::sqrt(2.0) + 0.05) CHECK(r.steerable());
  }
}

TEST_CASE("steering functionals bound every LHS assemblage") {
  FeasibilityResult r = is_unsteerable(werner_assemblage(0.9));
  REQUIRE(r.steerable());
  const std::vector<Strategy> det = deterministic_strategies(2, 2);
  Rng rng(41);
  for (int t = 0; t < 50; ++t) {
    Assemblage l = random_lhs_assemblage(rng, 2, 2, 2, 1 + t % 5);
    SteeringFunctional f = evaluate_functional(r.functional->coefficients, det, l);
    CHECK(f.value >= f.bound - 1e-12);
    CHECK_FALSE(f.violated);
  }
  // the bound itself: every strategy with every pure state
  for (const Strategy& q : det)
    for (int t = 0; t < 20; ++t) {
      const Eigen::VectorXcd psi = random_pure(rng, 2);
      double v = 0.0;
      for (int k = 0; k < 4; ++k) v += q[k] * (psi.adjoint() * r.functional->coefficients[k] * psi)(0, 0).real();
      CHECK(v >= r.functional->bound - 1e-12);
    }
}

TEST_CASE("random LHS and single-input assemblages have models") {
  Rng rng(42);
  for (int t = 0; t < 20; ++t) {
    const int r = 1 + t % 3, s = 2 + t % 2, d = 2 + t % 2;
    Assemblage l = random_lhs_assemblage(rng, r, s, d);
    FeasibilityResult f = is_unsteerable(l);
    CHECK(f.status == FeasibilityStatus::model_found);
    CHECK(f.residual <= 1e-6);
  }
  for (int t = 0; t < 5; ++t) {
    FeasibilityResult f = is_unsteerable(random_assemblage(rng, 1, 3, 2));
    CHECK(f.status == FeasibilityStatus::model_found);
  }
}

TEST_CASE("UR_ns membership") {
  Rng rng(43);
  for (int t = 0; t < 5; ++t) {
    FeasibilityResult f = is_urns(random_urns_assemblage(rng));
    CHECK(f.status == FeasibilityStatus::model_found);
  }
  Assemblage w = werner_assemblage(0.9);
  FeasibilityResult f = is_urns(product_assemblage(w, w));
  CHECK(f.steerable());
  CHECK_THROWS_AS(is_urns(w), DimensionError);
}

TEST_CASE("CQ states") {
  Rng rng(44);
  Assemblage a = random_assemblage(rng, 3, 2, 2);
  const std::vector<double> pi{0.2, 0.5, 0.3};
  CqState cq = cq_state(a, pi);
  CHECK(std::abs(cq.state.trace().real() - 1.0) <= 1e-12);
  CHECK(min_eig(cq.state) >= -1e-12);
  for (int x = 0; x < 3; ++x)
    for (int b = 0; b < 2; ++b) CHECK(max_abs(cq.state.block((x * 2 + b) * 2, (x * 2 + b) * 2, 2, 2) - pi[x] * a(b, x)) <= 1e-15);
  CHECK_THROWS_AS(cq_state(a, {0.5, 0.5}), DimensionError);

  // product assemblage with product inputs is a product of CQ states
  Assemblage b = random_assemblage(rng, 2, 2, 2), c = random_assemblage(rng, 2, 2, 2);
  const std::vector<double> p0{0.3, 0.7}, p1{0.6, 0.4};
  const CMatrix zw = cq_state_zw(product_assemblage(b, c), p0, p1);
  CHECK(max_abs(zw - kron(cq_state(b, p0).state, cq_state(c, p1).state)) <= 1e-15);
}

TEST_CASE("assemblage divergence is the max over inputs") {
  Rng rng(45);
  for (int t = 0; t < 10; ++t) {
    Assemblage a = random_assemblage(rng, 2, 2, 2), b = random_lhs_assemblage(rng, 2, 2, 2);
    AssemblageDivergenceReport rep = assemblage_kl(a, b);
    // sup over a grid of input distributions of the full CQ divergence
    double grid = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      const std::vector<double> pi{i / 1000.0, 1 - i / 1000.0};
      grid = std::max(grid, quantum_relative_entropy(cq_state(a, pi).state, cq_state(b, pi).state));
    }
    CHECK(std::abs(grid - rep.value) <= 1e-9);
    CHECK(rep.value == doctest::Approx(rep.per_input[rep.argmax_input]));
  }
  Assemblage a = random_assemblage(rng, 2, 2, 2);
  CHECK(assemblage_kl(a, a).value <= 1e-12);
}

TEST_CASE("marginals and broadcast assemblages") {
  Assemblage w = werner_assemblage(0.9), u = werner_assemblage(0.6);
  Assemblage ww = product_assemblage(w, w);
  CHECK(max_abs_diff(marginal_assemblage(ww, 0), w) <= 1e-14);
  CHECK(is_broadcast_assemblage(ww, w));
  CHECK_FALSE(is_broadcast_assemblage(product_assemblage(w, u), w));
  CHECK_FALSE(is_broadcast_assemblage(w, w));
  // move weight between outcomes of one element pair: still valid, no longer a broadcast
  std::vector<CMatrix> el = ww.elements();
  const CMatrix shift = 1e-3 * CMatrix::Identity(4, 4) / 4.0;
  el[0] += shift;
  el[1] -= shift;
  Assemblage bumped(4, 4, el, ww.factors());
  CHECK_FALSE(is_broadcast_assemblage(bumped, w));
}

TEST_CASE("steering entropy bracket") {
  const std::vector<Strategy> det = deterministic_strategies(2, 2);
  double prev = -1.0;
  for (double v : {0.5, 0.8, 0.9, 1.0}) {
    Assemblage w = werner_assemblage(v);
    SteeringEntropyResult e = relative_entropy_steering_ub(w);
    CAPTURE(v);
    CHECK(e.lower_bound <= e.upper_bound);
    CHECK(e.upper_bound - e.lower_bound <= 1e-4);
    CHECK(e.upper_bound >= prev - 1e-9);
    prev = e.upper_bound;
    // Frank-Wolfe bound from the oracle is a valid upper bound, so it sits above
    // the certificate and close to the optimiser's value
    const double fw = oracle::steering_entropy_fw(w, det, v == 0.9 ? 1500 : 200);
    CHECK(fw >= e.lower_bound - 1e-9);
    CHECK(e.upper_bound <= fw + 1e-6);
    if (v == 0.9) CHECK(fw - e.upper_bound <= 5e-3);
    // witness is free
    CHECK(e.witness.residual <= 1e-10);
    CHECK(is_unsteerable(e.witness_assemblage).status == FeasibilityStatus::model_found);
    CHECK(std::abs(assemblage_kl(w, e.witness_assemblage).value - e.upper_bound) <= 1e-9);
  }
  CHECK(relative_entropy_steering_ub(werner_assemblage(0.5)).upper_bound <= 1e-4);
}

TEST_CASE("steering entropy vanishes on free assemblages and is seed stable") {
  Rng rng(46);
  for (int t = 0; t < 5; ++t) CHECK(relative_entropy_steering_ub(random_lhs_assemblage(rng, 2, 2, 2)).upper_bound <= 1e-4);
  for (int t = 0; t < 2; ++t) {
    SteeringEntropyResult e = relative_entropy_steering_ub(random_urns_assemblage(rng));
    CHECK(e.upper_bound <= 1e-4);
    CHECK(is_urns(e.witness_assemblage).status == FeasibilityStatus::model_found);
  }
  Assemblage a = random_assemblage(rng, 2, 2, 2);
  SteeringEntropyConfig c0, c1;
  c1.seed = 99;
  CHECK(std::abs(relative_entropy_steering_ub(a, c0).upper_bound - relative_entropy_steering_ub(a, c1).upper_bound) <=
        1e-4);
}

TEST_CASE("assemblage maps match direct summation") {
  Rng rng(47);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    AssemblageMapShape shape;
    shape.messages = 1 + static_cast<int>(seed % 3);
    AssemblageLosrMap m = random_assemblage_losr(seed, shape, 1 + static_cast<int>(seed % 4));
    Assemblage a = random_assemblage(rng, 2, 2, 2);
    CHECK(max_abs_diff(apply_losr_assemblage(m, a), oracle::apply_assemblage_brute(m, a)) <= 1e-14);
  }
  AssemblageLosrMap route = random_routing_assemblage_losr(3);
  Assemblage a = random_assemblage(rng, 2, 2, 2);
  CHECK(max_abs_diff(apply_losr_assemblage(route, a), oracle::apply_assemblage_brute(route, a)) <= 1e-14);
  CHECK_THROWS_AS(apply_losr_assemblage(route, random_assemblage(rng, 3, 2, 2)), DimensionError);
  CHECK_THROWS_AS(random_assemblage_losr(1, {}, 65), ValidationError);
}

TEST_CASE("site-extension map appends a fixed state") {
  // x = x0, a0 = a, a1 = 0, E(rho) = rho (x) tau
  AssemblageMapShape shape;
  Conditional pre = Conditional::deterministic(4, 2, {0, 0, 1, 1});
  Conditional post = Conditional::deterministic(2, 4, {0, 2});
  const CMatrix tau = (CMatrix(2, 2) << 0.7, 0.1, 0.1, 0.3).finished();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(tau);
  std::vector<CMatrix> ops;
  for (int i = 0; i < 2; ++i) ops.push_back(kron(CMatrix::Identity(2, 2), std::sqrt(es.eigenvalues()(i)) * es.eigenvectors().col(i)));
  AssemblageLosrMap m(shape, {1.0}, {pre}, post, {KrausChannel(ops)});
  Rng rng(48);
  Assemblage a = random_assemblage(rng, 2, 2, 2);
  Assemblage img = apply_losr_assemblage(m, a);
  for (int x0 = 0; x0 < 2; ++x0)
    for (int x1 = 0; x1 < 2; ++x1)
      for (int a0 = 0; a0 < 2; ++a0)
        for (int a1 = 0; a1 < 2; ++a1) {
          const CMatrix want = a1 == 0 ? kron(a(a0, x0), tau) : CMatrix::Zero(4, 4);
          CHECK(max_abs(img(a0 * 2 + a1, x0 * 2 + x1) - want) <= 1e-14);
        }
}

TEST_CASE("maps keep free assemblages free") {
  Rng rng(49);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    Assemblage l = random_lhs_assemblage(rng, 2, 2, 2);
    FeasibilityResult f = is_unsteerable(apply_losr_assemblage(random_assemblage_losr(seed), l));
    CHECK(f.status == FeasibilityStatus::model_found);
    FeasibilityResult g = is_urns(apply_losr_assemblage(random_routing_assemblage_losr(seed), l));
    CHECK(g.status == FeasibilityStatus::model_found);
  }
}

TEST_CASE("steering entropy contracts under routing maps") {
  Rng rng(50);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    Assemblage a = random_assemblage(rng, 2, 2, 2);
    const double before = relative_entropy_steering_ub(a).upper_bound;
    const double after = relative_entropy_steering_ub(apply_losr_assemblage(random_routing_assemblage_losr(seed), a)).upper_bound;
    CHECK(after <= before + 2e-3);
  }
}

TEST_CASE("measured chain rule inequality") {
  Rng rng(51);
  const Povm sic = sic_povm_qubit();
  for (int t = 0; t < 50; ++t) {
    const CMatrix rho = random_density(rng, 4).matrix(), sigma = random_density(rng, 4).matrix();
    MeasuredEntropyReport p = measured_entropy_check(rho, sigma, {2, 2}, sic);
    CHECK(p.holds);
    CHECK(p.lhs >= p.term1 + p.term2 - 1e-9);
  }
  // product states: term2 reduces to the W divergence
  const CMatrix rz = random_density(rng, 2).matrix(), rw = random_density(rng, 2).matrix();
  const CMatrix sz = random_density(rng, 2).matrix(), sw = random_density(rng, 2).matrix();
  MeasuredEntropyReport p = measured_entropy_check(kron(rz, rw), kron(sz, sw), {2, 2}, sic);
  CHECK(p.term2 == doctest::Approx(quantum_relative_entropy(rw, sw)).epsilon(1e-9));
  // flagged measurement on CQ states of broadcast assemblages
  for (int t = 0; t < 10; ++t) {
    Assemblage a = random_assemblage(rng, 2, 2, 2), b = random_lhs_assemblage(rng, 2, 2, 2);
    const std::vector<double> u{0.5, 0.5};
    MeasuredEntropyReport q = measured_entropy_check(cq_state_zw(product_assemblage(a, a), u, u), cq_state_zw(product_assemblage(b, b), u, u),
                                {8, 8}, flagged_povm(2, 2, sic));
    CHECK(q.holds);
  }
  CHECK_THROWS_AS(measured_entropy_check(CMatrix::Identity(4, 4) / 4.0, CMatrix::Identity(4, 4) / 4.0, {2, 3}, sic), DimensionError);
}

TEST_CASE("lemma checks on random instances") {
  CqLemmaConfig cfg;
  cfg.instances = 20;
  CqLemmaReport r = verify_cq_lemmas(cfg);
  CHECK(r.all_passed());
  CHECK(r.reduced_cq.checked == 20);
  CHECK(r.post_measurement.checked >= 20 * 15);
  CHECK(r.convex_sum.checked == 20);
  CHECK(r.injectivity.skipped == 2);
  CHECK(r.injectivity.worst >= 1e-9);
}

TEST_CASE("broadcast raises the steering entropy") {
  BroadcastSteeringReport r = broadcast_steering_demo(werner_assemblage(0.9));
  CHECK(r.is_broadcast);
  CHECK(r.steering.steerable());
  CHECK(r.measured_inequality_holds);
  CHECK(r.first_term_positive);
  CHECK(r.broadcast_not_below);
  CHECK(r.ea_broadcast_lb > r.ea_original_ub);
  CHECK(r.chain_lhs >= r.first_term + r.second_term - 1e-9);
  CHECK_THROWS_AS(broadcast_steering_demo(werner_assemblage(0.5)), PreconditionError);
  Assemblage w = werner_assemblage(0.9);
  CHECK_THROWS_AS(broadcast_steering_demo(w, product_assemblage(w, werner_assemblage(0.8))), ValidationError);
}
