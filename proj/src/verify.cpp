#include "boxcast/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iterator>
#include <limits>

#include "boxcast/assemblage.hpp"
#include "boxcast/divergence.hpp"
#include "boxcast/errors.hpp"
#include "boxcast/losr.hpp"
#include "boxcast/parallel.hpp"
#include "boxcast/polytope.hpp"
#include "boxcast/random.hpp"

namespace boxcast {

VerifyScope parse_scope(const std::string& s) {
  if (s == "boxes") return VerifyScope::boxes;
  if (s == "assemblages") return VerifyScope::assemblages;
  if (s == "all") return VerifyScope::all;
  throw ValidationError("unknown scope \"" + s + "\" (boxes|assemblages|all)");
}

std::string to_string(VerifyScope s) {
  switch (s) {
    case VerifyScope::boxes: return "boxes";
    case VerifyScope::assemblages: return "assemblages";
    default: return "all";
  }
}

InjectedFault parse_fault(const std::string& s) {
  if (s == "none") return InjectedFault::none;
  if (s == "chain-rule") return InjectedFault::chain_rule;
  throw ValidationError("unknown fault \"" + s + "\" (none|chain-rule)");
}

int SuiteReport::passed() const {
  return static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; }));
}

int SuiteReport::failed() const { return static_cast<int>(checks.size()) - passed(); }

bool SuiteReport::theorem_failure() const {
  return std::any_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.theorem && !c.passed; });
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Context {
  const VerifyConfig& cfg;

  int count(int n) const { return std::max(1, static_cast<int>(std::lround(n * cfg.instance_scale))); }
  // Independent stream per check so scoping does not shift later checks.
  Rng rng(int salt) const { return Rng(cfg.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(salt)); }

  const VertexCatalogue& local2() const {
    static const VertexCatalogue cat = local_deterministic_vertices(Scenario::bipartite());
    return cat;
  }
  const VertexCatalogue& lrns() const {
    static const VertexCatalogue cat = lrns_broadcast_222();
    return cat;
  }
  const MembershipSolver& lrns_solver() const {
    static const MembershipSolver s(lrns());
    return s;
  }
  const MembershipSolver& local2_solver() const {
    static const MembershipSolver s(local2());
    return s;
  }
};

// Nonlocal with probability one: an NS vertex outside the local set
// mixed with a random NS box.
Behavior random_nonlocal_ns(Rng& rng) {
  const double v = 0.3 + 0.6 * rng.uniform();
  const Behavior parts[2] = {nonlocal_ns_vertex(rng.index(2), rng.index(2), rng.index(2)), random_ns_222(rng)};
  const double w[2] = {v, 1 - v};
  return mix(parts, w);
}

// Pure two-qubit state measured in two random bases; steerable for
// almost every draw.
Assemblage random_pure_assemblage(Rng& rng) {
  const DensityMatrix psi = random_density(rng, 4, 1);
  std::vector<Povm> meas;
  for (int x = 0; x < 2; ++x) meas.push_back(Povm::projective(random_unitary(rng, 2)));
  return steering_from_state(psi, meas);
}

CheckResult make(std::string name, int criterion, bool theorem = true) {
  CheckResult c;
  c.name = std::move(name);
  c.criterion = criterion;
  c.theorem = theorem;
  return c;
}

// ---- boxes ----

CheckResult chain_rule(const Context& ctx) {
  CheckResult c = make("chain-rule", 1);
  Rng rng = ctx.rng(1);
  const int n = ctx.count(500);
  // tampered decomposition for the negative control
  const double shift = ctx.cfg.fault == InjectedFault::chain_rule ? 1e-6 : 0.0;
  int finite = 0;
  for (int t = 0; t < n; ++t) {
    Behavior p = random_broadcast_ns(rng, 3, true), q = random_broadcast_ns(rng, 3, true);
    std::array<int, 4> in{rng.index(2), rng.index(2), rng.index(2), rng.index(2)};
    ChainRuleReport r = verify_chain_rule_box(p, q, in);
    if (!r.finite) continue;
    ++finite;
    const double res = std::abs(r.lhs - (r.marginal_term + r.conditional_term + shift));
    c.worst = std::max(c.worst, res);
  }
  c.instances = n;
  c.limit = 1e-10;
  c.passed = finite > 0 && c.worst <= c.limit;
  c.metrics = {{"finite_cases", finite}};
  if (shift > 0) c.note = "fault injected: conditional term shifted by 1e-6";
  return c;
}

CheckResult box_contractivity(const Context& ctx) {
  CheckResult c = make("box-kl-contractivity", 2);
  Rng rng = ctx.rng(2);
  const int n = ctx.count(200);
  c.worst = -kInf;
  for (int t = 0; t < n; ++t) {
    LosrMap m = random_losr(rng.next());
    Behavior p = random_ns_222(rng), q = random_ns_222(rng);
    ContractivityReport r = contractivity_check(m, p, q);
    c.worst = std::max(c.worst, r.image_kl - r.original_kl);
  }
  c.instances = n;
  c.limit = 1e-9;
  c.passed = c.worst <= c.limit;
  return c;
}

CheckResult elr_monotone(const Context& ctx) {
  CheckResult c = make("elr-monotone-under-lrns-losr", 3);
  Rng rng = ctx.rng(3);
  const int n = ctx.count(50);
  std::vector<std::uint64_t> seeds(n);
  std::vector<Behavior> boxes;
  for (int t = 0; t < n; ++t) {
    seeds[t] = rng.next();
    boxes.push_back(random_nonlocal_ns(rng));
  }
  std::vector<double> excess(n, kInf), pre(n, 0.0);
  std::vector<int> preserved(n, 0);
  ctx.lrns_solver();
  parallel_for(n, [&](std::size_t t) {
    LosrMap m = random_routing_losr(seeds[t]);
    if (!preserves_lrns(m, ctx.local2(), ctx.lrns_solver()).preserves) return;
    preserved[t] = 1;
    const double before = relative_entropy_nl(boxes[t], ctx.local2()).value;
    const double after = relative_entropy_nl(apply(m, boxes[t]), ctx.lrns()).value;
    pre[t] = before;
    excess[t] = after - before;
  });
  c.worst = *std::max_element(excess.begin(), excess.end());
  c.instances = n;
  c.limit = 2e-3;
  c.passed = c.worst <= c.limit;
  const int kept = static_cast<int>(std::count(preserved.begin(), preserved.end(), 1));
  c.metrics = {{"maps_preserving_lrns", kept},
               {"min_preimage_elr", *std::min_element(pre.begin(), pre.end())},
               {"max_preimage_elr", *std::max_element(pre.begin(), pre.end())}};
  return c;
}

CheckResult broadcast_gap(const Context& ctx) {
  CheckResult c = make("elr-broadcast-gap", 4);
  const Behavior pr = pr_box(), pr2 = product(pr, pr);
  BroadcastGapReport r = broadcast_gap(pr2, pr, ctx.lrns(), ctx.local2());
  const double ip4 = elr_interior_point(pr2, ctx.lrns()).value;
  const double ip2 = elr_interior_point(pr, ctx.local2()).value;
  const double d4 = std::abs(r.elr_p4.value - ip4), d2 = std::abs(r.elr_p2.value - ip2);
  c.instances = 1;
  c.worst = r.gap;
  c.limit = 2e-3;
  c.passed = r.p2_nonlocal && r.gap > c.limit && d4 <= 1e-3 && d2 <= 1e-3;
  c.metrics = {{"elr_pr_pr", r.elr_p4.value},      {"elr_pr", r.elr_p2.value},
               {"elr_pr_pr_barrier", ip4},         {"elr_pr_barrier", ip2},
               {"optimizer_disagreement", std::max(d4, d2)}, {"gap", r.gap},
               {"combined_tolerance", r.combined_tolerance}};
  c.note = "gap must exceed 2e-3 with both optimizers agreeing within 1e-3";
  return c;
}

CheckResult lemma_conditionals(const Context& ctx) {
  CheckResult c = make("conditional-lemmas", 5);
  Rng rng = ctx.rng(5);
  const int n = ctx.count(20);
  const Behavior p4 = product(pr_box(), pr_box());
  int conditionals = 0, local = 0;
  bool b1 = true, b3 = true;
  double min_gap = kInf;
  for (int t = 0; t < n; ++t) {
    ConditionalBoxReport r = verify_conditional_boxes(p4, random_lrns_mixture(rng), ctx.lrns_solver(), ctx.local2_solver());
    conditionals += r.conditionals_checked;
    if (r.candidate_conditionals_local) local += r.conditionals_checked;
    b1 = b1 && r.nonlocal_conditional_ok && !r.pair_marginal_local;
    b3 = b3 && r.gap_positive;
    for (double v : r.gap_values) min_gap = std::min(min_gap, v);
  }
  c.instances = n;
  c.worst = conditionals - local;   // conditionals failing the local LP
  c.limit = 0;
  c.passed = local == conditionals && b1 && b3;
  c.metrics = {{"conditionals_checked", conditionals}, {"nonlocal_conditional_every_setting", b1 ? 1 : 0},
               {"min_gap_value", min_gap}};
  return c;
}

CheckResult membership_completeness(const Context& ctx) {
  CheckResult c = make("membership-completeness", 0, false);
  Rng rng = ctx.rng(11);
  const int n = ctx.count(500);
  int inside = 0;
  for (int t = 0; t < n; ++t) {
    MembershipResult r = ctx.local2_solver().solve(combine(ctx.local2(), rng.dirichlet(16, 0.5)));
    if (r.inside) ++inside;
    if (r.inside) c.worst = std::max(c.worst, r.residual);
  }
  MembershipResult pr = ctx.local2_solver().solve(pr_box());
  c.instances = n;
  c.limit = 1e-7;
  c.passed = inside == n && c.worst <= c.limit && !pr.inside && pr.margin >= 0.5e-9;
  c.metrics = {{"inside", inside}, {"pr_margin", pr.margin}};
  return c;
}

CheckResult elr_vanishes(const Context& ctx) {
  CheckResult c = make("elr-zero-on-lrns", 0);
  Rng rng = ctx.rng(12);
  const int n = ctx.count(3);
  for (int t = 0; t < n; ++t) c.worst = std::max(c.worst, relative_entropy_nl(random_lrns_mixture(rng), ctx.lrns()).value);
  c.worst = std::max(c.worst, relative_entropy_nl(random_local(rng, Scenario::bipartite()), ctx.local2()).value);
  c.instances = n + 1;
  c.limit = 1e-6;
  c.passed = c.worst <= c.limit;
  return c;
}

CheckResult elr_restarts(const Context& ctx) {
  CheckResult c = make("elr-restart-stability", 0, false);
  Rng rng = ctx.rng(13);
  const Behavior parts[2] = {nonlocal_ns_vertex(rng.index(2), rng.index(2), rng.index(2)), random_local(rng, Scenario::bipartite())};
  const double w[2] = {0.7, 0.3};
  const Behavior p = mix(parts, w);
  ElrConfig cfg;
  cfg.random_init = true;
  double lo = kInf, hi = -kInf;
  for (int s = 0; s < 10; ++s) {
    cfg.seed = rng.next();
    const double v = relative_entropy_nl(p, ctx.local2(), cfg).value;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  c.instances = 10;
  c.worst = hi - lo;
  c.limit = 1e-4;
  c.passed = c.worst <= c.limit;
  c.metrics = {{"value", lo}};
  return c;
}

CheckResult losr_linearity(const Context& ctx) {
  CheckResult c = make("losr-linearity", 0);
  Rng rng = ctx.rng(14);
  const int n = ctx.count(50);
  for (int t = 0; t < n; ++t) {
    LosrMap m = random_losr(rng.next());
    Behavior p = random_ns_222(rng), q = random_ns_222(rng);
    const double a = rng.uniform();
    const Behavior in[2] = {p, q}, out[2] = {apply(m, p), apply(m, q)};
    const double w[2] = {a, 1 - a};
    c.worst = std::max(c.worst, max_abs_diff(apply(m, mix(in, w)), mix(out, w)));
  }
  c.instances = n;
  c.limit = 1e-12;
  c.passed = c.worst <= c.limit;
  return c;
}

CheckResult box_kl_grid(const Context& ctx) {
  CheckResult c = make("box-kl-setting-grid", 0);
  Rng rng = ctx.rng(15);
  const Behavior u = uniform_box(Scenario::bipartite());
  const Behavior pa[2] = {random_ns_222(rng), u}, qa[2] = {random_ns_222(rng), u};
  const double w[2] = {0.9, 0.1};
  const Behavior p = mix(pa, w), q = mix(qa, w);
  double kl[4];
  for (int s = 0; s < 4; ++s) kl[s] = kl_bits(p.row(s), q.row(s));
  // about 10^4 points of the setting simplex
  const int g = 37;
  double best = -kInf;
  int points = 0;
  for (int i = 0; i <= g; ++i)
    for (int j = 0; i + j <= g; ++j)
      for (int k = 0; i + j + k <= g; ++k, ++points)
        best = std::max(best, (i * kl[0] + j * kl[1] + k * kl[2] + (g - i - j - k) * kl[3]) / g);
  c.instances = points;
  c.worst = std::abs(best - box_kl(p, q).value);
  c.limit = 1e-9;
  c.passed = c.worst <= c.limit;
  return c;
}

// ---- quantum and assemblages ----

CheckResult channel_monotonicity(const Context& ctx) {
  CheckResult c = make("quantum-kl-monotonicity", 6);
  Rng rng = ctx.rng(6);
  const int n = ctx.count(200);
  c.worst = -kInf;
  for (int t = 0; t < n; ++t) {
    const int din = 2 + rng.index(3), dout = 2 + rng.index(3);
    KrausChannel ch = random_cptp(rng.next(), din, dout);
    DensityMatrix r = random_density(rng, din), s = random_density(rng, din);
    const double after = quantum_relative_entropy(apply_channel(ch, r.matrix()), apply_channel(ch, s.matrix()));
    c.worst = std::max(c.worst, after - quantum_relative_entropy(r, s));
  }
  c.instances = n;
  c.limit = 1e-8;
  c.passed = c.worst <= c.limit;
  return c;
}

CheckResult measured_entropy_inequality(const Context& ctx) {
  CheckResult c = make("measured-relative-entropy-inequality", 6);
  Rng rng = ctx.rng(7);
  const int n = ctx.count(100);
  const Povm sic = sic_povm_qubit();
  int holds = 0;
  c.worst = -kInf;
  for (int t = 0; t < n; ++t) {
    const CMatrix rho = random_density(rng, 4).matrix(), sigma = random_density(rng, 4).matrix();
    MeasuredEntropyReport r = measured_entropy_check(rho, sigma, {2, 2}, sic);
    if (r.holds) ++holds;
    if (std::isfinite(r.lhs)) c.worst = std::max(c.worst, r.term1 + r.term2 - r.lhs);
  }
  c.instances = n;
  c.limit = 1e-8;
  c.passed = holds == n;
  return c;
}

CheckResult werner_classification(const Context&) {
  CheckResult c = make("werner-steering-classification", 7);
  const double threshold = 1.0 / std::sqrt(2.0);
  FeasibilityResult low = is_unsteerable(werner_assemblage(0.3));
  FeasibilityResult high = is_unsteerable(werner_assemblage(0.9));
  bool consistent = true;
  double last_model = 0.0, first_steerable = 1.0;
  int points = 0;
  for (int k = 1; k <= 20; ++k, ++points) {
    const double v = 0.05 * k;
    FeasibilityResult r = is_unsteerable(werner_assemblage(v));
    const bool model = r.status == FeasibilityStatus::model_found;
    if (model) last_model = std::max(last_model, v);
    if (r.steerable()) first_steerable = std::min(first_steerable, v);
    if (v <= threshold - 0.05 && !model) consistent = false;
    if (v >= threshold + 0.05 && !r.steerable()) consistent = false;
  }
  const bool low_ok = low.status == FeasibilityStatus::model_found && low.residual <= 1e-6;
  c.instances = points + 2;
  c.worst = std::abs(0.5 * (last_model + first_steerable) - threshold);
  c.limit = 0.05;
  c.passed = low_ok && high.steerable() && consistent && last_model < first_steerable && c.worst <= c.limit;
  c.metrics = {{"residual_at_0.3", low.residual},
               {"functional_margin_at_0.9", high.functional ? high.functional->bound - high.functional->value : 0.0},
               {"largest_unsteerable_visibility", last_model},
               {"smallest_steerable_visibility", first_steerable}};
  return c;
}

CheckResult appendix_lemmas(const Context& ctx) {
  CheckResult c = make("cq-state-lemmas", 8);
  CqLemmaConfig cfg;
  cfg.instances = ctx.count(100);
  cfg.seed = ctx.rng(8).next();
  CqLemmaReport r = verify_cq_lemmas(cfg);
  c.instances = cfg.instances;
  c.worst = r.injectivity.worst;
  c.limit = 1e-9;
  c.passed = r.all_passed() && r.injectivity.worst >= c.limit;
  auto add = [&](const std::string& k, const LemmaTally& t) {
    c.metrics.emplace_back(k + "_checked", t.checked);
    c.metrics.emplace_back(k + "_passed", t.passed);
    c.metrics.emplace_back(k + "_skipped", t.skipped);
    c.metrics.emplace_back(k + "_worst", t.worst);
  };
  add("reduced_cq", r.reduced_cq);
  add("post_measurement", r.post_measurement);
  add("convex_sum", r.convex_sum);
  add("injectivity", r.injectivity);
  c.note = "worst is the smallest image distance between distinct assemblages";
  return c;
}

CheckResult steering_contractivity(const Context& ctx) {
  CheckResult c = make("steering-entropy-contractivity", 9);
  Rng rng = ctx.rng(9);
  const int n = ctx.count(30);
  std::vector<Assemblage> src;
  std::vector<std::uint64_t> seeds;
  for (int t = 0; t < n; ++t) {
    src.push_back(random_pure_assemblage(rng));
    seeds.push_back(rng.next());
  }
  std::vector<double> excess(n), pre(n);
  parallel_for(n, [&](std::size_t t) {
    const double before = relative_entropy_steering_ub(src[t]).upper_bound;
    pre[t] = before;
    const double after =
        relative_entropy_steering_ub(apply_losr_assemblage(random_routing_assemblage_losr(seeds[t]), src[t])).upper_bound;
    excess[t] = after - before;
  });
  c.instances = n;
  c.worst = *std::max_element(excess.begin(), excess.end());
  c.limit = 2e-3;
  c.passed = c.worst <= c.limit;
  c.metrics = {{"min_preimage_upper", *std::min_element(pre.begin(), pre.end())},
               {"max_preimage_upper", *std::max_element(pre.begin(), pre.end())}};
  return c;
}

CheckResult broadcast_steering(const Context&) {
  CheckResult c = make("broadcast-steering-entropy", 9);
  BroadcastSteeringReport r = broadcast_steering_demo(werner_assemblage(0.9));
  c.instances = 1;
  c.worst = r.first_term;
  c.limit = 1e-3;
  c.passed = r.is_broadcast && r.measured_inequality_holds && r.first_term_positive && r.broadcast_not_below;
  c.metrics = {{"ea_original_upper", r.ea_original_ub}, {"ea_original_lower", r.ea_original_lb},
               {"ea_broadcast_upper", r.ea_broadcast_ub}, {"ea_broadcast_lower", r.ea_broadcast_lb},
               {"chain_lhs", r.chain_lhs},             {"first_term", r.first_term},
               {"second_term", r.second_term}};
  c.note = "first term must exceed 1e-3 and the broadcast upper bound stay above the original's minus 1e-3";
  return c;
}

CheckResult unsteerable_preservation(const Context& ctx) {
  CheckResult c = make("unsteerable-preservation", 0);
  Rng rng = ctx.rng(21);
  const int n = ctx.count(50);
  std::vector<Assemblage> src;
  std::vector<std::uint64_t> seeds;
  for (int t = 0; t < n; ++t) {
    src.push_back(random_lhs_assemblage(rng, 2, 2, 2));
    seeds.push_back(rng.next());
  }
  std::vector<double> res(n);
  std::vector<int> ok(n);
  parallel_for(n, [&](std::size_t t) {
    FeasibilityResult f = is_unsteerable(apply_losr_assemblage(random_assemblage_losr(seeds[t]), src[t]));
    ok[t] = f.status == FeasibilityStatus::model_found;
    res[t] = f.residual;
  });
  c.instances = n;
  c.worst = *std::max_element(res.begin(), res.end());
  c.limit = 1e-6;
  c.passed = std::count(ok.begin(), ok.end(), 1) == n;
  return c;
}

CheckResult steering_entropy_free(const Context& ctx) {
  CheckResult c = make("steering-entropy-zero-on-free", 0);
  Rng rng = ctx.rng(22);
  const int n = ctx.count(5);
  for (int t = 0; t < n; ++t) {
    c.worst = std::max(c.worst, relative_entropy_steering_ub(random_lhs_assemblage(rng, 2, 2, 2)).upper_bound);
    c.worst = std::max(c.worst, relative_entropy_steering_ub(random_urns_assemblage(rng)).upper_bound);
  }
  c.instances = 2 * n;
  c.limit = 1e-4;
  c.passed = c.worst <= c.limit;
  return c;
}

CheckResult assemblage_kl_checks(const Context& ctx) {
  CheckResult c = make("assemblage-kl", 0);
  Rng rng = ctx.rng(23);
  const int n = ctx.count(10);
  double self = 0.0, grid_err = 0.0, distinct_min = kInf;
  for (int t = 0; t < n; ++t) {
    Assemblage a = random_assemblage(rng, 2, 2, 2), b = random_assemblage(rng, 2, 2, 2);
    self = std::max(self, assemblage_kl(a, a).value);
    distinct_min = std::min(distinct_min, assemblage_kl(a, b).value);
    double best = -kInf;
    for (int i = 0; i <= 1000; ++i) {
      const double p = i / 1000.0;
      const std::vector<double> pi{p, 1 - p};
      best = std::max(best, quantum_relative_entropy(cq_state(a, pi).state, cq_state(b, pi).state));
    }
    grid_err = std::max(grid_err, std::abs(best - assemblage_kl(a, b).value));
  }
  c.instances = n;
  c.worst = std::max(self, grid_err);
  c.limit = 1e-9;
  c.passed = c.worst <= c.limit && distinct_min > 0.0;
  c.metrics = {{"self_divergence", self}, {"grid_error", grid_err}, {"min_distinct", distinct_min}};
  return c;
}

struct Entry {
  const char* name;
  int criterion;
  CheckResult (*run)(const Context&);
};

const Entry kBoxChecks[] = {
    {"chain-rule", 1, chain_rule},
    {"box-kl-contractivity", 2, box_contractivity},
    {"elr-monotone-under-lrns-losr", 3, elr_monotone},
    {"elr-broadcast-gap", 4, broadcast_gap},
    {"conditional-lemmas", 5, lemma_conditionals},
    {"membership-completeness", 0, membership_completeness},
    {"elr-zero-on-lrns", 0, elr_vanishes},
    {"elr-restart-stability", 0, elr_restarts},
    {"losr-linearity", 0, losr_linearity},
    {"box-kl-setting-grid", 0, box_kl_grid},
};

const Entry kAssemblageChecks[] = {
    {"quantum-kl-monotonicity", 6, channel_monotonicity},
    {"measured-relative-entropy-inequality", 6, measured_entropy_inequality},
    {"werner-steering-classification", 7, werner_classification},
    {"cq-state-lemmas", 8, appendix_lemmas},
    {"steering-entropy-contractivity", 9, steering_contractivity},
    {"broadcast-steering-entropy", 9, broadcast_steering},
    {"unsteerable-preservation", 0, unsteerable_preservation},
    {"steering-entropy-zero-on-free", 0, steering_entropy_free},
    {"assemblage-kl", 0, assemblage_kl_checks},
};

}  // namespace

SuiteReport run_verify_suite(const VerifyConfig& cfg) {
  const Context ctx{cfg};
  std::vector<Entry> checks;
  if (cfg.scope != VerifyScope::assemblages) checks.insert(checks.end(), std::begin(kBoxChecks), std::end(kBoxChecks));
  if (cfg.scope != VerifyScope::boxes)
    checks.insert(checks.end(), std::begin(kAssemblageChecks), std::end(kAssemblageChecks));
  SuiteReport rep;
  rep.seed = cfg.seed;
  rep.scope = cfg.scope;
  for (const Entry& e : checks) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = e.run(ctx);
    } catch (const Error& ex) {
      r = make(e.name, e.criterion);
      r.note = std::string("error: ") + ex.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.checks.push_back(std::move(r));
  }
  return rep;
}

}  // namespace boxcast
