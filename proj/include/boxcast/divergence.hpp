#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "boxcast/behavior.hpp"
#include "boxcast/errors.hpp"
#include "boxcast/polytope.hpp"

namespace boxcast {

struct BoxDivergenceReport {
  double value = 0.0;               // bits, max over settings (+inf possible)
  int argmax_setting = 0;
  std::vector<int> argmax_digits;   // per-site inputs of the maximizing setting
  std::vector<double> per_setting;
};

BoxDivergenceReport box_kl(const Behavior& p, const Behavior& q);

struct ElrConfig {
  std::vector<double> temperatures{1.0, 0.3, 0.1, 0.03, 0.01, 0.003, 0.001, 3e-4, 1e-4, 3e-5};
  std::vector<double> eps_ladder{1e-2, 1e-3, 1e-4};
  int iters = 20000;          // mirror-descent budget per epsilon rung
  std::uint64_t seed = 0;
  bool random_init = false;   // Dirichlet start instead of uniform weights
  double stall_tol = 1e-12;   // relative decrease that ends a temperature stage
};

struct LadderEntry {
  double eps = 0.0;
  double upper = 0.0;         // max-over-settings KL at this rung's witness
  double lower = 0.0;         // certified lower bound at this rung's witness
  int iterations = 0;
};

struct ElrResult {
  explicit ElrResult(Behavior w) : witness(std::move(w)) {}

  double value = 0.0;         // epsilon -> 0 extrapolation, clamped into [lower_bound, upper_bound]
  double upper_bound = 0.0;   // box_kl(p, witness)
  double lower_bound = 0.0;   // gap certificate
  double tolerance = 0.0;     // upper_bound - lower_bound
  std::vector<double> weights;
  Behavior witness;
  int argmax_setting = 0;
  std::vector<LadderEntry> ladder;
  int iterations = 0;
  bool converged = false;
};

class OptimizationError : public Error {
 public:
  OptimizationError(const std::string& what, ElrResult last) : Error(what), last_(std::move(last)) {}
  const ElrResult& last_iterate() const { return last_; }

 private:
  ElrResult last_;
};

// Relative entropy of nonlocality against the convex hull of a catalogue.
ElrResult relative_entropy_nl(const Behavior& p, const VertexCatalogue& cat, const ElrConfig& cfg = {});

// Certified lower bound on min_w max_s KL_s(P || sum_k w_k V_k) from any
// weight vector (Frank-Wolfe duality over several setting distributions).
double elr_lower_bound(const Behavior& p, const VertexCatalogue& cat, const std::vector<double>& weights);

// Second E_LR solver: damped-Newton log-barrier path on the epigraph form
// min t s.t. KL_s(sum_k w_k V_k) <= t, w in the simplex. `value` is the
// objective at the final (feasible) weights, within `gap` of the optimum.
struct BarrierElrResult {
  double value = 0.0;
  std::vector<double> weights;
  int newton_steps = 0;
};
BarrierElrResult elr_interior_point(const Behavior& p, const VertexCatalogue& cat, double gap = 1e-9);

struct ChainRuleReport {
  double lhs = 0.0;               // S(P(.|x,y) || Q(.|x,y)) over all four outputs
  double marginal_term = 0.0;     // S(P(a0 b0|x0 y0) || Q(a0 b0|x0 y0))
  double conditional_term = 0.0;  // sum_{a0 b0} P(a0 b0|x0 y0) S(P(a1 b1|...) || Q(a1 b1|...))
  double residual = 0.0;
  bool finite = true;
};

// inputs = (x0, x1, y0, y1)
ChainRuleReport verify_chain_rule_box(const Behavior& p4, const Behavior& q4, std::array<int, 4> inputs);

struct ConditionalBoxReport {
  bool pair_marginal_local = false;           // pair-1 marginal of p4 is local
  bool nonlocal_conditional_ok = false;       // every (x0,y0) has a nonlocal conditional with positive weight
  bool candidate_conditionals_local = false;  // every conditional of q4 is local
  bool gap_positive = false;                  // the max expression is positive for every (x0,y0)
  int conditionals_checked = 0;
  std::vector<double> gap_values;                                 // per (x0,y0)
  std::vector<std::array<int, 2>> nonlocal_conditional_witness;  // (a0,b0) per (x0,y0), -1 if none
};

// q4 must be in LR_ns (checked with `lrns`); `local2` is the local solver
// of a single pair.
ConditionalBoxReport verify_conditional_boxes(const Behavior& p4, const Behavior& q4,
                                                  const MembershipSolver& lrns, const MembershipSolver& local2);

// Conditional pair-1 box P(a1 b1 | x1 y1; x0 y0 a0 b0).
Behavior conditional_pair1_box(const Behavior& b4, int x0, int y0, int a0, int b0);

struct BroadcastGapReport {
  ElrResult elr_p4;
  ElrResult elr_p2;
  double gap = 0.0;
  double combined_tolerance = 0.0;
  bool p2_nonlocal = false;
  bool gap_significant = false;   // gap exceeds the combined certificate gaps
};

BroadcastGapReport broadcast_gap(const Behavior& p4, const Behavior& p2, const VertexCatalogue& cat4,
                      const VertexCatalogue& cat2, const ElrConfig& cfg = {});

}  // namespace boxcast
