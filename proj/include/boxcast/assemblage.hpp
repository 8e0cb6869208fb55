#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "boxcast/losr.hpp"
#include "boxcast/quantum.hpp"

namespace boxcast {

// Shape of a broadcast-scenario assemblage: inputs (x0,x1), outputs
// (a0,a1), Bob's space B0 (x) B1. Joint indices are x = x0*r1 + x1,
// a = a0*s1 + a1.
struct AssemblageFactors {
  int r0 = 2, r1 = 2, s0 = 2, s1 = 2, d0 = 2, d1 = 2;
  bool operator==(const AssemblageFactors&) const = default;
};

// Unnormalised conditional states rho_{a|x} on Bob's side.
// Each element PSD within 1e-10, sum_a tr = 1 within 1e-9 for every x,
// and sum_a rho_{a|x} independent of x within 1e-9.
class Assemblage {
 public:
  Assemblage(int inputs, int outputs, std::vector<CMatrix> elements,
             std::optional<AssemblageFactors> factors = std::nullopt);

  int inputs() const { return r_; }
  int outputs() const { return s_; }
  int dim() const { return d_; }
  const CMatrix& operator()(int a, int x) const { return el_[static_cast<std::size_t>(x) * s_ + a]; }
  const std::vector<CMatrix>& elements() const { return el_; }
  const std::optional<AssemblageFactors>& factors() const { return factors_; }

  CMatrix reduced_state() const;  // sum_a rho_{a|0}
  double prob(int a, int x) const { return (*this)(a, x).trace().real(); }

 private:
  int r_, s_, d_;
  std::vector<CMatrix> el_;
  std::optional<AssemblageFactors> factors_;
};

double max_abs_diff(const Assemblage& a, const Assemblage& b);

// rho_{a|x} = tr_A((M_a^x (x) I) rho_AB)
Assemblage steering_from_state(const DensityMatrix& rho_ab, const std::vector<Povm>& alice);

// Two-qubit Werner state v |psi-><psi-| + (1-v) I/4 measured with sigma_z
// and sigma_x on Alice's side.
Assemblage werner_assemblage(double visibility);

// rho_{a0 a1|x0 x1} = rho_{a0|x0} (x) rho'_{a1|x1}
Assemblage product_assemblage(const Assemblage& first, const Assemblage& second);

// Alice-side response functions q(a|x), flat at x * outputs + a.
using Strategy = std::vector<double>;
std::vector<Strategy> deterministic_strategies(int inputs, int outputs);
// The 24 non-signalling vertices of a (2,2,2) wing, indexed as assemblage
// inputs (x0,x1) and outputs (a0,a1).
std::vector<Strategy> ns_wing_strategies();

struct LhsModel {
  std::vector<Strategy> strategies;
  std::vector<CMatrix> states;   // unnormalised, sum of traces = 1
  double residual = 0.0;         // max-norm reconstruction error
};

Assemblage assemble(int inputs, int outputs, const LhsModel& m, std::optional<AssemblageFactors> f = std::nullopt);

// Linear witness: for every model over the strategy list,
//   sum_{a,x} tr(F_{a|x} sigma_{a|x}) >= bound.
struct SteeringFunctional {
  std::vector<CMatrix> coefficients;   // at x * outputs + a
  double bound = 0.0;
  double value = 0.0;                  // evaluated on the tested assemblage
  bool violated = false;               // value < bound - 1e-9
};

enum class FeasibilityStatus { model_found, no_model_within_budget };

struct FeasibilityConfig {
  int max_iterations = 50000;
  double tol = 1e-6;           // model found iff reconstruction residual <= tol
  double target = 1e-9;        // stop early once the residual is this small
};

struct FeasibilityResult {
  FeasibilityStatus status = FeasibilityStatus::no_model_within_budget;
  std::optional<LhsModel> model;
  std::optional<SteeringFunctional> functional;
  double residual = 0.0;
  int iterations = 0;
  // no model within budget and the functional separates the assemblage
  bool steerable() const { return status == FeasibilityStatus::no_model_within_budget && functional && functional->violated; }
};

// Feasibility of rho_{a|x} = sum_l q_l(a|x) sigma_l, sigma_l PSD, by
// Dykstra's alternating projections.
FeasibilityResult lhs_feasibility(const Assemblage& asm_, const std::vector<Strategy>& strategies,
                                  const FeasibilityConfig& cfg = {});
FeasibilityResult is_unsteerable(const Assemblage& asm_, const FeasibilityConfig& cfg = {});
// Broadcast-shaped assemblage against models with non-signalling A-wing
// responses (binary (2,2,2) wings only).
FeasibilityResult is_urns(const Assemblage& asm4, const FeasibilityConfig& cfg = {});

// Evaluates a functional on an assemblage and recomputes its bound for the
// given strategy list.
SteeringFunctional evaluate_functional(std::vector<CMatrix> coefficients, const std::vector<Strategy>& strategies,
                                       const Assemblage& asm_);

// sum_{x,a} pi(x) |x><x| (x) |a><a| (x) rho_{a|x}, ordered X (x) A (x) B.
struct CqState {
  CMatrix state;
  std::vector<double> pi;
  int inputs = 0, outputs = 0, dim = 0;
};
CqState cq_state(const Assemblage& asm_, const std::vector<double>& pi);
// Broadcast CQ state with product input distribution, ordered
// Z (x) W = (X0 A0 B0) (x) (X1 A1 B1).
CMatrix cq_state_zw(const Assemblage& asm4, const std::vector<double>& pi0, const std::vector<double>& pi1);

struct AssemblageDivergenceReport {
  double value = 0.0;               // bits, max over inputs
  int argmax_input = 0;
  std::vector<double> per_input;    // S_Q(rho_AB(x) || sigma_AB(x))
};
AssemblageDivergenceReport assemblage_kl(const Assemblage& a, const Assemblage& b);

// Element-wise restriction to pair 0 (sum over a1, trace over B1) or pair
// 1; requires the result to be independent of the other pair's input.
Assemblage marginal_assemblage(const Assemblage& asm4, int pair, double tol = 1e-8);
bool is_broadcast_assemblage(const Assemblage& asm4, const Assemblage& asm2, double tol = 1e-8);

struct SteeringEntropyConfig {
  int iterations = 2000;
  std::uint64_t seed = 0;
  std::vector<double> temperatures{0.1, 0.03, 0.01, 3e-3, 1e-3, 3e-4};
};

struct SteeringEntropyResult {
  double upper_bound = 0.0;         // S_A(asm || witness)
  double lower_bound = 0.0;         // convexity certificate
  LhsModel witness;                 // model of the minimising free assemblage
  Assemblage witness_assemblage;
  int iterations = 0;
};

// Frank-Wolfe over the free set spanned by `strategies` (x) states.
SteeringEntropyResult relative_entropy_steering_ub(const Assemblage& asm_, const std::vector<Strategy>& strategies,
                                                   const SteeringEntropyConfig& cfg = {});
// Free set picked from the shape: NS wing strategies for broadcast-shaped
// assemblages, deterministic strategies otherwise.
SteeringEntropyResult relative_entropy_steering_ub(const Assemblage& asm_, const SteeringEntropyConfig& cfg = {});

// LOSR map between a bipartite steering scenario and the broadcast one:
//   rho_{a0a1|x0x1} = sum_{l,c,x,a} r(l) I_l(c,x|x0,x1) O(a0,a1|a,c) E_l(rho_{a|x}).
struct AssemblageMapShape {
  int inputs = 2, outputs = 2, dim = 2;   // source scenario
  AssemblageFactors target{};
  int messages = 1;                       // alphabet of c
};

class AssemblageLosrMap {
 public:
  // pre[l]: rows x0*r1+x1, cols c*inputs+x. post: rows a*messages+c, cols a0*s1+a1.
  AssemblageLosrMap(AssemblageMapShape shape, std::vector<double> lambda_weights, std::vector<Conditional> pre,
                    Conditional post, std::vector<KrausChannel> channels);

  const AssemblageMapShape& shape() const { return shape_; }
  int num_lambda() const { return static_cast<int>(r_.size()); }
  const std::vector<double>& lambda_weights() const { return r_; }
  const Conditional& pre(int l) const { return pre_[l]; }
  const Conditional& post() const { return post_; }
  const KrausChannel& channel(int l) const { return ch_[l]; }

 private:
  AssemblageMapShape shape_;
  std::vector<double> r_;
  std::vector<Conditional> pre_;
  Conditional post_;
  std::vector<KrausChannel> ch_;
};

Assemblage apply_losr_assemblage(const AssemblageLosrMap& m, const Assemblage& asm_);
AssemblageLosrMap random_assemblage_losr(std::uint64_t seed, const AssemblageMapShape& shape = {}, int num_lambda = 4);
// Per lambda each side routes one of its two sites through the source and
// answers the other from local data; images of unsteerable assemblages
// keep non-signalling A-wing responses.
AssemblageLosrMap random_routing_assemblage_losr(std::uint64_t seed, int num_lambda = 4);

struct MeasuredEntropyReport {
  double lhs = 0.0;     // S_Q(rho_ZW || sigma_ZW)
  double term1 = 0.0;   // S_Q(F(rho_Z) || F(sigma_Z))
  double term2 = 0.0;   // S_Q(rho_W || sum_k alpha_k sigma_W^k)
  bool holds = true;
};
// dims = {dim Z, dim W}; the POVM acts on Z.
MeasuredEntropyReport measured_entropy_check(const CMatrix& rho_zw, const CMatrix& sigma_zw, std::array<int, 2> dims, const Povm& povm_on_z);

// POVM on X (x) A (x) B: |x><x| (x) |a><a| (x) E_i.
Povm flagged_povm(int inputs, int outputs, const Povm& on_b);

struct LemmaTally {
  int checked = 0;
  int passed = 0;
  int skipped = 0;
  double worst = 0.0;   // largest residual seen (injectivity: smallest image distance)
};

struct CqLemmaReport {
  LemmaTally reduced_cq;
  LemmaTally post_measurement;
  LemmaTally convex_sum;
  LemmaTally injectivity;  // checked as the contrapositive
  bool all_passed() const;
};

struct CqLemmaConfig {
  int instances = 100;
  std::uint64_t seed = 1;
  FeasibilityConfig feasibility{};
};
CqLemmaReport verify_cq_lemmas(const CqLemmaConfig& cfg = {});

struct BroadcastSteeringReport {
  double ea_original_ub = 0.0;
  double ea_original_lb = 0.0;
  double ea_broadcast_ub = 0.0;
  double ea_broadcast_lb = 0.0;
  double chain_lhs = 0.0;       // S_Q(rho_ZW || sigma_ZW) at the broadcast witness
  double first_term = 0.0;      // S_Q(F(rho_Z) || F(sigma_Z))
  double second_term = 0.0;     // S_Q(rho_W || sum_k alpha_k sigma_W^k)
  bool measured_inequality_holds = false;
  bool is_broadcast = false;
  bool first_term_positive = false;   // > 1e-3
  bool broadcast_not_below = false;   // ea_broadcast_ub >= ea_original_ub - 1e-3
  FeasibilityResult steering;
};

// Product broadcast of a steerable assemblage and the quantities of the
// entropy-increase argument, evaluated at the optimiser witness.
BroadcastSteeringReport broadcast_steering_demo(const Assemblage& asm2, const SteeringEntropyConfig& cfg = {},
                                  const FeasibilityConfig& fcfg = {});
// Same, for a caller-supplied candidate broadcast (rejected when it is not
// a broadcast of asm2).
BroadcastSteeringReport broadcast_steering_demo(const Assemblage& asm2, const Assemblage& candidate,
                                  const SteeringEntropyConfig& cfg = {}, const FeasibilityConfig& fcfg = {});

// Random assemblages used by the verifiers.
Assemblage random_assemblage(Rng& rng, int inputs, int outputs, int dim);
Assemblage random_lhs_assemblage(Rng& rng, int inputs, int outputs, int dim, int terms = 4);
Assemblage random_urns_assemblage(Rng& rng, int terms = 4);

}  // namespace boxcast
