#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "boxcast/behavior.hpp"
#include "boxcast/polytope.hpp"

namespace boxcast {

// Family of distributions over `cols` outcomes, one per conditioning value
// (row). Every row sums to 1 within kNormTol.
class Conditional {
 public:
  Conditional() = default;
  Conditional(int rows, int cols, std::vector<double> p);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double operator()(int r, int c) const { return p_[static_cast<std::size_t>(r) * cols_ + c]; }
  const std::vector<double>& data() const { return p_; }

  static Conditional deterministic(int rows, int cols, const std::vector<int>& choice);

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<double> p_;
};

// One wing's local processing for a fixed lambda.
//   pre:  x  | xs             rows = joint wing setting of the output side
//   post: as | xs, x, a       rows = (xs * inputs + x) * outputs + a
struct WingProcessing {
  Conditional pre;
  Conditional post;
};

inline constexpr int kMaxLambda = 64;

// LOSR transformation in shared-randomness canonical form: a finite lambda
// with weights, and per lambda independent pre/post processing on each wing.
// Maps a bipartite box to a box on `output`.
class LosrMap {
 public:
  LosrMap(Scenario input, Scenario output, std::vector<double> lambda_weights, std::vector<WingProcessing> alice,
          std::vector<WingProcessing> bob);

  const Scenario& input() const { return in_; }
  const Scenario& output() const { return out_; }
  int num_lambda() const { return static_cast<int>(r_.size()); }
  const std::vector<double>& lambda_weights() const { return r_; }
  const WingProcessing& alice(int l) const { return alice_[l]; }
  const WingProcessing& bob(int l) const { return bob_[l]; }

 private:
  Scenario in_, out_;
  std::vector<double> r_;
  std::vector<WingProcessing> alice_, bob_;
};

Behavior apply(const LosrMap& m, const Behavior& p);

struct LosrShape {
  Scenario input = Scenario::bipartite();
  Scenario output = Scenario::broadcast();
  int num_lambda = 4;
  double alpha = 1.0;  // Dirichlet concentration of every row
};

// Every table row Dirichlet sampled. Deterministic per seed.
LosrMap random_losr(std::uint64_t seed, const LosrShape& shape = {});

// Bipartite (2,2,2) to broadcast maps in which, per lambda, each wing feeds
// one of its two sites through the input box and answers for the other site
// from local randomness alone. Wing boxes stay non-signalling between their
// sites, so LR_ns is preserved.
LosrMap random_routing_losr(std::uint64_t seed, int num_lambda = 4);

// x = x0, y = y0, and the box outputs copied to every output site.
LosrMap copy_wiring(const Scenario& input, const Scenario& output);

// Ignores the input box and outputs alice_wing (x) bob_wing, both given as
// conditionals over the joint wing setting.
LosrMap constant_map(const Scenario& input, const Scenario& output, const Conditional& alice_wing,
                     const Conditional& bob_wing);

// Conditional view of a behavior's table (rows = settings).
Conditional as_conditional(const Behavior& b);

// Joint per-lambda tables before factorisation:
//   pre:  (x, y)   | (xs, ys)                   rows xs * |ys| + ys, cols x * |y| + y
//   post: (as, bs) | (xs, x, a), (ys, y, b)     rows alice_row * bob_rows + bob_row,
//                                               cols as * |bs| + bs
struct JointWiring {
  Scenario input = Scenario::bipartite();
  Scenario output = Scenario::broadcast();
  std::vector<double> lambda_weights;
  std::vector<Conditional> pre;
  std::vector<Conditional> post;
};

// Splits each lambda's tables into wing factors; a table that does not
// factorise within 1e-10 couples the wings and is rejected (ValidationError).
LosrMap from_joint_wiring(const JointWiring& w);

struct PreservationReport {
  bool preserves = true;
  int vertices_checked = 0;
  int offending_vertex = -1;   // first input vertex whose image is outside
  double worst_margin = 0.0;   // largest separation margin among images found outside
};

// Images of every input-side vertex against the output-side membership
// solver; linearity of apply makes this decide preservation of the hull.
PreservationReport preserves_lrns(const LosrMap& m, const VertexCatalogue& input_vertices,
                                  const MembershipSolver& output_set);

struct ContractivityReport {
  double image_kl = 0.0;
  double original_kl = 0.0;
  bool holds = true;
};

ContractivityReport contractivity_check(const LosrMap& m, const Behavior& p, const Behavior& q, double tol = 1e-9);

}  // namespace boxcast
