#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "boxcast/prob.hpp"

namespace boxcast {

struct Site {
  int inputs = 2;
  int outputs = 2;
  bool operator==(const Site&) const = default;
};

// Sites split into two wings. Alice's sites come first: grouping must be
// {{0..k-1},{k..N-1}}. Joint indices are mixed radix, lowest site most
// significant.
class Scenario {
 public:
  Scenario(std::vector<Site> sites, std::vector<std::vector<int>> grouping);

  static Scenario bipartite(Site a = {}, Site b = {});
  // Four sites A0 A1 B0 B1 with grouping {{0,1},{2,3}}.
  static Scenario broadcast(Site a = {}, Site b = {});

  const std::vector<Site>& sites() const { return sites_; }
  const std::vector<std::vector<int>>& grouping() const { return grouping_; }
  int num_sites() const { return static_cast<int>(sites_.size()); }
  int alice_sites() const { return static_cast<int>(grouping_[0].size()); }

  int alice_inputs() const { return ma_; }
  int bob_inputs() const { return mb_; }
  int alice_outputs() const { return oa_; }
  int bob_outputs() const { return ob_; }
  int num_settings() const { return ma_ * mb_; }
  int num_outcomes() const { return oa_ * ob_; }
  std::size_t table_size() const {
    return static_cast<std::size_t>(num_settings()) * static_cast<std::size_t>(num_outcomes());
  }

  // Per-site digits of a joint setting / outcome index.
  std::vector<int> setting_digits(int s) const;
  std::vector<int> outcome_digits(int o) const;
  int setting_index(std::span<const int> digits) const;
  int outcome_index(std::span<const int> digits) const;

  // Scenario restricted to a subset of sites (kept in site order). Wing
  // membership is inherited; both wings must stay non-empty.
  Scenario restrict(std::span<const int> keep) const;

  bool is_broadcast_shape() const;

  bool operator==(const Scenario& o) const {
    return sites_ == o.sites_ && grouping_ == o.grouping_;
  }

 private:
  std::vector<Site> sites_;
  std::vector<std::vector<int>> grouping_;
  int ma_ = 1, mb_ = 1, oa_ = 1, ob_ = 1;
};

inline constexpr double kNormTol = 1e-10;
inline constexpr double kMarginalTol = 1e-9;
inline constexpr double kConditionGuard = 1e-12;

// Conditional table P(outcome|setting). Storage is setting-major:
// flat = setting * num_outcomes + outcome, which is the fixed index order
// [x...][y...][a...][b...].
class Behavior {
 public:
  Behavior(Scenario sc, std::vector<double> table);

  const Scenario& scenario() const { return sc_; }
  const std::vector<double>& table() const { return t_; }
  int num_settings() const { return sc_.num_settings(); }
  int num_outcomes() const { return sc_.num_outcomes(); }

  double operator()(int setting, int outcome) const {
    return t_[static_cast<std::size_t>(setting) * num_outcomes() + outcome];
  }
  // Wing-level access: joint inputs X, Y and joint outputs A, B.
  double at(int x, int y, int a, int b) const {
    return (*this)(x * sc_.bob_inputs() + y, a * sc_.bob_outputs() + b);
  }
  std::span<const double> row(int setting) const {
    return std::span<const double>(t_).subspan(static_cast<std::size_t>(setting) * num_outcomes(),
                                               num_outcomes());
  }

 private:
  Scenario sc_;
  std::vector<double> t_;
};

struct NsReport {
  bool ok;
  double max_violation;
};

// Non-signalling across the bipartition {cell, complement}. An empty cell
// means Alice's wing.
NsReport is_nonsignalling(const Behavior& b, std::span<const int> cell = {});

// Marginal on a subset of sites at the reference setting 0 of the others.
// Throws SignallingError when it depends on the discarded inputs.
Behavior marginal(const Behavior& b, std::span<const int> keep, double tol = kMarginalTol);

Behavior marginal_pair(const Behavior& b4, int pair);
bool is_broadcast_of(const Behavior& b4, const Behavior& b2);

// Distribution over (a1,b1) given pair-0 outcomes, index a1 * o(B1) + b1.
ProbVector condition_on_pair0(const Behavior& b4, int a0, int b0, int x0, int y0, int x1, int y1);

Behavior pr_box();
Behavior uniform_box(const Scenario& sc);
// Single-site deterministic responses f_i(x_i), one per site.
Behavior deterministic_box(const Scenario& sc, std::span<const std::vector<int>> responses);
// P on (A0,B0), Q on (A1,B1); output sites ordered A0 A1 B0 B1.
Behavior product(const Behavior& p, const Behavior& q);
// Alice-wing box qa (sites of wing A as a bipartite box) times Bob-wing box qb.
Behavior wing_product(const Behavior& qa, const Behavior& qb);
Behavior mix(std::span<const Behavior> parts, std::span<const double> weights);
double max_abs_diff(const Behavior& p, const Behavior& q);

// Rescales each setting row to sum 1 (absorbs rounding before LPs).
Behavior normalized_per_setting(const Behavior& b);

}  // namespace boxcast
