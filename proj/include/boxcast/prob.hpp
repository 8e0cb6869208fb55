#pragma once

#include <span>
#include <utility>
#include <vector>

namespace boxcast {

inline constexpr double kSimplexTol = 1e-12;
inline constexpr double kRenormTol = 1e-9;

// Probability vector on a finite alphabet. Validated on construction:
// small drift (< 1e-9) is renormalized away, anything larger throws.
class ProbVector {
 public:
  ProbVector() = default;
  explicit ProbVector(std::vector<double> weights);

  static ProbVector uniform(std::size_t n);
  static ProbVector point(std::size_t n, std::size_t k);

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  std::span<const double> weights() const { return w_; }
  const std::vector<double>& vec() const { return w_; }

 private:
  std::vector<double> w_;
};

// Joint distribution over a two-factor alphabet, row-major (a major, b minor).
class JointTable {
 public:
  JointTable(std::size_t na, std::size_t nb, std::vector<double> weights);

  std::size_t rows() const { return na_; }
  std::size_t cols() const { return nb_; }
  double operator()(std::size_t a, std::size_t b) const { return w_[a * nb_ + b]; }
  std::span<const double> flat() const { return w_; }

  ProbVector marginal_a() const;
  // p(b|a); uniform when p(a) = 0.
  ProbVector conditional_b(std::size_t a) const;

 private:
  std::size_t na_, nb_;
  std::vector<double> w_;
};

// Validates and renormalizes a raw weight vector. Throws ValidationError.
std::vector<double> validate_simplex(std::vector<double> w);

// Sum p log2(p/q) with 0 log 0 = 0. Returns +inf on absolute-continuity failure.
double kl_divergence(const ProbVector& p, const ProbVector& q);

// Same formula on raw spans; no validation. Caller guarantees equal length.
double kl_bits(std::span<const double> p, std::span<const double> q);

struct ChainSplit {
  double marginal_kl;
  double conditional_kl_avg;
};

ChainSplit chain_rule_split(const JointTable& p, const JointTable& q);

}  // namespace boxcast
