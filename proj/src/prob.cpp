#include "boxcast/prob.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "boxcast/errors.hpp"

namespace boxcast {

std::vector<double> validate_simplex(std::vector<double> w) {
  if (w.empty()) throw ValidationError("empty probability vector");
  double total = 0.0;
  for (double& v : w) {
    if (!std::isfinite(v)) throw ValidationError("non-finite probability");
    if (v < 0.0) {
      if (v < -kSimplexTol) throw ValidationError("negative probability " + std::to_string(v));
      v = 0.0;
    }
    total += v;
  }
  double drift = std::abs(total - 1.0);
  if (drift > kRenormTol)
    throw ValidationError("probabilities sum to " + std::to_string(total));
  if (drift > kSimplexTol)
    for (double& v : w) v /= total;
  return w;
}

ProbVector::ProbVector(std::vector<double> weights) : w_(validate_simplex(std::move(weights))) {}

ProbVector ProbVector::uniform(std::size_t n) {
  return ProbVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ProbVector ProbVector::point(std::size_t n, std::size_t k) {
  std::vector<double> w(n, 0.0);
  w.at(k) = 1.0;
  return ProbVector(std::move(w));
}

JointTable::JointTable(std::size_t na, std::size_t nb, std::vector<double> weights)
    : na_(na), nb_(nb) {
  if (na == 0 || nb == 0 || weights.size() != na * nb)
    throw DimensionError("joint table shape does not match weight count");
  w_ = validate_simplex(std::move(weights));
}

ProbVector JointTable::marginal_a() const {
  std::vector<double> m(na_, 0.0);
  for (std::size_t a = 0; a < na_; ++a)
    for (std::size_t b = 0; b < nb_; ++b) m[a] += w_[a * nb_ + b];
  return ProbVector(std::move(m));
}

ProbVector JointTable::conditional_b(std::size_t a) const {
  double pa = 0.0;
  for (std::size_t b = 0; b < nb_; ++b) pa += w_[a * nb_ + b];
  if (pa <= 0.0) return ProbVector::uniform(nb_);
  std::vector<double> c(nb_);
  for (std::size_t b = 0; b < nb_; ++b) c[b] = w_[a * nb_ + b] / pa;
  return ProbVector(std::move(c));
}

double kl_bits(std::span<const double> p, std::span<const double> q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    s += p[i] * std::log2(p[i] / q[i]);
  }
  // Rounding can leave tiny negatives when p == q.
  return s < 0.0 ? 0.0 : s;
}

double kl_divergence(const ProbVector& p, const ProbVector& q) {
  if (p.size() != q.size()) throw DimensionError("kl_divergence: length mismatch");
  return kl_bits(p.weights(), q.weights());
}

ChainSplit chain_rule_split(const JointTable& p, const JointTable& q) {
  if (p.rows() != q.rows() || p.cols() != q.cols())
    throw DimensionError("chain_rule_split: shape mismatch");
  ProbVector pa = p.marginal_a();
  ChainSplit out{kl_divergence(pa, q.marginal_a()), 0.0};
  for (std::size_t a = 0; a < p.rows(); ++a) {
    if (pa[a] <= 0.0) continue;
    out.conditional_kl_avg += pa[a] * kl_divergence(p.conditional_b(a), q.conditional_b(a));
  }
  return out;
}

}  // namespace boxcast
