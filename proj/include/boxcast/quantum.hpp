#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "boxcast/behavior.hpp"
#include "boxcast/random.hpp"

namespace boxcast {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kSupportCutoff = 1e-10;

// Square matrix equal to its adjoint within kHermitianTol (then symmetrised).
class HermitianMatrix {
 public:
  explicit HermitianMatrix(CMatrix m);
  int dim() const { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }

 private:
  CMatrix m_;
};

// Unit trace within 1e-10, eigenvalues >= -1e-10.
class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix m);
  int dim() const { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }

  static DensityMatrix pure(const Eigen::VectorXcd& psi);
  static DensityMatrix maximally_mixed(int d);

 private:
  CMatrix m_;
};

// PSD effects (within 1e-10) summing to the identity (within 1e-9).
class Povm {
 public:
  explicit Povm(std::vector<CMatrix> effects);
  int dim() const { return static_cast<int>(e_.front().rows()); }
  int size() const { return static_cast<int>(e_.size()); }
  const CMatrix& operator[](int i) const { return e_[i]; }
  const std::vector<CMatrix>& effects() const { return e_; }

  static Povm projective(const CMatrix& unitary_columns);
  static Povm computational(int d);

 private:
  std::vector<CMatrix> e_;
};

// Kraus operators d_out x d_in with sum K^dag K = I within 1e-9.
class KrausChannel {
 public:
  explicit KrausChannel(std::vector<CMatrix> ops);
  int input_dim() const { return static_cast<int>(k_.front().cols()); }
  int output_dim() const { return static_cast<int>(k_.front().rows()); }
  const std::vector<CMatrix>& ops() const { return k_; }

  static KrausChannel identity(int d);
  // rho -> tr(rho) I/d
  static KrausChannel depolarizing(int d);

 private:
  std::vector<CMatrix> k_;
};

struct EigenSystem {
  RVector values;    // ascending
  CMatrix vectors;   // columns, orthonormal
};

EigenSystem eig_hermitian(const HermitianMatrix& h);

// Bits. +inf when the support of rho is not contained in that of sigma.
double quantum_relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);
double quantum_relative_entropy(const CMatrix& rho, const CMatrix& sigma);

CMatrix kron(const CMatrix& a, const CMatrix& b);
// Traces out subsystem `which` of a tensor product with the given dims.
CMatrix partial_trace(const CMatrix& m, const std::vector<int>& dims, int which);

// sum_i tr(F_i X) |i><i|
CMatrix measurement_map(const Povm& povm, const CMatrix& x);

// Tetrahedral SIC-POVM, effects |psi_k><psi_k| / 2.
Povm sic_povm_qubit();

CMatrix pauli(int k);  // 0 = I, 1 = X, 2 = Y, 3 = Z
// Projective qubit measurement along the Bloch direction n.
Povm qubit_measurement(double nx, double ny, double nz);

// P(ab|xy) = tr(A_a^x (x) B_b^y rho). All of a wing's POVMs need the same
// number of outcomes.
Behavior quantum_behavior(const DensityMatrix& state, const std::vector<Povm>& alice, const std::vector<Povm>& bob);

CMatrix apply_channel(const KrausChannel& ch, const CMatrix& rho);
// Stinespring isometry from a complex Gaussian matrix, orthonormalised.
KrausChannel random_cptp(std::uint64_t seed, int d_in, int d_out, int num_kraus = 0);

DensityMatrix random_density(Rng& rng, int d, int rank = 0);
Eigen::VectorXcd random_pure(Rng& rng, int d);
CMatrix random_unitary(Rng& rng, int d);

}  // namespace boxcast
