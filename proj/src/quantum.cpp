#include "boxcast/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "boxcast/errors.hpp"

namespace boxcast {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) throw DimensionError(what);
}

CMatrix symmetrise(const CMatrix& m) { return (m + m.adjoint()) / 2.0; }

double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

HermitianMatrix::HermitianMatrix(CMatrix m) {
  require_square(m, "hermitian matrix must be square and non-empty");
  if (!m.allFinite()) throw ValidationError("matrix has non-finite entries");
  if (max_abs(m - m.adjoint()) > kHermitianTol * std::max(1.0, max_abs(m))) throw ValidationError("matrix is not Hermitian");
  m_ = symmetrise(m);
}

DensityMatrix::DensityMatrix(CMatrix m) {
  m_ = HermitianMatrix(std::move(m)).matrix();
  if (std::abs(m_.trace().real() - 1.0) > 1e-10) throw ValidationError("density matrix trace differs from 1");
  if (eig_hermitian(HermitianMatrix(m_)).values.minCoeff() < -1e-10)
    throw ValidationError("density matrix has a negative eigenvalue");
}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd& psi) {
  const double n = psi.norm();
  if (!(n > 0)) throw ValidationError("zero state vector");
  Eigen::VectorXcd v = psi / n;
  return DensityMatrix(v * v.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int d) {
  return DensityMatrix(CMatrix::Identity(d, d) / static_cast<double>(d));
}

Povm::Povm(std::vector<CMatrix> effects) : e_(std::move(effects)) {
  if (e_.empty()) throw ValidationError("POVM needs at least one effect");
  const int d = static_cast<int>(e_.front().rows());
  CMatrix sum = CMatrix::Zero(d, d);
  for (CMatrix& e : e_) {
    if (e.rows() != d || e.cols() != d) throw DimensionError("POVM effects differ in dimension");
    e = HermitianMatrix(e).matrix();
    if (eig_hermitian(HermitianMatrix(e)).values.minCoeff() < -1e-10) throw ValidationError("POVM effect is not PSD");
    sum += e;
  }
  if (max_abs(sum - CMatrix::Identity(d, d)) > 1e-9) throw ValidationError("POVM effects do not sum to identity");
}

Povm Povm::projective(const CMatrix& u) {
  std::vector<CMatrix> e;
  for (int k = 0; k < u.cols(); ++k) e.push_back(u.col(k) * u.col(k).adjoint());
  return Povm(std::move(e));
}

Povm Povm::computational(int d) { return projective(CMatrix::Identity(d, d)); }

KrausChannel::KrausChannel(std::vector<CMatrix> ops) : k_(std::move(ops)) {
  if (k_.empty()) throw ValidationError("channel needs at least one Kraus operator");
  const auto r = k_.front().rows(), c = k_.front().cols();
  CMatrix sum = CMatrix::Zero(c, c);
  for (const CMatrix& k : k_) {
    if (k.rows() != r || k.cols() != c) throw DimensionError("Kraus operators differ in shape");
    sum += k.adjoint() * k;
  }
  if (max_abs(sum - CMatrix::Identity(c, c)) > 1e-9) throw ValidationError("Kraus operators are not trace preserving");
}

KrausChannel KrausChannel::identity(int d) { return KrausChannel({CMatrix::Identity(d, d)}); }

KrausChannel KrausChannel::depolarizing(int d) {
  std::vector<CMatrix> ops;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      CMatrix k = CMatrix::Zero(d, d);
      k(i, j) = 1.0 / std::sqrt(static_cast<double>(d));
      ops.push_back(k);
    }
  return KrausChannel(std::move(ops));
}

EigenSystem eig_hermitian(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h.matrix());
  if (es.info() != Eigen::Success) throw NumericError("Hermitian eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

double quantum_relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return quantum_relative_entropy(rho.matrix(), sigma.matrix());
}

double quantum_relative_entropy(const CMatrix& rho, const CMatrix& sigma) {
  if (rho.rows() != sigma.rows()) throw DimensionError("relative entropy: dimensions differ");
  const EigenSystem r = eig_hermitian(HermitianMatrix(rho));
  const EigenSystem s = eig_hermitian(HermitianMatrix(sigma));
  const int d = static_cast<int>(rho.rows());
  // overlap(i, j) = |<r_i|s_j>|^2
  const Eigen::MatrixXd overlap = (r.vectors.adjoint() * s.vectors).cwiseAbs2();
  for (int j = 0; j < d; ++j) {
    if (s.values(j) > kSupportCutoff) continue;
    double mass = 0.0;  // tr(rho P_j) on the kernel of sigma
    for (int i = 0; i < d; ++i) mass += std::max(r.values(i), 0.0) * overlap(i, j);
    if (mass > kSupportCutoff) return std::numeric_limits<double>::infinity();
  }
  double ent = 0.0, cross = 0.0;
  for (int i = 0; i < d; ++i) {
    const double li = r.values(i);
    if (li <= kSupportCutoff) continue;
    ent += li * std::log(li);
    for (int j = 0; j < d; ++j)
      if (s.values(j) > kSupportCutoff) cross += li * overlap(i, j) * std::log(s.values(j));
  }
  return std::max(0.0, (ent - cross) / kLn2);
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMatrix partial_trace(const CMatrix& m, const std::vector<int>& dims, int which) {
  if (which < 0 || which >= static_cast<int>(dims.size())) throw DimensionError("partial trace: no such subsystem");
  long total = 1;
  for (int d : dims) {
    if (d <= 0) throw DimensionError("partial trace: non-positive dimension");
    total *= d;
  }
  if (m.rows() != total || m.cols() != total) throw DimensionError("partial trace: matrix does not match dims");
  long before = 1, after = 1;
  for (int k = 0; k < which; ++k) before *= dims[k];
  for (std::size_t k = which + 1; k < dims.size(); ++k) after *= dims[k];
  const long dw = dims[which];
  const long keep = before * after;
  CMatrix out = CMatrix::Zero(keep, keep);
  for (long i1 = 0; i1 < before; ++i1)
    for (long i2 = 0; i2 < after; ++i2)
      for (long j1 = 0; j1 < before; ++j1)
        for (long j2 = 0; j2 < after; ++j2) {
          cplx acc = 0.0;
          for (long k = 0; k < dw; ++k) acc += m((i1 * dw + k) * after + i2, (j1 * dw + k) * after + j2);
          out(i1 * after + i2, j1 * after + j2) = acc;
        }
  return out;
}

CMatrix measurement_map(const Povm& povm, const CMatrix& x) {
  if (x.rows() != povm.dim() || x.cols() != povm.dim()) throw DimensionError("measurement map: dimension mismatch");
  CMatrix out = CMatrix::Zero(povm.size(), povm.size());
  for (int i = 0; i < povm.size(); ++i) out(i, i) = (povm[i] * x).trace();
  return out;
}

CMatrix pauli(int k) {
  CMatrix p(2, 2);
  const cplx I(0.0, 1.0);
  switch (k) {
    case 0: p << 1, 0, 0, 1; break;
    case 1: p << 0, 1, 1, 0; break;
    case 2: p << 0, -I, I, 0; break;
    case 3: p << 1, 0, 0, -1; break;
    default: throw DimensionError("pauli index must be 0..3");
  }
  return p;
}

Povm sic_povm_qubit() {
  // Bloch vectors of a regular tetrahedron
  const double s = 1.0 / std::sqrt(3.0);
  const double n[4][3] = {{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
  std::vector<CMatrix> e;
  for (const auto& v : n) e.push_back((pauli(0) + v[0] * pauli(1) + v[1] * pauli(2) + v[2] * pauli(3)) / 4.0);
  return Povm(std::move(e));
}

Povm qubit_measurement(double nx, double ny, double nz) {
  const double len = std::sqrt(nx * nx + ny * ny + nz * nz);
  if (!(len > 0)) throw ValidationError("measurement direction is zero");
  const CMatrix proj = (nx * pauli(1) + ny * pauli(2) + nz * pauli(3)) / len;
  return Povm({(pauli(0) + proj) / 2.0, (pauli(0) - proj) / 2.0});
}

Behavior quantum_behavior(const DensityMatrix& state, const std::vector<Povm>& alice, const std::vector<Povm>& bob) {
  if (alice.empty() || bob.empty()) throw DimensionError("each wing needs at least one measurement");
  const int da = alice.front().dim(), db = bob.front().dim();
  const int oa = alice.front().size(), ob = bob.front().size();
  for (const Povm& p : alice)
    if (p.dim() != da || p.size() != oa) throw DimensionError("Alice's measurements differ in shape");
  for (const Povm& p : bob)
    if (p.dim() != db || p.size() != ob) throw DimensionError("Bob's measurements differ in shape");
  if (state.dim() != da * db) throw DimensionError("state dimension does not match the measurements");
  const int mx = static_cast<int>(alice.size()), my = static_cast<int>(bob.size());
  Scenario sc = Scenario::bipartite({mx, oa}, {my, ob});
  std::vector<double> t(sc.table_size());
  for (int x = 0; x < mx; ++x)
    for (int y = 0; y < my; ++y)
      for (int a = 0; a < oa; ++a)
        for (int b = 0; b < ob; ++b)
          t[static_cast<std::size_t>(x * my + y) * (oa * ob) + a * ob + b] =
              std::max(0.0, (kron(alice[x][a], bob[y][b]) * state.matrix()).trace().real());
  return Behavior(sc, std::move(t));
}

CMatrix apply_channel(const KrausChannel& ch, const CMatrix& rho) {
  if (rho.rows() != ch.input_dim() || rho.cols() != ch.input_dim()) throw DimensionError("channel input dimension");
  CMatrix out = CMatrix::Zero(ch.output_dim(), ch.output_dim());
  for (const CMatrix& k : ch.ops()) out += k * rho * k.adjoint();
  return symmetrise(out);
}

namespace {

CMatrix ginibre(Rng& rng, int r, int c) {
  CMatrix g(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) g(i, j) = cplx(rng.normal(), rng.normal());
  return g;
}

}  // namespace

KrausChannel random_cptp(std::uint64_t seed, int d_in, int d_out, int num_kraus) {
  if (d_in <= 0 || d_out <= 0) throw DimensionError("channel dimensions must be positive");
  if (num_kraus <= 0) num_kraus = d_in * d_out;
  Rng rng(seed);
  // isometry V : C^d_in -> C^(num_kraus * d_out)
  Eigen::HouseholderQR<CMatrix> qr(ginibre(rng, num_kraus * d_out, d_in));
  if (num_kraus * d_out < d_in) throw DimensionError("too few Kraus operators for an isometry");
  CMatrix v = qr.householderQ() * CMatrix::Identity(num_kraus * d_out, d_in);
  std::vector<CMatrix> ops;
  for (int k = 0; k < num_kraus; ++k) ops.push_back(v.block(k * d_out, 0, d_out, d_in));
  return KrausChannel(std::move(ops));
}

DensityMatrix random_density(Rng& rng, int d, int rank) {
  if (rank <= 0) rank = d;
  CMatrix g = ginibre(rng, d, rank);
  CMatrix m = g * g.adjoint();
  m /= m.trace().real();
  return DensityMatrix(symmetrise(m));
}

Eigen::VectorXcd random_pure(Rng& rng, int d) {
  Eigen::VectorXcd v = ginibre(rng, d, 1).col(0);
  return v / v.norm();
}

CMatrix random_unitary(Rng& rng, int d) {
  Eigen::HouseholderQR<CMatrix> qr(ginibre(rng, d, d));
  CMatrix q = qr.householderQ();
  // fix column phases so the distribution is Haar
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < d; ++k) q.col(k) *= std::polar(1.0, std::arg(r(k, k)));
  return q;
}

}  // namespace boxcast
