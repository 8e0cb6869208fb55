#include "boxcast/assemblage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "boxcast/errors.hpp"
#include "boxcast/polytope.hpp"

namespace boxcast {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr std::size_t kMaxStrategies = 4096;

CMatrix herm(const CMatrix& m) { return (m + m.adjoint()) / 2.0; }

double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

struct Eig {
  RVector values;
  CMatrix vectors;
};

Eig eig(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  if (es.info() != Eigen::Success) throw NumericError("Hermitian eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

double min_eigenvalue(const CMatrix& m) { return eig(herm(m)).values(0); }

CMatrix psd_part(const CMatrix& m) {
  Eig e = eig(herm(m));
  RVector v = e.values.cwiseMax(0.0);
  return e.vectors * v.asDiagonal() * e.vectors.adjoint();
}

CMatrix basis_projector(int n, int k) {
  CMatrix p = CMatrix::Zero(n, n);
  p(k, k) = 1.0;
  return p;
}

// tr rho (log rho - log sigma) in nats for unnormalised PSD blocks; terms of
// a conditional family can be negative individually.
double block_divergence(const CMatrix& rho, const CMatrix& sigma) {
  const Eig r = eig(herm(rho)), s = eig(herm(sigma));
  const Eigen::MatrixXd overlap = (r.vectors.adjoint() * s.vectors).cwiseAbs2();
  const int d = static_cast<int>(rho.rows());
  double out = 0.0;
  for (int j = 0; j < d; ++j) {
    double mass = 0.0;
    for (int i = 0; i < d; ++i) mass += std::max(r.values(i), 0.0) * overlap(i, j);
    if (s.values(j) <= kSupportCutoff) {
      if (mass > kSupportCutoff) return std::numeric_limits<double>::infinity();
      continue;
    }
    out -= mass * std::log(s.values(j));
  }
  for (int i = 0; i < d; ++i)
    if (r.values(i) > kSupportCutoff) out += r.values(i) * std::log(r.values(i));
  return out;
}

void require_strategies(const std::vector<Strategy>& st, int r, int s) {
  if (st.empty()) throw DimensionError("strategy list is empty");
  for (const Strategy& q : st)
    if (static_cast<int>(q.size()) != r * s) throw DimensionError("strategy does not match the assemblage shape");
}

}  // namespace

Assemblage::Assemblage(int inputs, int outputs, std::vector<CMatrix> elements, std::optional<AssemblageFactors> factors)
    : r_(inputs), s_(outputs), d_(0), el_(std::move(elements)), factors_(factors) {
  if (r_ <= 0 || s_ <= 0) throw DimensionError("assemblage needs positive input and output counts");
  if (el_.size() != static_cast<std::size_t>(r_) * s_) throw DimensionError("assemblage needs inputs * outputs elements");
  d_ = static_cast<int>(el_.front().rows());
  if (d_ == 0) throw DimensionError("assemblage elements are empty");
  for (CMatrix& e : el_) {
    if (e.rows() != d_ || e.cols() != d_) throw DimensionError("assemblage elements must share one square shape");
    if (!e.allFinite()) throw ValidationError("assemblage element has non-finite entries");
    if (max_abs(e - e.adjoint()) > 1e-10) throw ValidationError("assemblage element is not Hermitian");
    e = herm(e);
    if (min_eigenvalue(e) < -1e-10) throw ValidationError("assemblage element is not positive semidefinite");
  }
  if (factors_) {
    const AssemblageFactors& f = *factors_;
    if (f.r0 * f.r1 != r_ || f.s0 * f.s1 != s_ || f.d0 * f.d1 != d_)
      throw DimensionError("assemblage factors do not match its shape");
  }
  const CMatrix ref = reduced_state();
  if (std::abs(ref.trace().real() - 1.0) > 1e-9) throw ValidationError("assemblage is not normalised");
  for (int x = 1; x < r_; ++x) {
    CMatrix sum = CMatrix::Zero(d_, d_);
    for (int a = 0; a < s_; ++a) sum += (*this)(a, x);
    if (std::abs(sum.trace().real() - 1.0) > 1e-9) throw ValidationError("assemblage is not normalised");
    if (max_abs(sum - ref) > 1e-9) throw SignallingError("assemblage reduced state depends on the input");
  }
}

CMatrix Assemblage::reduced_state() const {
  CMatrix sum = CMatrix::Zero(d_, d_);
  for (int a = 0; a < s_; ++a) sum += (*this)(a, 0);
  return sum;
}

double max_abs_diff(const Assemblage& a, const Assemblage& b) {
  if (a.inputs() != b.inputs() || a.outputs() != b.outputs() || a.dim() != b.dim())
    throw DimensionError("assemblage shapes differ");
  double m = 0.0;
  for (std::size_t k = 0; k < a.elements().size(); ++k) m = std::max(m, max_abs(a.elements()[k] - b.elements()[k]));
  return m;
}

Assemblage steering_from_state(const DensityMatrix& rho_ab, const std::vector<Povm>& alice) {
  if (alice.empty()) throw DimensionError("at least one measurement is needed");
  const int da = alice.front().dim(), s = alice.front().size();
  if (rho_ab.dim() % da != 0) throw DimensionError("state dimension is not a multiple of Alice's");
  const int db = rho_ab.dim() / da;
  std::vector<CMatrix> el;
  for (const Povm& m : alice) {
    if (m.dim() != da || m.size() != s) throw DimensionError("Alice's measurements must share dimension and outcomes");
    for (int a = 0; a < s; ++a)
      el.push_back(partial_trace(kron(m[a], CMatrix::Identity(db, db)) * rho_ab.matrix(), {da, db}, 0));
  }
  return Assemblage(static_cast<int>(alice.size()), s, std::move(el));
}

Assemblage werner_assemblage(double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("visibility must lie in [0, 1]");
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
  psi(1) = 1.0 / std::sqrt(2.0);
  psi(2) = -1.0 / std::sqrt(2.0);
  CMatrix rho = v * psi * psi.adjoint() + (1.0 - v) / 4.0 * CMatrix::Identity(4, 4);
  return steering_from_state(DensityMatrix(rho), {qubit_measurement(0, 0, 1), qubit_measurement(1, 0, 0)});
}

Assemblage product_assemblage(const Assemblage& p, const Assemblage& q) {
  AssemblageFactors f{p.inputs(), q.inputs(), p.outputs(), q.outputs(), p.dim(), q.dim()};
  std::vector<CMatrix> el;
  for (int x0 = 0; x0 < f.r0; ++x0)
    for (int x1 = 0; x1 < f.r1; ++x1)
      for (int a0 = 0; a0 < f.s0; ++a0)
        for (int a1 = 0; a1 < f.s1; ++a1) el.push_back(kron(p(a0, x0), q(a1, x1)));
  return Assemblage(f.r0 * f.r1, f.s0 * f.s1, std::move(el), f);
}

std::vector<Strategy> deterministic_strategies(int r, int s) {
  if (r <= 0 || s <= 0) throw DimensionError("strategies need positive shape");
  std::size_t n = 1;
  for (int x = 0; x < r; ++x) {
    n *= static_cast<std::size_t>(s);
    if (n > kMaxStrategies) throw CapacityError("too many deterministic strategies");
  }
  std::vector<Strategy> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Strategy q(static_cast<std::size_t>(r) * s, 0.0);
    std::size_t rest = k;
    for (int x = r - 1; x >= 0; --x) {
      q[static_cast<std::size_t>(x) * s + rest % s] = 1.0;
      rest /= s;
    }
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<Strategy> ns_wing_strategies() {
  const VertexCatalogue cat = ns_vertices_222();
  std::vector<Strategy> out;
  for (const Behavior& v : cat.vertices) {
    Strategy q(16);
    for (int x = 0; x < 4; ++x)
      for (int a = 0; a < 4; ++a) q[x * 4 + a] = v(x, a);
    out.push_back(std::move(q));
  }
  return out;
}

Assemblage assemble(int r, int s, const LhsModel& m, std::optional<AssemblageFactors> f) {
  require_strategies(m.strategies, r, s);
  if (m.states.size() != m.strategies.size()) throw DimensionError("one state per strategy expected");
  const int d = static_cast<int>(m.states.front().rows());
  std::vector<CMatrix> el(static_cast<std::size_t>(r) * s, CMatrix::Zero(d, d));
  for (std::size_t l = 0; l < m.states.size(); ++l)
    for (std::size_t k = 0; k < el.size(); ++k)
      if (m.strategies[l][k] != 0.0) el[k] += m.strategies[l][k] * m.states[l];
  return Assemblage(r, s, std::move(el), f);
}

SteeringFunctional evaluate_functional(std::vector<CMatrix> coeff, const std::vector<Strategy>& st,
                                       const Assemblage& asm_) {
  const int r = asm_.inputs(), s = asm_.outputs(), d = asm_.dim();
  require_strategies(st, r, s);
  if (coeff.size() != asm_.elements().size()) throw DimensionError("one coefficient per assemblage element expected");
  SteeringFunctional f;
  double scale = 0.0;
  for (std::size_t k = 0; k < coeff.size(); ++k) {
    coeff[k] = herm(coeff[k]);
    f.value += (coeff[k] * asm_.elements()[k]).trace().real();
    scale = std::max(scale, max_abs(coeff[k]));
  }
  f.bound = std::numeric_limits<double>::infinity();
  for (const Strategy& q : st) {
    CMatrix g = CMatrix::Zero(d, d);
    for (std::size_t k = 0; k < coeff.size(); ++k)
      if (q[k] != 0.0) g += q[k] * coeff[k];
    f.bound = std::min(f.bound, min_eigenvalue(g));
  }
  f.violated = f.value < f.bound - 1e-9 * std::max(1.0, scale);
  f.coefficients = std::move(coeff);
  return f;
}

FeasibilityResult lhs_feasibility(const Assemblage& asm_, const std::vector<Strategy>& st, const FeasibilityConfig& cfg) {
  const int r = asm_.inputs(), s = asm_.outputs(), d = asm_.dim();
  require_strategies(st, r, s);
  if (st.size() > kMaxStrategies) throw CapacityError("strategy list too long");
  const int m = r * s, n = static_cast<int>(st.size());
  Eigen::MatrixXd q(m, n);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < m; ++k) q(k, l) = st[l][k];
  // (Q Q^T)^+ and Q^T (Q Q^T)^+ for the affine projection
  const Eigen::MatrixXd qq = q * q.transpose();
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(qq);
  cod.setThreshold(1e-10);
  const Eigen::MatrixXd qq_pinv = cod.pseudoInverse();
  const Eigen::MatrixXd k_map = q.transpose() * qq_pinv;
  const std::vector<CMatrix>& rho = asm_.elements();

  auto reconstruct = [&](const std::vector<CMatrix>& x) {
    std::vector<CMatrix> out(m, CMatrix::Zero(d, d));
    for (int k = 0; k < m; ++k)
      for (int l = 0; l < n; ++l)
        if (q(k, l) != 0.0) out[k] += q(k, l) * x[l];
    return out;
  };
  auto defect = [&](const std::vector<CMatrix>& x) {
    std::vector<CMatrix> rec = reconstruct(x);
    for (int k = 0; k < m; ++k) rec[k] -= rho[k];
    return rec;
  };
  auto max_norm = [](const std::vector<CMatrix>& v) {
    double e = 0.0;
    for (const CMatrix& c : v) e = std::max(e, max_abs(c));
    return e;
  };
  auto project_affine = [&](std::vector<CMatrix>& y) {
    const std::vector<CMatrix> res = defect(y);
    for (int l = 0; l < n; ++l)
      for (int k = 0; k < m; ++k)
        if (k_map(l, k) != 0.0) y[l] -= k_map(l, k) * res[k];
  };
  auto functional_from = [&](const std::vector<CMatrix>& x) {
    const std::vector<CMatrix> res = defect(x);
    std::vector<CMatrix> f(m, CMatrix::Zero(d, d));
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m; ++k)
        if (qq_pinv(i, k) != 0.0) f[i] += qq_pinv(i, k) * res[k];
    return evaluate_functional(std::move(f), st, asm_);
  };

  const CMatrix zero = CMatrix::Zero(d, d);
  std::vector<CMatrix> x(n, zero), p(n, zero), qc(n, zero), y(n, zero);
  FeasibilityResult out;
  double residual = max_norm(defect(x));
  int it = 0;
  for (; it < cfg.max_iterations && residual > cfg.target; ++it) {
    for (int l = 0; l < n; ++l) y[l] = x[l] + p[l];
    project_affine(y);
    for (int l = 0; l < n; ++l) {
      p[l] = x[l] + p[l] - y[l];
      const CMatrix z = y[l] + qc[l];
      x[l] = psd_part(z);
      qc[l] = z - x[l];
    }
    if ((it + 1) % 10 == 0) residual = max_norm(defect(x));
    // a separating functional settles the question early
    if ((it + 1) % 500 == 0 && residual > cfg.tol && functional_from(x).violated) {
      ++it;
      break;
    }
  }
  residual = max_norm(defect(x));
  out.iterations = it;
  out.residual = residual;
  if (residual <= cfg.tol) {
    out.status = FeasibilityStatus::model_found;
    LhsModel model;
    for (int l = 0; l < n; ++l)
      if (x[l].trace().real() > 1e-14) {
        model.strategies.push_back(st[l]);
        model.states.push_back(x[l]);
      }
    model.residual = residual;
    out.model = std::move(model);
  } else {
    out.functional = functional_from(x);
  }
  return out;
}

FeasibilityResult is_unsteerable(const Assemblage& asm_, const FeasibilityConfig& cfg) {
  return lhs_feasibility(asm_, deterministic_strategies(asm_.inputs(), asm_.outputs()), cfg);
}

namespace {

void require_binary_broadcast(const Assemblage& asm4) {
  const auto& f = asm4.factors();
  if (!f || f->r0 != 2 || f->r1 != 2 || f->s0 != 2 || f->s1 != 2)
    throw DimensionError("broadcast assemblage with binary inputs and outputs on both pairs expected");
}

}  // namespace

FeasibilityResult is_urns(const Assemblage& asm4, const FeasibilityConfig& cfg) {
  require_binary_broadcast(asm4);
  return lhs_feasibility(asm4, ns_wing_strategies(), cfg);
}

CqState cq_state(const Assemblage& asm_, const std::vector<double>& pi) {
  const int r = asm_.inputs(), s = asm_.outputs(), d = asm_.dim();
  if (static_cast<int>(pi.size()) != r) throw DimensionError("one input probability per input expected");
  validate_simplex(pi);
  CqState out{CMatrix::Zero(r * s * d, r * s * d), pi, r, s, d};
  for (int x = 0; x < r; ++x)
    for (int a = 0; a < s; ++a) out.state.block((x * s + a) * d, (x * s + a) * d, d, d) = pi[x] * asm_(a, x);
  return out;
}

CMatrix cq_state_zw(const Assemblage& asm4, const std::vector<double>& pi0, const std::vector<double>& pi1) {
  if (!asm4.factors()) throw DimensionError("broadcast assemblage expected");
  const AssemblageFactors f = *asm4.factors();
  if (static_cast<int>(pi0.size()) != f.r0 || static_cast<int>(pi1.size()) != f.r1)
    throw DimensionError("input distributions do not match the assemblage");
  validate_simplex(pi0);
  validate_simplex(pi1);
  const int dz = f.r0 * f.s0 * f.d0, dw = f.r1 * f.s1 * f.d1;
  CMatrix out = CMatrix::Zero(dz * dw, dz * dw);
  for (int x0 = 0; x0 < f.r0; ++x0)
    for (int x1 = 0; x1 < f.r1; ++x1)
      for (int a0 = 0; a0 < f.s0; ++a0)
        for (int a1 = 0; a1 < f.s1; ++a1) {
          const CMatrix& e = asm4(a0 * f.s1 + a1, x0 * f.r1 + x1);
          const double w = pi0[x0] * pi1[x1];
          if (w == 0.0) continue;
          for (int b0 = 0; b0 < f.d0; ++b0)
            for (int b1 = 0; b1 < f.d1; ++b1)
              for (int c0 = 0; c0 < f.d0; ++c0)
                for (int c1 = 0; c1 < f.d1; ++c1) {
                  const int zr = (x0 * f.s0 + a0) * f.d0 + b0, zc = (x0 * f.s0 + a0) * f.d0 + c0;
                  const int wr = (x1 * f.s1 + a1) * f.d1 + b1, wc = (x1 * f.s1 + a1) * f.d1 + c1;
                  out(zr * dw + wr, zc * dw + wc) = w * e(b0 * f.d1 + b1, c0 * f.d1 + c1);
                }
        }
  return out;
}

AssemblageDivergenceReport assemblage_kl(const Assemblage& p, const Assemblage& q) {
  if (p.inputs() != q.inputs() || p.outputs() != q.outputs() || p.dim() != q.dim())
    throw DimensionError("assemblage shapes differ");
  AssemblageDivergenceReport rep;
  rep.per_input.assign(p.inputs(), 0.0);
  for (int x = 0; x < p.inputs(); ++x) {
    double v = 0.0;
    for (int a = 0; a < p.outputs(); ++a) v += block_divergence(p(a, x), q(a, x));
    rep.per_input[x] = std::max(0.0, v / kLn2);
    if (rep.per_input[x] > rep.value || x == 0) {
      rep.value = rep.per_input[x];
      rep.argmax_input = x;
    }
  }
  return rep;
}

Assemblage marginal_assemblage(const Assemblage& asm4, int pair, double tol) {
  if (!asm4.factors()) throw DimensionError("broadcast assemblage expected");
  if (pair != 0 && pair != 1) throw DimensionError("pair must be 0 or 1");
  const AssemblageFactors f = *asm4.factors();
  const int r = pair == 0 ? f.r0 : f.r1, s = pair == 0 ? f.s0 : f.s1, d = pair == 0 ? f.d0 : f.d1;
  const int ro = pair == 0 ? f.r1 : f.r0, so = pair == 0 ? f.s1 : f.s0;
  std::vector<CMatrix> el(static_cast<std::size_t>(r) * s);
  for (int x = 0; x < r; ++x)
    for (int a = 0; a < s; ++a)
      for (int xo = 0; xo < ro; ++xo) {
        CMatrix sum = CMatrix::Zero(d, d);
        for (int ao = 0; ao < so; ++ao) {
          const int xj = pair == 0 ? x * f.r1 + xo : xo * f.r1 + x;
          const int aj = pair == 0 ? a * f.s1 + ao : ao * f.s1 + a;
          sum += partial_trace(asm4(aj, xj), {f.d0, f.d1}, 1 - pair);
        }
        CMatrix& slot = el[static_cast<std::size_t>(x) * s + a];
        if (xo == 0)
          slot = sum;
        else if (max_abs(sum - slot) > tol)
          throw SignallingError("marginal depends on the other pair's input");
      }
  return Assemblage(r, s, std::move(el));
}

bool is_broadcast_assemblage(const Assemblage& asm4, const Assemblage& asm2, double tol) {
  if (!asm4.factors()) return false;
  const AssemblageFactors f = *asm4.factors();
  for (int pair = 0; pair < 2; ++pair) {
    const int r = pair == 0 ? f.r0 : f.r1, s = pair == 0 ? f.s0 : f.s1, d = pair == 0 ? f.d0 : f.d1;
    if (r != asm2.inputs() || s != asm2.outputs() || d != asm2.dim()) return false;
    try {
      if (max_abs_diff(marginal_assemblage(asm4, pair, tol), asm2) > tol) return false;
    } catch (const SignallingError&) {
      return false;
    }
  }
  return true;
}

// ---- relative entropy of steering --------------------------------------

namespace {

struct ElementEig {
  Eig e;
  double cross = 0.0;  // tr(rho log sigma), nats
};

// -D log[sigma](rho) in sigma's eigenbasis
CMatrix neg_log_derivative(const Eig& e, const CMatrix& rho) {
  const int d = static_cast<int>(e.values.size());
  CMatrix t = e.vectors.adjoint() * rho * e.vectors;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const double mi = e.values(i), mj = e.values(j);
      double g;
      if (std::abs(mi - mj) <= 1e-12 * std::max(mi, mj))
        g = 2.0 / (mi + mj);
      else
        g = (std::log(mi) - std::log(mj)) / (mi - mj);
      t(i, j) *= g;
    }
  return -(e.vectors * t * e.vectors.adjoint());
}

class SteeringObjective {
 public:
  SteeringObjective(const Assemblage& target) : target_(target) {
    const int m = target.inputs() * target.outputs();
    entropy_.assign(m, 0.0);
    for (int k = 0; k < m; ++k) {
      Eig e = eig(target.elements()[k]);
      for (int i = 0; i < e.values.size(); ++i)
        if (e.values(i) > kSupportCutoff) entropy_[k] += e.values(i) * std::log(e.values(i));
    }
  }

  // Per-input divergences (nats); +inf when a support condition fails.
  std::vector<double> divergences(const std::vector<CMatrix>& sigma, std::vector<Eig>* eigs = nullptr) const {
    const int r = target_.inputs(), s = target_.outputs();
    std::vector<double> dx(r, 0.0);
    if (eigs) eigs->resize(sigma.size());
    for (int x = 0; x < r; ++x)
      for (int a = 0; a < s; ++a) {
        const std::size_t k = static_cast<std::size_t>(x) * s + a;
        Eig e = eig(herm(sigma[k]));
        const CMatrix& rho = target_.elements()[k];
        double cross = 0.0;
        for (int j = 0; j < e.values.size(); ++j) {
          const double w = (e.vectors.col(j).adjoint() * rho * e.vectors.col(j))(0, 0).real();
          if (e.values(j) <= 0.0) {
            if (w > kSupportCutoff) cross = -std::numeric_limits<double>::infinity();
            continue;
          }
          cross += w * std::log(e.values(j));
        }
        dx[x] += entropy_[k] - cross;
        if (eigs) (*eigs)[k] = std::move(e);
      }
    return dx;
  }

  const Assemblage& target() const { return target_; }

 private:
  const Assemblage& target_;
  std::vector<double> entropy_;
};

double smooth_max(const std::vector<double>& v, double tau, std::vector<double>* weights = nullptr) {
  const double mx = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(mx)) return mx;
  double z = 0.0;
  for (double x : v) z += std::exp((x - mx) / tau);
  if (weights) {
    weights->resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) (*weights)[i] = std::exp((v[i] - mx) / tau) / z;
  }
  return mx + tau * std::log(z);
}

struct Lmo {
  int strategy = 0;
  double value = 0.0;
  Eigen::VectorXcd vec;
};

Lmo linear_minimiser(const std::vector<Strategy>& st, const std::vector<CMatrix>& grad) {
  Lmo best;
  best.value = std::numeric_limits<double>::infinity();
  const int d = static_cast<int>(grad.front().rows());
  for (std::size_t v = 0; v < st.size(); ++v) {
    CMatrix g = CMatrix::Zero(d, d);
    for (std::size_t k = 0; k < grad.size(); ++k)
      if (st[v][k] != 0.0) g += st[v][k] * grad[k];
    Eig e = eig(herm(g));
    if (e.values(0) < best.value) {
      best.value = e.values(0);
      best.strategy = static_cast<int>(v);
      best.vec = e.vectors.col(0);
    }
  }
  return best;
}

std::vector<CMatrix> combine(const std::vector<Strategy>& st, const std::vector<CMatrix>& states, std::size_t m) {
  const int d = static_cast<int>(states.front().rows());
  std::vector<CMatrix> out(m, CMatrix::Zero(d, d));
  for (std::size_t v = 0; v < st.size(); ++v)
    for (std::size_t k = 0; k < m; ++k)
      if (st[v][k] != 0.0) out[k] += st[v][k] * states[v];
  return out;
}

// Convexity bound for the pi-weighted objective at sigma (nats).
double certificate(const SteeringObjective& obj, const std::vector<Strategy>& st, const std::vector<CMatrix>& sigma,
                   const std::vector<double>& dx, const std::vector<Eig>& eigs, const std::vector<double>& pi) {
  const Assemblage& t = obj.target();
  const int s = t.outputs();
  std::vector<CMatrix> grad(sigma.size());
  double value = 0.0, inner = 0.0;
  for (int x = 0; x < t.inputs(); ++x) {
    value += pi[x] * dx[x];
    for (int a = 0; a < s; ++a) {
      const std::size_t k = static_cast<std::size_t>(x) * s + a;
      grad[k] = pi[x] * neg_log_derivative(eigs[k], t.elements()[k]);
      inner += (grad[k] * sigma[k]).trace().real();
    }
  }
  return value + linear_minimiser(st, grad).value - inner;
}

}  // namespace

SteeringEntropyResult relative_entropy_steering_ub(const Assemblage& asm_, const std::vector<Strategy>& st,
                                                   const SteeringEntropyConfig& cfg) {
  const int r = asm_.inputs(), s = asm_.outputs(), d = asm_.dim();
  require_strategies(st, r, s);
  if (cfg.iterations <= 0 || cfg.temperatures.empty()) throw ValidationError("iteration budget and temperatures needed");
  const std::size_t m = static_cast<std::size_t>(r) * s, nv = st.size();
  SteeringObjective obj(asm_);

  // hidden states kept as matrix logarithms, normalised to total trace 1
  Rng rng(cfg.seed);
  const std::vector<double> w0 = rng.dirichlet(static_cast<int>(nv), 1.0);
  std::vector<CMatrix> logs(nv);
  for (std::size_t v = 0; v < nv; ++v) logs[v] = std::log(std::max(w0[v], 1e-300) / d) * CMatrix::Identity(d, d);
  auto exponentiate = [&](std::vector<CMatrix>& ls) {
    std::vector<CMatrix> out(nv);
    double z = 0.0;
    for (std::size_t v = 0; v < nv; ++v) {
      Eig e = eig(herm(ls[v]));
      RVector ex = e.values.array().exp();
      z += ex.sum();
      out[v] = e.vectors * ex.asDiagonal() * e.vectors.adjoint();
    }
    const double lz = std::log(z);
    for (std::size_t v = 0; v < nv; ++v) {
      out[v] /= z;
      ls[v] -= lz * CMatrix::Identity(d, d);
    }
    return out;
  };
  std::vector<CMatrix> states = exponentiate(logs);
  std::vector<CMatrix> sigma = combine(st, states, m);

  std::vector<Eig> eigs, trial_eigs;
  std::vector<double> dx = obj.divergences(sigma, &eigs), pi;
  double eta = 1.0;
  int done = 0;
  const int stages = static_cast<int>(cfg.temperatures.size());
  for (int stage = 0; stage < stages; ++stage) {
    const double tau = cfg.temperatures[stage];
    const int budget = cfg.iterations * (stage + 1) / stages - cfg.iterations * stage / stages;
    double f = smooth_max(dx, tau, &pi);
    for (int t = 0; t < budget; ++t, ++done) {
      std::vector<CMatrix> grad(m);
      double inner = 0.0;
      for (int x = 0; x < r; ++x)
        for (int a = 0; a < s; ++a) {
          const std::size_t k = static_cast<std::size_t>(x) * s + a;
          grad[k] = pi[x] * neg_log_derivative(eigs[k], asm_.elements()[k]);
          inner += (grad[k] * sigma[k]).trace().real();
        }
      std::vector<CMatrix> g(nv, CMatrix::Zero(d, d));
      double lmo = std::numeric_limits<double>::infinity();
      for (std::size_t v = 0; v < nv; ++v) {
        for (std::size_t k = 0; k < m; ++k)
          if (st[v][k] != 0.0) g[v] += st[v][k] * grad[k];
        g[v] = herm(g[v]);
        lmo = std::min(lmo, min_eigenvalue(g[v]));
      }
      if (inner - lmo <= 1e-14 * std::max(1.0, std::abs(f))) break;
      bool moved = false;
      for (int k = 0; k < 60 && !moved; ++k) {
        std::vector<CMatrix> trial_logs(nv);
        for (std::size_t v = 0; v < nv; ++v) trial_logs[v] = logs[v] - eta * g[v];
        std::vector<CMatrix> trial_states = exponentiate(trial_logs);
        std::vector<CMatrix> trial_sigma = combine(st, trial_states, m);
        std::vector<double> trial_dx = obj.divergences(trial_sigma, &trial_eigs);
        std::vector<double> trial_pi;
        const double ft = smooth_max(trial_dx, tau, &trial_pi);
        if (ft <= f) {
          logs = std::move(trial_logs);
          states = std::move(trial_states);
          sigma = std::move(trial_sigma);
          dx = std::move(trial_dx);
          eigs = std::move(trial_eigs);
          pi = std::move(trial_pi);
          f = ft;
          eta *= 1.5;
          moved = true;
        } else {
          eta *= 0.5;
        }
      }
      if (!moved) break;
    }
  }

  // exact max at the final model, and the best certificate over input weights
  for (double& v : dx) v = std::max(v, 0.0);
  const double ub = *std::max_element(dx.begin(), dx.end());
  double lb = 0.0;
  std::vector<std::vector<double>> candidates;
  candidates.push_back(std::vector<double>(r, 1.0 / r));
  std::vector<double> onehot(r, 0.0);
  onehot[std::max_element(dx.begin(), dx.end()) - dx.begin()] = 1.0;
  candidates.push_back(onehot);
  for (double tau : cfg.temperatures) {
    std::vector<double> w;
    smooth_max(dx, tau, &w);
    candidates.push_back(w);
  }
  for (const auto& c : candidates) lb = std::max(lb, certificate(obj, st, sigma, dx, eigs, c));

  LhsModel model;
  for (std::size_t v = 0; v < nv; ++v)
    if (states[v].trace().real() > 1e-15) {
      model.strategies.push_back(st[v]);
      model.states.push_back(herm(states[v]));
    }
  Assemblage wit = assemble(r, s, model, asm_.factors());
  double res = 0.0;
  for (std::size_t k = 0; k < m; ++k) res = std::max(res, max_abs(wit.elements()[k] - sigma[k]));
  model.residual = res;
  return SteeringEntropyResult{ub / kLn2, std::min(lb, ub) / kLn2, std::move(model), std::move(wit), done};
}

SteeringEntropyResult relative_entropy_steering_ub(const Assemblage& asm_, const SteeringEntropyConfig& cfg) {
  const auto& f = asm_.factors();
  if (f && f->r0 == 2 && f->r1 == 2 && f->s0 == 2 && f->s1 == 2)
    return relative_entropy_steering_ub(asm_, ns_wing_strategies(), cfg);
  return relative_entropy_steering_ub(asm_, deterministic_strategies(asm_.inputs(), asm_.outputs()), cfg);
}

// ---- assemblage LOSR maps ----------------------------------------------

AssemblageLosrMap::AssemblageLosrMap(AssemblageMapShape shape, std::vector<double> lambda_weights,
                                     std::vector<Conditional> pre, Conditional post,
                                     std::vector<KrausChannel> channels)
    : shape_(shape), r_(std::move(lambda_weights)), pre_(std::move(pre)), post_(std::move(post)),
      ch_(std::move(channels)) {
  const AssemblageFactors& t = shape_.target;
  if (shape_.inputs <= 0 || shape_.outputs <= 0 || shape_.dim <= 0 || shape_.messages <= 0)
    throw DimensionError("map shape must be positive");
  if (r_.empty() || static_cast<int>(r_.size()) > kMaxLambda) throw ValidationError("lambda count out of range");
  r_ = validate_simplex(std::move(r_));
  if (pre_.size() != r_.size() || ch_.size() != r_.size()) throw DimensionError("one table and channel per lambda");
  for (const Conditional& c : pre_)
    if (c.rows() != t.r0 * t.r1 || c.cols() != shape_.messages * shape_.inputs)
      throw DimensionError("input table has the wrong shape");
  if (post_.rows() != shape_.outputs * shape_.messages || post_.cols() != t.s0 * t.s1)
    throw DimensionError("output table has the wrong shape");
  for (const KrausChannel& k : ch_)
    if (k.input_dim() != shape_.dim || k.output_dim() != t.d0 * t.d1)
      throw DimensionError("channel dimensions do not match the map");
}

Assemblage apply_losr_assemblage(const AssemblageLosrMap& m, const Assemblage& asm_) {
  const AssemblageMapShape& sh = m.shape();
  if (asm_.inputs() != sh.inputs || asm_.outputs() != sh.outputs || asm_.dim() != sh.dim)
    throw DimensionError("assemblage does not match the map's source");
  const AssemblageFactors& t = sh.target;
  const int rx = t.r0 * t.r1, sa = t.s0 * t.s1, dout = t.d0 * t.d1;
  std::vector<CMatrix> out(static_cast<std::size_t>(rx) * sa, CMatrix::Zero(dout, dout));
  for (int l = 0; l < m.num_lambda(); ++l) {
    const double rl = m.lambda_weights()[l];
    if (rl == 0.0) continue;
    std::vector<CMatrix> mapped;
    for (const CMatrix& e : asm_.elements()) mapped.push_back(apply_channel(m.channel(l), e));
    const Conditional& pre = m.pre(l);
    for (int xj = 0; xj < rx; ++xj)
      for (int c = 0; c < sh.messages; ++c)
        for (int x = 0; x < sh.inputs; ++x) {
          const double w = rl * pre(xj, c * sh.inputs + x);
          if (w == 0.0) continue;
          for (int a = 0; a < sh.outputs; ++a)
            for (int aj = 0; aj < sa; ++aj) {
              const double o = m.post()(a * sh.messages + c, aj);
              if (o != 0.0) out[static_cast<std::size_t>(xj) * sa + aj] += (w * o) * mapped[x * sh.outputs + a];
            }
        }
  }
  return Assemblage(rx, sa, std::move(out), t);
}

namespace {

Conditional dirichlet_rows(Rng& rng, int rows, int cols, double alpha = 1.0) {
  std::vector<double> p;
  for (int r = 0; r < rows; ++r) {
    std::vector<double> d = rng.dirichlet(cols, alpha);
    p.insert(p.end(), d.begin(), d.end());
  }
  return Conditional(rows, cols, std::move(p));
}

}  // namespace

AssemblageLosrMap random_assemblage_losr(std::uint64_t seed, const AssemblageMapShape& shape, int num_lambda) {
  if (num_lambda <= 0 || num_lambda > kMaxLambda) throw ValidationError("lambda count out of range");
  Rng rng(seed);
  const AssemblageFactors& t = shape.target;
  std::vector<double> r = rng.dirichlet(num_lambda);
  std::vector<Conditional> pre;
  std::vector<KrausChannel> ch;
  for (int l = 0; l < num_lambda; ++l) {
    pre.push_back(dirichlet_rows(rng, t.r0 * t.r1, shape.messages * shape.inputs));
    ch.push_back(random_cptp(rng.next(), shape.dim, t.d0 * t.d1));
  }
  Conditional post = dirichlet_rows(rng, shape.outputs * shape.messages, t.s0 * t.s1);
  return AssemblageLosrMap(shape, std::move(r), std::move(pre), std::move(post), std::move(ch));
}

AssemblageLosrMap random_routing_assemblage_losr(std::uint64_t seed, int num_lambda) {
  if (num_lambda <= 0 || num_lambda > kMaxLambda) throw ValidationError("lambda count out of range");
  Rng rng(seed);
  AssemblageMapShape shape;
  shape.messages = num_lambda * 4;  // c = (lambda, x0, x1)
  std::vector<double> r = rng.dirichlet(num_lambda);
  std::vector<Conditional> pre;
  std::vector<KrausChannel> ch;
  std::vector<double> post(static_cast<std::size_t>(2 * shape.messages) * 4, 0.0);
  for (int l = 0; l < num_lambda; ++l) {
    const int route = rng.index(2);
    const Conditional by_site = dirichlet_rows(rng, 2, 2);            // x | x_route
    const Conditional routed = dirichlet_rows(rng, 2 * 2, 2, 0.5);    // a_route | a, x_route
    const Conditional free = dirichlet_rows(rng, 2, 2, 0.5);          // a_other | x_other
    std::vector<double> p(static_cast<std::size_t>(4) * shape.messages * 2, 0.0);
    for (int x0 = 0; x0 < 2; ++x0)
      for (int x1 = 0; x1 < 2; ++x1) {
        const int c = (l * 2 + x0) * 2 + x1;
        const int xr = route == 0 ? x0 : x1, xo = route == 0 ? x1 : x0;
        for (int x = 0; x < 2; ++x) p[(x0 * 2 + x1) * shape.messages * 2 + c * 2 + x] = by_site(xr, x);
        for (int a = 0; a < 2; ++a)
          for (int ar = 0; ar < 2; ++ar)
            for (int ao = 0; ao < 2; ++ao) {
              const int a0 = route == 0 ? ar : ao, a1 = route == 0 ? ao : ar;
              post[(a * shape.messages + c) * 4 + a0 * 2 + a1] = routed(a * 2 + xr, ar) * free(xo, ao);
            }
      }
    pre.emplace_back(4, shape.messages * 2, std::move(p));
    ch.push_back(random_cptp(rng.next(), 2, 4));
  }
  // messages never sent still need a valid output row
  for (int a = 0; a < 2; ++a)
    for (int c = 0; c < shape.messages; ++c) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += post[(a * shape.messages + c) * 4 + k];
      if (s == 0.0) post[(a * shape.messages + c) * 4] = 1.0;
    }
  return AssemblageLosrMap(shape, std::move(r), std::move(pre), Conditional(2 * shape.messages, 4, std::move(post)),
                           std::move(ch));
}

// ---- measured chain rule -----------------------------------------------

Povm flagged_povm(int inputs, int outputs, const Povm& on_b) {
  std::vector<CMatrix> eff;
  for (int x = 0; x < inputs; ++x)
    for (int a = 0; a < outputs; ++a)
      for (const CMatrix& e : on_b.effects())
        eff.push_back(kron(kron(basis_projector(inputs, x), basis_projector(outputs, a)), e));
  return Povm(std::move(eff));
}

MeasuredEntropyReport measured_entropy_check(const CMatrix& rho, const CMatrix& sigma, std::array<int, 2> dims, const Povm& povm) {
  const int dz = dims[0], dw = dims[1];
  if (rho.rows() != dz * dw || sigma.rows() != dz * dw || povm.dim() != dz)
    throw DimensionError("measured entropy check: dimensions do not line up");
  const CMatrix rz = partial_trace(rho, {dz, dw}, 1), sz = partial_trace(sigma, {dz, dw}, 1);
  const CMatrix rw = partial_trace(rho, {dz, dw}, 0);
  MeasuredEntropyReport rep;
  rep.lhs = quantum_relative_entropy(rho, sigma);
  rep.term1 = quantum_relative_entropy(measurement_map(povm, rz), measurement_map(povm, sz));
  CMatrix mix = CMatrix::Zero(dw, dw);
  const CMatrix id = CMatrix::Identity(dw, dw);
  for (int k = 0; k < povm.size(); ++k) {
    const double alpha = (povm[k] * rz).trace().real();
    const double norm = (povm[k] * sz).trace().real();
    if (norm <= 1e-15) continue;  // alpha > 0 here makes term1 infinite
    mix += (alpha / norm) * partial_trace(kron(povm[k], id) * sigma, {dz, dw}, 0);
  }
  rep.term2 = quantum_relative_entropy(herm(rw), herm(mix));
  const double rhs = rep.term1 + rep.term2;
  if (std::isinf(rep.lhs))
    rep.holds = true;
  else
    rep.holds = std::isfinite(rhs) && rep.lhs >= rhs - 1e-8;
  return rep;
}

// ---- random instances --------------------------------------------------

Assemblage random_assemblage(Rng& rng, int r, int s, int d) {
  const DensityMatrix rho = random_density(rng, s * d);
  std::vector<Povm> meas;
  for (int x = 0; x < r; ++x) meas.push_back(Povm::projective(random_unitary(rng, s)));
  return steering_from_state(rho, meas);
}

Assemblage random_lhs_assemblage(Rng& rng, int r, int s, int d, int terms) {
  LhsModel m;
  const std::vector<double> w = rng.dirichlet(terms);
  for (int t = 0; t < terms; ++t) {
    Strategy q;
    for (int x = 0; x < r; ++x) {
      std::vector<double> row = rng.dirichlet(s, 0.5);
      q.insert(q.end(), row.begin(), row.end());
    }
    m.strategies.push_back(std::move(q));
    m.states.push_back(w[t] * random_density(rng, d).matrix());
  }
  return assemble(r, s, m);
}

Assemblage random_urns_assemblage(Rng& rng, int terms) {
  const std::vector<Strategy> ns = ns_wing_strategies();
  LhsModel m;
  const std::vector<double> w = rng.dirichlet(terms);
  for (int t = 0; t < terms; ++t) {
    const std::vector<double> mixw = rng.dirichlet(static_cast<int>(ns.size()), 0.3);
    Strategy q(16, 0.0);
    for (std::size_t v = 0; v < ns.size(); ++v)
      for (int k = 0; k < 16; ++k) q[k] += mixw[v] * ns[v][k];
    m.strategies.push_back(std::move(q));
    m.states.push_back(w[t] * random_density(rng, 4).matrix());
  }
  return assemble(4, 4, m, AssemblageFactors{});
}

// ---- lemma checks ------------------------------------------------------

bool CqLemmaReport::all_passed() const {
  for (const LemmaTally* t : {&reduced_cq, &post_measurement, &convex_sum, &injectivity})
    if (t->checked == 0 || t->passed != t->checked) return false;
  return true;
}

namespace {

// Reads a W-side CQ state back as an assemblage; `cq_defect` collects the
// off-block mass and the deviation of the input weights from pi.
Assemblage read_cq(const CMatrix& w, const std::vector<double>& pi, int s, int d, double& cq_defect) {
  const int r = static_cast<int>(pi.size());
  const double tr = w.trace().real();
  CMatrix norm = w / tr;
  CMatrix off = norm;
  std::vector<CMatrix> el;
  for (int x = 0; x < r; ++x) {
    double mass = 0.0;
    for (int a = 0; a < s; ++a) {
      const int o = (x * s + a) * d;
      el.push_back(norm.block(o, o, d, d) / pi[x]);
      mass += norm.block(o, o, d, d).trace().real();
      off.block(o, o, d, d).setZero();
    }
    cq_defect = std::max(cq_defect, std::abs(mass - pi[x]));
  }
  cq_defect = std::max(cq_defect, max_abs(off));
  return Assemblage(r, s, std::move(el));
}

Assemblage random_quantum_broadcast(Rng& rng) {
  const DensityMatrix rho = random_density(rng, 16);  // A0 A1 B0 B1
  std::vector<Povm> m0, m1, joint;
  for (int k = 0; k < 2; ++k) {
    m0.push_back(Povm::projective(random_unitary(rng, 2)));
    m1.push_back(Povm::projective(random_unitary(rng, 2)));
  }
  for (int x0 = 0; x0 < 2; ++x0)
    for (int x1 = 0; x1 < 2; ++x1) {
      std::vector<CMatrix> eff;
      for (int a0 = 0; a0 < 2; ++a0)
        for (int a1 = 0; a1 < 2; ++a1) eff.push_back(kron(m0[x0][a0], m1[x1][a1]));
      joint.emplace_back(std::move(eff));
    }
  Assemblage a = steering_from_state(rho, joint);
  return Assemblage(4, 4, a.elements(), AssemblageFactors{});
}

}  // namespace

CqLemmaReport verify_cq_lemmas(const CqLemmaConfig& cfg) {
  CqLemmaReport rep;
  Rng rng(cfg.seed);
  const Povm sic = sic_povm_qubit();
  const Povm fz = flagged_povm(2, 2, sic);
  const std::vector<Strategy> det = deterministic_strategies(2, 2);
  for (int t = 0; t < cfg.instances; ++t) {
    const std::vector<double> pi0 = rng.dirichlet(2), pi1 = rng.dirichlet(2);

    // reduced CQ state is the marginal's CQ state
    {
      const Assemblage tau = t % 2 ? random_quantum_broadcast(rng) : random_urns_assemblage(rng);
      const CMatrix zw = cq_state_zw(tau, pi0, pi1);
      const double res = max_abs(partial_trace(zw, {8, 8}, 1) - cq_state(marginal_assemblage(tau, 0), pi0).state);
      rep.reduced_cq.checked++;
      rep.reduced_cq.worst = std::max(rep.reduced_cq.worst, res);
      if (res <= 1e-9) rep.reduced_cq.passed++;
    }

    // post-measurement W states of a free broadcast assemblage, and their mixtures
    {
      const Assemblage sigma = random_urns_assemblage(rng);
      const CMatrix zw = cq_state_zw(sigma, pi0, pi1);
      const CMatrix sz = partial_trace(zw, {8, 8}, 1);
      std::vector<CMatrix> posts;
      for (int k = 0; k < fz.size(); ++k) {
        if ((fz[k] * sz).trace().real() <= 1e-12) continue;
        posts.push_back(partial_trace(kron(fz[k], CMatrix::Identity(8, 8)) * zw, {8, 8}, 0));
      }
      for (const CMatrix& p : posts) {
        double defect = 0.0;
        const Assemblage w = read_cq(p, pi1, 2, 2, defect);
        const FeasibilityResult fr = lhs_feasibility(w, det, cfg.feasibility);
        rep.post_measurement.checked++;
        rep.post_measurement.worst = std::max({rep.post_measurement.worst, defect, fr.residual});
        if (defect <= 1e-9 && fr.status == FeasibilityStatus::model_found) rep.post_measurement.passed++;
      }
      const std::vector<double> mixw = rng.dirichlet(static_cast<int>(posts.size()));
      CMatrix mix = CMatrix::Zero(8, 8);
      for (std::size_t k = 0; k < posts.size(); ++k) mix += mixw[k] * posts[k] / posts[k].trace().real();
      double defect = 0.0;
      const Assemblage w = read_cq(mix, pi1, 2, 2, defect);
      const FeasibilityResult fr = lhs_feasibility(w, det, cfg.feasibility);
      rep.convex_sum.checked++;
      rep.convex_sum.worst = std::max({rep.convex_sum.worst, defect, fr.residual});
      if (defect <= 1e-9 && fr.status == FeasibilityStatus::model_found) rep.convex_sum.passed++;
    }

    // flagged SIC measurement separates distinct assemblages when pi > 0
    {
      const Assemblage a = random_assemblage(rng, 2, 2, 2), b = random_assemblage(rng, 2, 2, 2);
      std::vector<double> pi = rng.dirichlet(2);
      if (t % 10 == 9) pi = {1.0, 0.0};
      if (*std::min_element(pi.begin(), pi.end()) <= 0.0) {
        rep.injectivity.skipped++;
        continue;
      }
      const double dist =
          max_abs(measurement_map(fz, cq_state(a, pi).state) - measurement_map(fz, cq_state(b, pi).state));
      const double input_gap = max_abs_diff(a, b);
      rep.injectivity.checked++;
      if (rep.injectivity.checked == 1 || dist < rep.injectivity.worst) rep.injectivity.worst = dist;
      if (input_gap > 1e-9 && dist >= 1e-9) rep.injectivity.passed++;
    }
  }
  return rep;
}

// ---- broadcast entropy increase ----------------------------------------

BroadcastSteeringReport broadcast_steering_demo(const Assemblage& asm2, const SteeringEntropyConfig& cfg,
                                  const FeasibilityConfig& fcfg) {
  return broadcast_steering_demo(asm2, product_assemblage(asm2, asm2), cfg, fcfg);
}

BroadcastSteeringReport broadcast_steering_demo(const Assemblage& asm2, const Assemblage& cand, const SteeringEntropyConfig& cfg,
                                  const FeasibilityConfig& fcfg) {
  if (asm2.dim() != 2) throw DimensionError("entropy-increase check measures qubit Bob spaces");
  BroadcastSteeringReport rep;
  rep.steering = is_unsteerable(asm2, fcfg);
  if (!rep.steering.steerable()) throw PreconditionError("assemblage is not certified steerable");
  rep.is_broadcast = is_broadcast_assemblage(cand, asm2);
  if (!rep.is_broadcast) throw ValidationError("candidate is not a broadcast of the assemblage");
  require_binary_broadcast(cand);

  const SteeringEntropyResult e2 = relative_entropy_steering_ub(asm2, cfg);
  const SteeringEntropyResult e4 = relative_entropy_steering_ub(cand, cfg);
  rep.ea_original_ub = e2.upper_bound;
  rep.ea_original_lb = e2.lower_bound;
  rep.ea_broadcast_ub = e4.upper_bound;
  rep.ea_broadcast_lb = e4.lower_bound;

  const AssemblageFactors f = *cand.factors();
  const std::vector<double> pi0(f.r0, 1.0 / f.r0), pi1(f.r1, 1.0 / f.r1);
  const CMatrix rho = cq_state_zw(cand, pi0, pi1), sigma = cq_state_zw(e4.witness_assemblage, pi0, pi1);
  const int dz = f.r0 * f.s0 * f.d0, dw = f.r1 * f.s1 * f.d1;
  const MeasuredEntropyReport p = measured_entropy_check(rho, sigma, {dz, dw}, flagged_povm(f.r0, f.s0, sic_povm_qubit()));
  rep.chain_lhs = p.lhs;
  rep.first_term = p.term1;
  rep.second_term = p.term2;
  rep.measured_inequality_holds = p.holds;
  rep.first_term_positive = p.term1 > 1e-3;
  rep.broadcast_not_below = rep.ea_broadcast_ub >= rep.ea_original_ub - 1e-3;
  return rep;
}

}  // namespace boxcast
