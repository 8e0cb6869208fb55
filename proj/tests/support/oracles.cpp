#include "oracles.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

using namespace boxcast;

namespace oracle {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

// Euclidean projection onto the probability simplex.
void project_simplex(std::vector<double>& v) {
  std::vector<double> u(v);
  std::sort(u.begin(), u.end(), std::greater<>());
  double css = 0, theta = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    css += u[i];
    double th = (css - 1.0) / static_cast<double>(i + 1);
    if (u[i] - th > 0) theta = th;
  }
  for (double& x : v) x = std::max(x - theta, 0.0);
}

}  // namespace

double elr_projected_subgradient(const Behavior& p, const VertexCatalogue& cat, int iters) {
  const int L = static_cast<int>(cat.size());
  const int S = p.num_settings(), O = p.num_outcomes();
  std::vector<double> w(L, 1.0 / L), q(S * O);
  double best = 1e300;
  for (int it = 1; it <= iters; ++it) {
    std::fill(q.begin(), q.end(), 0.0);
    for (int k = 0; k < L; ++k)
      for (int e = 0; e < S * O; ++e) q[e] += w[k] * cat.vertices[k].table()[e];
    int smax = 0;
    double vmax = -1;
    for (int s = 0; s < S; ++s) {
      double v = 0;
      for (int o = 0; o < O; ++o) {
        double pe = p(s, o);
        if (pe > 0) v += q[s * O + o] > 0 ? pe * std::log2(pe / q[s * O + o]) : 1e300;
      }
      if (v > vmax) {
        vmax = v;
        smax = s;
      }
    }
    best = std::min(best, vmax);
    std::vector<double> g(L, 0.0);
    for (int k = 0; k < L; ++k)
      for (int o = 0; o < O; ++o) {
        double pe = p(smax, o);
        if (pe > 0) g[k] -= pe * cat.vertices[k](smax, o) / (q[smax * O + o] * kLn2);
      }
    double gn = 0;
    for (double x : g) gn += x * x;
    double step = 0.05 / (std::sqrt(static_cast<double>(it)) * std::max(1.0, std::sqrt(gn)));
    for (int k = 0; k < L; ++k) w[k] -= step * g[k];
    project_simplex(w);
  }
  return best;
}

Behavior random_nonlocal_222(Rng& rng, double vmin, double vmax) {
  static const VertexCatalogue ns = ns_vertices_222();
  static const VertexCatalogue loc = local_deterministic_vertices(Scenario::bipartite());
  Behavior local = combine(loc, rng.dirichlet(16, 0.3));
  double v = vmin + (vmax - vmin) * rng.uniform();
  const Behavior& nl = ns.vertices[16 + rng.index(8)];
  const Behavior parts[2] = {nl, local};
  const double wts[2] = {v, 1 - v};
  return mix(parts, wts);
}

Behavior apply_brute(const LosrMap& m, const Behavior& p) {
  const Scenario& in = m.input();
  const Scenario& out = m.output();
  const int mx = in.alice_inputs(), my = in.bob_inputs(), oa = in.alice_outputs(), ob = in.bob_outputs();
  const int SA = out.alice_inputs(), SB = out.bob_inputs(), OA = out.alice_outputs(), OB = out.bob_outputs();
  std::vector<double> t(out.table_size(), 0.0);
  for (int xs = 0; xs < SA; ++xs)
    for (int ys = 0; ys < SB; ++ys)
      for (int as = 0; as < OA; ++as)
        for (int bs = 0; bs < OB; ++bs) {
          double acc = 0;
          for (int l = 0; l < m.num_lambda(); ++l)
            for (int x = 0; x < mx; ++x)
              for (int y = 0; y < my; ++y)
                for (int a = 0; a < oa; ++a)
                  for (int b = 0; b < ob; ++b)
                    acc += m.lambda_weights()[l] * m.alice(l).pre(xs, x) * m.bob(l).pre(ys, y) * p.at(x, y, a, b) *
                           m.alice(l).post((xs * mx + x) * oa + a, as) * m.bob(l).post((ys * my + y) * ob + b, bs);
          t[static_cast<std::size_t>(xs * SB + ys) * (OA * OB) + as * OB + bs] = acc;
        }
  return Behavior(out, t);
}

}  // namespace oracle

namespace oracle {

Assemblage apply_assemblage_brute(const AssemblageLosrMap& m, const Assemblage& a) {
  const AssemblageMapShape& sh = m.shape();
  const AssemblageFactors& t = sh.target;
  const int dout = t.d0 * t.d1;
  std::vector<CMatrix> out;
  for (int x0 = 0; x0 < t.r0; ++x0)
    for (int x1 = 0; x1 < t.r1; ++x1)
      for (int a0 = 0; a0 < t.s0; ++a0)
        for (int a1 = 0; a1 < t.s1; ++a1) {
          CMatrix e = CMatrix::Zero(dout, dout);
          for (int l = 0; l < m.num_lambda(); ++l)
            for (int c = 0; c < sh.messages; ++c)
              for (int x = 0; x < sh.inputs; ++x)
                for (int b = 0; b < sh.outputs; ++b) {
                  const double w = m.lambda_weights()[l] * m.pre(l)(x0 * t.r1 + x1, c * sh.inputs + x) *
                                   m.post()(b * sh.messages + c, a0 * t.s1 + a1);
                  for (const CMatrix& k : m.channel(l).ops()) e += w * (k * a(b, x) * k.adjoint());
                }
          out.push_back(e);
        }
  return Assemblage(t.r0 * t.r1, t.s0 * t.s1, std::move(out), t);
}

namespace {

// nats; +inf when a support condition fails
double divergence_logm(const CMatrix& rho, const CMatrix& sigma) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sigma);
  if (es.eigenvalues().minCoeff() <= 1e-14) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<CMatrix> er(rho);
  double ent = 0.0;
  for (int i = 0; i < er.eigenvalues().size(); ++i) {
    const double l = er.eigenvalues()(i);
    if (l > 1e-14) ent += l * std::log(l);
  }
  const CMatrix ls = sigma.log();
  return ent - (rho * ls).trace().real();
}

}  // namespace

double steering_entropy_fw(const Assemblage& a, const std::vector<Strategy>& st, int iters, double tau) {
  const int r = a.inputs(), s = a.outputs(), d = a.dim();
  const std::size_t m = static_cast<std::size_t>(r) * s;
  std::vector<CMatrix> sig(m, CMatrix::Zero(d, d));
  for (const Strategy& q : st)
    for (std::size_t k = 0; k < m; ++k) sig[k] += (q[k] / (st.size() * d)) * CMatrix::Identity(d, d);
  auto per_input = [&](const std::vector<CMatrix>& g) {
    std::vector<double> dx(r, 0.0);
    for (int x = 0; x < r; ++x)
      for (int b = 0; b < s; ++b) dx[x] += divergence_logm(a(b, x), g[x * s + b]);
    return dx;
  };
  auto smooth = [&](const std::vector<double>& dx) {
    const double mx = *std::max_element(dx.begin(), dx.end());
    if (!std::isfinite(mx)) return mx;
    double z = 0.0;
    for (double v : dx) z += std::exp((v - mx) / tau);
    return mx + tau * std::log(z);
  };
  for (int it = 0; it < iters; ++it) {
    const std::vector<double> dx = per_input(sig);
    const double mx = *std::max_element(dx.begin(), dx.end());
    std::vector<double> w(r);
    double z = 0.0;
    for (int x = 0; x < r; ++x) z += (w[x] = std::exp((dx[x] - mx) / tau));
    std::vector<CMatrix> grad(m);
    for (int x = 0; x < r; ++x)
      for (int b = 0; b < s; ++b) {
        const std::size_t k = static_cast<std::size_t>(x) * s + b;
        Eigen::SelfAdjointEigenSolver<CMatrix> es(sig[k]);
        const auto& mu = es.eigenvalues();
        const CMatrix& u = es.eigenvectors();
        CMatrix h = u.adjoint() * a(b, x) * u;
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j)
            h(i, j) *= std::abs(mu(i) - mu(j)) < 1e-13 ? 1.0 / mu(i) : (std::log(mu(i)) - std::log(mu(j))) / (mu(i) - mu(j));
        grad[k] = -(w[x] / z) * (u * h * u.adjoint());
      }
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    Eigen::VectorXcd vec;
    for (std::size_t v = 0; v < st.size(); ++v) {
      CMatrix g = CMatrix::Zero(d, d);
      for (std::size_t k = 0; k < m; ++k) g += st[v][k] * grad[k];
      Eigen::SelfAdjointEigenSolver<CMatrix> es((g + g.adjoint()) / 2.0);
      if (es.eigenvalues()(0) < best) {
        best = es.eigenvalues()(0);
        arg = v;
        vec = es.eigenvectors().col(0);
      }
    }
    const CMatrix atom = vec * vec.adjoint();
    auto step = [&](double g) {
      std::vector<CMatrix> out(m);
      for (std::size_t k = 0; k < m; ++k) out[k] = (1 - g) * sig[k] + g * st[arg][k] * atom;
      return out;
    };
    const double phi = (std::sqrt(5.0) - 1) / 2;
    double lo = 0.0, hi = 1.0 - 1e-9;
    for (int k = 0; k < 30; ++k) {
      const double c1 = hi - phi * (hi - lo), c2 = lo + phi * (hi - lo);
      if (smooth(per_input(step(c1))) <= smooth(per_input(step(c2))))
        hi = c2;
      else
        lo = c1;
    }
    const double g = (lo + hi) / 2;
    if (smooth(per_input(step(g))) < smooth(dx)) sig = step(g);
  }
  const std::vector<double> dx = per_input(sig);
  return std::max(0.0, *std::max_element(dx.begin(), dx.end())) / kLn2;
}

}  // namespace oracle
