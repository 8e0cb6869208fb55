#include <Eigen/Dense>
#include <cmath>

#include "boxcast/divergence.hpp"

namespace boxcast {

namespace {
constexpr double kLn2 = 0.69314718055994530942;
}

BarrierElrResult elr_interior_point(const Behavior& p, const VertexCatalogue& cat, double gap) {
  const int L = static_cast<int>(cat.size());
  const int S = p.num_settings(), O = p.num_outcomes(), E = S * O;
  Eigen::MatrixXd V(L, E);
  for (int k = 0; k < L; ++k)
    for (int e = 0; e < E; ++e) V(k, e) = cat.vertices[k].table()[e];
  Eigen::VectorXd P(E);
  for (int e = 0; e < E; ++e) P(e) = p.table()[e];

  auto kls = [&](const Eigen::VectorXd& w, Eigen::VectorXd& q) {
    q = V.transpose() * w;
    Eigen::VectorXd k = Eigen::VectorXd::Zero(S);
    for (int s = 0; s < S; ++s)
      for (int o = 0; o < O; ++o) {
        int e = s * O + o;
        if (P(e) > 0) k(s) += P(e) * std::log(P(e) / q(e)) / kLn2;
      }
    return k;
  };

  Eigen::VectorXd w = Eigen::VectorXd::Constant(L, 1.0 / L), q;
  Eigen::VectorXd k = kls(w, q);
  double t = k.maxCoeff() + 1.0;
  double mu = 1.0;
  BarrierElrResult res;
  const int m = S + L;
  for (;;) {
    for (int it = 0; it < 300; ++it) {
      k = kls(w, q);
      Eigen::VectorXd sl = Eigen::VectorXd::Constant(S, t) - k;
      Eigen::MatrixXd Gk = Eigen::MatrixXd::Zero(S, L);
      Eigen::VectorXd coef = Eigen::VectorXd::Zero(E);
      for (int s = 0; s < S; ++s)
        for (int o = 0; o < O; ++o) {
          int e = s * O + o;
          if (P(e) <= 0) continue;
          Gk.row(s) -= (P(e) / (q(e) * kLn2)) * V.col(e).transpose();
          coef(e) = P(e) / (q(e) * q(e) * kLn2 * sl(s));
        }
      Eigen::VectorXd inv_sl = sl.cwiseInverse();
      Eigen::VectorXd gw = Gk.transpose() * inv_sl - w.cwiseInverse();
      double gt = mu - inv_sl.sum();
      Eigen::MatrixXd Gs = inv_sl.asDiagonal() * Gk;
      Eigen::MatrixXd H = Eigen::MatrixXd::Zero(L + 1, L + 1);
      H.topLeftCorner(L, L) = Gs.transpose() * Gs + V * coef.asDiagonal() * V.transpose();
      H.topLeftCorner(L, L).diagonal() += w.cwiseInverse().cwiseAbs2();
      Eigen::VectorXd hwt = -(Gk.transpose() * inv_sl.cwiseAbs2());
      double htt = inv_sl.cwiseAbs2().sum();
      H.block(0, L, L, 1) = hwt;
      H.block(L, 0, 1, L) = hwt.transpose();
      H(L, L) = htt;
      // eliminate the sum-to-one constraint with one multiplier; the scaled
      // (w, t) block is positive definite thanks to the barrier terms
      Eigen::VectorXd D(L + 1);
      D << w, 1.0 / std::sqrt(htt);
      Eigen::MatrixXd Hs = D.asDiagonal() * H.topLeftCorner(L + 1, L + 1) * D.asDiagonal();
      Eigen::LDLT<Eigen::MatrixXd> ldlt(Hs);
      Eigen::VectorXd g(L + 1), a = Eigen::VectorXd::Zero(L + 1);
      g << gw, gt;
      a.head(L).setOnes();
      Eigen::VectorXd u = D.cwiseProduct(ldlt.solve(D.cwiseProduct(g)));
      Eigen::VectorXd v = D.cwiseProduct(ldlt.solve(D.cwiseProduct(a)));
      double nu = -a.dot(u) / a.dot(v);
      Eigen::VectorXd sol = -(u + nu * v);
      sol.head(L) -= w * (sol.head(L).sum() / w.sum());
      Eigen::VectorXd dw = sol.head(L);
      double dt = sol(L);
      double lam2 = -(gw.dot(dw) + gt * dt);
      ++res.newton_steps;
      if (lam2 / 2 < 1e-10) break;
      double f0 = mu * t - sl.array().log().sum() - w.array().log().sum();
      double step = lam2 > 0.25 ? 1.0 / (1.0 + std::sqrt(lam2)) : 1.0;
      for (int bt = 0; bt < 60; ++bt) {
        Eigen::VectorXd wn = w + step * dw;
        double tn = t + step * dt;
        if (wn.minCoeff() > 0) {
          Eigen::VectorXd qn;
          Eigen::VectorXd sn = Eigen::VectorXd::Constant(S, tn) - kls(wn, qn);
          if (sn.minCoeff() > 0) {
            double fn = mu * tn - sn.array().log().sum() - wn.array().log().sum();
            if (fn <= f0 - 0.25 * step * lam2) {
              w = wn;
              t = tn;
              break;
            }
          }
        }
        step *= 0.5;
      }
    }
    if (m / mu < gap) break;
    mu *= 20;
  }
  res.value = kls(w, q).maxCoeff();
  res.weights.assign(w.data(), w.data() + L);
  return res;
}

}  // namespace boxcast
