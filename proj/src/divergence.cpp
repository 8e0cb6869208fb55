#include "boxcast/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include "boxcast/simplex.hpp"

namespace boxcast {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr double kInf = std::numeric_limits<double>::infinity();

// max over settings of KL(P(.|s) || Q(.|s)) for Q = sum_k w_k V_k, with
// the vertex tables stored sparsely.
class ElrObjective {
 public:
  ElrObjective(const Behavior& p, const VertexCatalogue& cat)
      : S_(p.num_settings()), O_(p.num_outcomes()), p_(normalized_per_setting(p).table()) {
    if (!(p.scenario() == cat.scenario)) throw DimensionError("behavior and catalogue scenarios differ");
    if (cat.vertices.empty()) throw ValidationError("empty catalogue");
    off_.push_back(0);
    for (const Behavior& v : cat.vertices) {
      for (std::size_t e = 0; e < v.table().size(); ++e)
        if (v.table()[e] != 0.0 && p_[e] != 0.0) {
          idx_.push_back(static_cast<int>(e));
          val_.push_back(v.table()[e]);
        }
      off_.push_back(static_cast<int>(idx_.size()));
    }
    q_.resize(p_.size());
  }

  int num_vertices() const { return static_cast<int>(off_.size()) - 1; }
  int num_settings() const { return S_; }

  // Q restricted to the support of P (other entries never matter).
  void mix(const std::vector<double>& w) {
    std::fill(q_.begin(), q_.end(), 0.0);
    const int L = num_vertices();
    for (int k = 0; k < L; ++k) {
      const double wk = w[k];
      if (wk == 0.0) continue;
      for (int t = off_[k]; t < off_[k + 1]; ++t) q_[idx_[t]] += wk * val_[t];
    }
  }

  void kls(std::vector<double>& out) const {
    out.assign(S_, 0.0);
    for (int s = 0; s < S_; ++s) {
      double acc = 0.0;
      for (int o = 0; o < O_; ++o) {
        const std::size_t e = static_cast<std::size_t>(s) * O_ + o;
        if (p_[e] <= 0.0) continue;
        if (q_[e] <= 0.0) {
          acc = kInf;
          break;
        }
        acc += p_[e] * std::log(p_[e] / q_[e]);
      }
      out[s] = acc / kLn2;
    }
  }

  // Gradient of sum_s pi_s KL_s with respect to the weights.
  void grad(const std::vector<double>& pi, std::vector<double>& g) {
    gq_.assign(p_.size(), 0.0);
    for (int s = 0; s < S_; ++s) {
      if (pi[s] == 0.0) continue;
      for (int o = 0; o < O_; ++o) {
        const std::size_t e = static_cast<std::size_t>(s) * O_ + o;
        if (p_[e] > 0.0) gq_[e] = -pi[s] * p_[e] / (q_[e] * kLn2);
      }
    }
    const int L = num_vertices();
    g.assign(L, 0.0);
    for (int k = 0; k < L; ++k) {
      double acc = 0.0;
      for (int t = off_[k]; t < off_[k + 1]; ++t) acc += val_[t] * gq_[idx_[t]];
      g[k] = acc;
    }
  }

 private:
  int S_, O_;
  std::vector<double> p_;
  std::vector<int> off_, idx_;
  std::vector<double> val_;
  std::vector<double> q_, gq_;
};

// tau * log sum exp(kl / tau) and the matching softmax weights.
double smooth_max(const std::vector<double>& kl, double tau, std::vector<double>* pi) {
  const double m = *std::max_element(kl.begin(), kl.end());
  if (!std::isfinite(m)) {
    if (pi) {
      pi->assign(kl.size(), 0.0);
      for (std::size_t s = 0; s < kl.size(); ++s)
        if (!std::isfinite(kl[s])) (*pi)[s] = 1.0;
    }
    return kInf;
  }
  double z = 0.0;
  for (double v : kl) z += std::exp((v - m) / tau);
  if (pi) {
    pi->resize(kl.size());
    for (std::size_t s = 0; s < kl.size(); ++s) (*pi)[s] = std::exp((kl[s] - m) / tau) / z;
  }
  return m + tau * std::log(z);
}

std::vector<double> effective(const std::vector<double>& w, double eps) {
  const double u = eps / static_cast<double>(w.size());
  std::vector<double> out(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) out[k] = (1.0 - eps) * w[k] + u;
  return out;
}

// Setting weights from the dual of the linearised problem
//   min_{u in simplex} max_s KL_s(w) + grad KL_s . (u - w),
// which is the tightest weighting the convexity bound can certify at w.
std::optional<std::vector<double>> linearized_dual(ElrObjective& obj, const std::vector<double>& kl,
                                                   const std::vector<double>& w) {
  const int S = obj.num_settings(), L = obj.num_vertices();
  std::vector<std::vector<double>> G(S);
  std::vector<double> e(S, 0.0);
  LpProblem lp;
  lp.num_rows = S + 1;
  lp.rhs.assign(S + 1, 0.0);
  for (int s = 0; s < S; ++s) {
    e.assign(S, 0.0);
    e[s] = 1.0;
    obj.grad(e, G[s]);
    double gw = 0.0;
    for (int k = 0; k < L; ++k) gw += G[s][k] * w[k];
    lp.rhs[s] = -(kl[s] - gw);
  }
  lp.rhs[S] = 1.0;
  for (int k = 0; k < L; ++k) {
    SparseColumn c;
    for (int s = 0; s < S; ++s)
      if (G[s][k] != 0.0) {
        c.rows.push_back(s);
        c.values.push_back(G[s][k]);
      }
    c.rows.push_back(S);
    c.values.push_back(1.0);
    lp.columns.push_back(std::move(c));
    lp.cost.push_back(0.0);
  }
  for (int s = 0; s < S; ++s) {
    lp.columns.push_back({{s}, {1.0}});
    lp.cost.push_back(0.0);
  }
  // level variable t = t_plus - t_minus
  SparseColumn tp, tm;
  for (int s = 0; s < S; ++s) {
    tp.rows.push_back(s);
    tp.values.push_back(-1.0);
    tm.rows.push_back(s);
    tm.values.push_back(1.0);
  }
  lp.columns.push_back(tp);
  lp.cost.push_back(1.0);
  lp.columns.push_back(tm);
  lp.cost.push_back(-1.0);
  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::optimal) return std::nullopt;
  std::vector<double> pi(S);
  double total = 0.0;
  for (int s = 0; s < S; ++s) total += (pi[s] = std::max(0.0, -sol.duals[s]));
  if (!(total > 0.0)) return std::nullopt;
  for (double& v : pi) v /= total;
  return pi;
}

double lower_bound_at(ElrObjective& obj, const std::vector<double>& w) {
  std::vector<double> kl, pi, g;
  obj.mix(w);
  obj.kls(kl);
  const double m = *std::max_element(kl.begin(), kl.end());
  if (!std::isfinite(m)) return 0.0;
  double best = 0.0;
  std::vector<std::vector<double>> candidates;
  std::vector<double> onehot(kl.size(), 0.0);
  onehot[std::max_element(kl.begin(), kl.end()) - kl.begin()] = 1.0;
  candidates.push_back(onehot);
  for (double tau : {1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4}) {
    smooth_max(kl, tau, &pi);
    candidates.push_back(pi);
  }
  if (auto lp_pi = linearized_dual(obj, kl, w)) candidates.push_back(*lp_pi);
  for (const auto& c : candidates) {
    obj.grad(c, g);
    double val = 0.0, gw = 0.0;
    for (std::size_t s = 0; s < kl.size(); ++s) val += c[s] * kl[s];
    for (std::size_t k = 0; k < w.size(); ++k) gw += g[k] * w[k];
    const double gmin = *std::min_element(g.begin(), g.end());
    best = std::max(best, val - (gw - gmin));
  }
  return best;
}

}  // namespace

BoxDivergenceReport box_kl(const Behavior& p, const Behavior& q) {
  if (!(p.scenario() == q.scenario())) throw DimensionError("box_kl: scenarios differ");
  BoxDivergenceReport r;
  r.per_setting.resize(p.num_settings());
  r.value = -1.0;
  for (int s = 0; s < p.num_settings(); ++s) {
    r.per_setting[s] = kl_bits(p.row(s), q.row(s));
    if (r.per_setting[s] > r.value) {
      r.value = r.per_setting[s];
      r.argmax_setting = s;
    }
  }
  r.argmax_digits = p.scenario().setting_digits(r.argmax_setting);
  return r;
}

double elr_lower_bound(const Behavior& p, const VertexCatalogue& cat, const std::vector<double>& weights) {
  ElrObjective obj(p, cat);
  if (static_cast<int>(weights.size()) != obj.num_vertices()) throw DimensionError("weights do not match catalogue");
  return lower_bound_at(obj, weights);
}

ElrResult relative_entropy_nl(const Behavior& p, const VertexCatalogue& cat, const ElrConfig& cfg) {
  if (!is_nonsignalling(p).ok) throw SignallingError("E_LR needs a box that is non-signalling across the wings");
  if (cfg.eps_ladder.empty() || cfg.temperatures.empty()) throw ValidationError("empty smoothing ladder");
  ElrObjective obj(p, cat);
  const int L = obj.num_vertices();

  std::vector<double> w(L, 1.0 / L);
  if (cfg.random_init) {
    std::mt19937_64 gen(cfg.seed);
    std::gamma_distribution<double> gam(1.0, 1.0);
    double total = 0.0;
    for (double& v : w) total += (v = gam(gen));
    for (double& v : w) v /= total;
  }

  std::vector<double> kl, pi, g, wn;
  ElrResult res(uniform_box(cat.scenario));
  double best_upper = kInf;
  std::vector<double> best_w;
  double best_lower = 0.0;
  bool last_stage_stalled = false;

  for (std::size_t rung = 0; rung < cfg.eps_ladder.size(); ++rung) {
    const double eps = cfg.eps_ladder[rung];
    // Later rungs are warm-started near the optimum; high temperatures
    // would only pull the iterate away again.
    std::vector<double> temps;
    for (double t : cfg.temperatures)
      if (rung == 0 || t <= 0.03 || t == cfg.temperatures.back()) temps.push_back(t);
    const int stage_budget = std::max(1, cfg.iters / static_cast<int>(temps.size()));
    int used = 0;

    auto value_at = [&](const std::vector<double>& x, double tau, std::vector<double>* weights_pi) {
      obj.mix(effective(x, eps));
      obj.kls(kl);
      return smooth_max(kl, tau, weights_pi);
    };

    for (double tau : temps) {
      double eta = tau;
      int flat = 0;
      last_stage_stalled = false;
      for (int it = 0; it < stage_budget; ++it) {
        const double F = value_at(w, tau, &pi);
        if (!std::isfinite(F)) break;
        obj.grad(pi, g);
        for (double& v : g) v *= (1.0 - eps);
        const double gmin = *std::min_element(g.begin(), g.end());
        double Fn = F;
        bool accepted = false;
        while (eta > 1e-14) {
          wn.resize(L);
          double z = 0.0;
          for (int k = 0; k < L; ++k) z += (wn[k] = w[k] * std::exp(-eta * (g[k] - gmin)));
          double lin = 0.0, div = 0.0;
          for (int k = 0; k < L; ++k) {
            wn[k] /= z;
            lin += g[k] * (wn[k] - w[k]);
            if (wn[k] > 0.0) div += wn[k] * std::log(wn[k] / w[k]);
          }
          Fn = value_at(wn, tau, nullptr);
          if (Fn <= F + lin + div / eta + 1e-15 * std::abs(F)) {
            accepted = true;
            break;
          }
          eta *= 0.5;
        }
        ++used;
        if (!accepted) {
          last_stage_stalled = true;
          break;
        }
        w.swap(wn);
        eta *= 1.3;
        if (F - Fn <= cfg.stall_tol * std::max(1.0, std::abs(F))) {
          if (++flat >= 50) {
            last_stage_stalled = true;
            break;
          }
        } else {
          flat = 0;
        }
      }
    }

    std::vector<double> we = effective(w, eps);
    obj.mix(we);
    obj.kls(kl);
    LadderEntry entry;
    entry.eps = eps;
    entry.upper = *std::max_element(kl.begin(), kl.end());
    entry.lower = lower_bound_at(obj, we);
    entry.iterations = used;
    res.ladder.push_back(entry);
    res.iterations += used;
    if (entry.upper < best_upper) {
      best_upper = entry.upper;
      best_w = we;
    }
    best_lower = std::max(best_lower, entry.lower);
  }

  if (best_w.empty() || !std::isfinite(best_upper)) {
    res.value = kInf;
    res.upper_bound = kInf;
    res.weights = effective(w, cfg.eps_ladder.back());
    throw OptimizationError("E_LR objective is infinite on the whole catalogue hull", res);
  }

  double estimate = res.ladder.back().upper;
  if (res.ladder.size() >= 2) {
    const LadderEntry& a = res.ladder[res.ladder.size() - 2];
    const LadderEntry& b = res.ladder.back();
    // The smoothing bias is linear in epsilon.
    estimate = b.upper - (a.upper - b.upper) * b.eps / (a.eps - b.eps);
  }
  res.upper_bound = best_upper;
  res.lower_bound = std::min(best_lower, best_upper);
  res.value = std::clamp(estimate, res.lower_bound, res.upper_bound);
  res.tolerance = res.upper_bound - res.lower_bound;
  res.weights = best_w;
  res.witness = combine(cat, best_w);
  res.argmax_setting = box_kl(p, res.witness).argmax_setting;
  res.converged = last_stage_stalled;
  return res;
}

ChainRuleReport verify_chain_rule_box(const Behavior& p4, const Behavior& q4, std::array<int, 4> inputs) {
  if (!(p4.scenario() == q4.scenario())) throw DimensionError("chain rule: scenarios differ");
  const Scenario& sc = p4.scenario();
  if (sc.num_sites() != 4 || sc.alice_sites() != 2) throw DimensionError("chain rule needs sites A0 A1 B0 B1");
  const int pair0[2] = {0, 2};
  if (!is_nonsignalling(p4, pair0).ok || !is_nonsignalling(q4, pair0).ok)
    throw SignallingError("chain rule needs boxes that are non-signalling across the pairs");
  const auto [x0, x1, y0, y1] = inputs;
  const int digits[4] = {x0, x1, y0, y1};
  const int s = sc.setting_index(digits);

  ChainRuleReport r;
  r.lhs = kl_bits(p4.row(s), q4.row(s));

  const auto& st = sc.sites();
  const int o0 = st[0].outputs, ob0 = st[2].outputs, o1 = st[1].outputs, ob1 = st[3].outputs;
  std::vector<double> pm(static_cast<std::size_t>(o0) * ob0, 0.0), qm(pm.size(), 0.0);
  for (int o = 0; o < sc.num_outcomes(); ++o) {
    auto od = sc.outcome_digits(o);
    pm[od[0] * ob0 + od[2]] += p4(s, o);
    qm[od[0] * ob0 + od[2]] += q4(s, o);
  }
  r.marginal_term = kl_bits(pm, qm);
  for (int a0 = 0; a0 < o0; ++a0)
    for (int b0 = 0; b0 < ob0; ++b0) {
      const double w = pm[a0 * ob0 + b0];
      if (w <= kConditionGuard) continue;
      if (qm[a0 * ob0 + b0] <= kConditionGuard) {
        r.conditional_term = kInf;
        continue;
      }
      ProbVector pc = condition_on_pair0(p4, a0, b0, x0, y0, x1, y1);
      ProbVector qc = condition_on_pair0(q4, a0, b0, x0, y0, x1, y1);
      r.conditional_term += w * kl_divergence(pc, qc);
    }
  (void)o1;
  (void)ob1;
  r.finite = std::isfinite(r.lhs) && std::isfinite(r.marginal_term) && std::isfinite(r.conditional_term);
  r.residual = r.finite ? std::abs(r.lhs - (r.marginal_term + r.conditional_term)) : 0.0;
  return r;
}

Behavior conditional_pair1_box(const Behavior& b4, int x0, int y0, int a0, int b0) {
  const auto& st = b4.scenario().sites();
  Scenario pair = Scenario::bipartite(st[1], st[3]);
  std::vector<double> t;
  t.reserve(pair.table_size());
  for (int x1 = 0; x1 < st[1].inputs; ++x1)
    for (int y1 = 0; y1 < st[3].inputs; ++y1) {
      ProbVector c = condition_on_pair0(b4, a0, b0, x0, y0, x1, y1);
      t.insert(t.end(), c.vec().begin(), c.vec().end());
    }
  return Behavior(pair, std::move(t));
}

ConditionalBoxReport verify_conditional_boxes(const Behavior& p4, const Behavior& q4,
                                                  const MembershipSolver& lrns, const MembershipSolver& local2) {
  if (!lrns.solve(q4).inside) throw PreconditionError("q4 is not in LR_ns");
  const int pair0[2] = {0, 2};
  if (!is_nonsignalling(p4, pair0).ok) throw PreconditionError("p4 signals across the pairs");
  const auto& st = p4.scenario().sites();
  const int m0 = st[0].inputs, n0 = st[2].inputs, o0 = st[0].outputs, ob0 = st[2].outputs;

  ConditionalBoxReport r;
  Behavior pair1 = marginal_pair(p4, 1);
  r.pair_marginal_local = local2.solve(pair1).inside;
  r.nonlocal_conditional_ok = true;
  r.candidate_conditionals_local = true;
  r.gap_positive = true;
  Behavior pm = marginal_pair(p4, 0);
  Behavior qm = marginal_pair(q4, 0);
  for (int x0 = 0; x0 < m0; ++x0)
    for (int y0 = 0; y0 < n0; ++y0) {
      const int s0 = x0 * n0 + y0;
      std::array<int, 2> witness{-1, -1};
      // per (x1,y1) accumulated conditional divergence
      std::vector<double> b3(static_cast<std::size_t>(st[1].inputs) * st[3].inputs, 0.0);
      for (int a0 = 0; a0 < o0; ++a0)
        for (int b0 = 0; b0 < ob0; ++b0) {
          const int out0 = a0 * ob0 + b0;
          const double wp = pm(s0, out0), wq = qm(s0, out0);
          std::optional<Behavior> pc;
          if (wp > kConditionGuard) {
            pc = conditional_pair1_box(p4, x0, y0, a0, b0);
            if (!r.pair_marginal_local && witness[0] < 0 && !local2.solve(*pc).inside) witness = {a0, b0};
          }
          if (wq > kConditionGuard) {
            Behavior qc = conditional_pair1_box(q4, x0, y0, a0, b0);
            ++r.conditionals_checked;
            if (!local2.solve(qc).inside) r.candidate_conditionals_local = false;
            if (pc)
              for (int s1 = 0; s1 < pc->num_settings(); ++s1) b3[s1] += wp * kl_bits(pc->row(s1), qc.row(s1));
          } else if (pc) {
            for (double& v : b3) v = kInf;
          }
        }
      r.nonlocal_conditional_witness.push_back(witness);
      if (!r.pair_marginal_local && witness[0] < 0) r.nonlocal_conditional_ok = false;
      const double mx = *std::max_element(b3.begin(), b3.end());
      r.gap_values.push_back(mx);
      if (!(mx > 0.0)) r.gap_positive = false;
    }
  if (r.pair_marginal_local) r.nonlocal_conditional_ok = false;
  return r;
}

BroadcastGapReport broadcast_gap(const Behavior& p4, const Behavior& p2, const VertexCatalogue& cat4,
                      const VertexCatalogue& cat2, const ElrConfig& cfg) {
  if (!is_broadcast_of(p4, p2)) throw PreconditionError("p4 is not a broadcast of p2");
  BroadcastGapReport r{relative_entropy_nl(p4, cat4, cfg), relative_entropy_nl(p2, cat2, cfg)};
  r.p2_nonlocal = !membership(p2, local_deterministic_vertices(p2.scenario())).inside;
  r.gap = r.elr_p4.value - r.elr_p2.value;
  r.combined_tolerance = r.elr_p4.tolerance + r.elr_p2.tolerance;
  r.gap_significant = r.gap > r.combined_tolerance;
  return r;
}

}  // namespace boxcast
