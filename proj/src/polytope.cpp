#include "boxcast/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "boxcast/errors.hpp"
#include "boxcast/simplex.hpp"

#include <Eigen/Dense>

namespace boxcast {

std::string to_string(CatalogueKind k) {
  switch (k) {
    case CatalogueKind::local_deterministic: return "local-deterministic";
    case CatalogueKind::ns_222: return "ns-222";
    case CatalogueKind::lrns_product: return "lrns-product";
    case CatalogueKind::custom: return "custom";
  }
  return "custom";
}

namespace {

// Number of maps from n inputs to o outputs, guarded against the cap.
std::size_t strategy_count(int inputs, int outputs, std::size_t cap) {
  std::size_t c = 1;
  for (int i = 0; i < inputs; ++i) {
    c *= static_cast<std::size_t>(outputs);
    if (c > cap) throw CapacityError("catalogue exceeds cap of " + std::to_string(cap) + " vertices");
  }
  return c;
}

}  // namespace

VertexCatalogue local_deterministic_vertices(const Scenario& sc, std::size_t cap) {
  const int ma = sc.alice_inputs(), mb = sc.bob_inputs();
  const int oa = sc.alice_outputs(), ob = sc.bob_outputs();
  const std::size_t na = strategy_count(ma, oa, cap);
  const std::size_t nb = strategy_count(mb, ob, cap);
  if (na * nb > cap) throw CapacityError("catalogue exceeds cap of " + std::to_string(cap) + " vertices");
  VertexCatalogue cat{sc, {}, CatalogueKind::local_deterministic};
  cat.vertices.reserve(na * nb);
  std::vector<int> fa(ma), fb(mb);
  for (std::size_t ia = 0; ia < na; ++ia) {
    std::size_t r = ia;
    for (int x = ma - 1; x >= 0; --x) {
      fa[x] = static_cast<int>(r % oa);
      r /= oa;
    }
    for (std::size_t ib = 0; ib < nb; ++ib) {
      std::size_t q = ib;
      for (int y = mb - 1; y >= 0; --y) {
        fb[y] = static_cast<int>(q % ob);
        q /= ob;
      }
      std::vector<double> t(sc.table_size(), 0.0);
      for (int x = 0; x < ma; ++x)
        for (int y = 0; y < mb; ++y)
          t[(static_cast<std::size_t>(x) * mb + y) * (oa * ob) + fa[x] * ob + fb[y]] = 1.0;
      cat.vertices.emplace_back(sc, std::move(t));
    }
  }
  return cat;
}

Behavior nonlocal_ns_vertex(int alpha, int beta, int gamma) {
  std::vector<double> t(16, 0.0);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          if ((a ^ b) == ((x & y) ^ (alpha & x) ^ (beta & y) ^ gamma)) t[(x * 2 + y) * 4 + a * 2 + b] = 0.5;
  return Behavior(Scenario::bipartite(), std::move(t));
}

VertexCatalogue ns_vertices_222() {
  VertexCatalogue cat = local_deterministic_vertices(Scenario::bipartite());
  cat.kind = CatalogueKind::ns_222;
  for (int alpha = 0; alpha < 2; ++alpha)
    for (int beta = 0; beta < 2; ++beta)
      for (int gamma = 0; gamma < 2; ++gamma) cat.vertices.push_back(nonlocal_ns_vertex(alpha, beta, gamma));
  return cat;
}

VertexCatalogue lrns_vertices(const VertexCatalogue& wing_a, const VertexCatalogue& wing_b, std::size_t cap) {
  if (wing_a.vertices.empty() || wing_b.vertices.empty()) throw ValidationError("empty wing catalogue");
  if (wing_a.size() * wing_b.size() > cap)
    throw CapacityError("catalogue exceeds cap of " + std::to_string(cap) + " vertices");
  Behavior first = wing_product(wing_a.vertices[0], wing_b.vertices[0]);
  VertexCatalogue cat{first.scenario(), {}, CatalogueKind::lrns_product};
  cat.vertices.reserve(wing_a.size() * wing_b.size());
  for (const Behavior& qa : wing_a.vertices)
    for (const Behavior& qb : wing_b.vertices) cat.vertices.push_back(wing_product(qa, qb));
  return cat;
}

VertexCatalogue lrns_broadcast_222() {
  VertexCatalogue ns = ns_vertices_222();
  return lrns_vertices(ns, ns);
}

Behavior combine(const VertexCatalogue& cat, const std::vector<double>& weights) {
  if (weights.size() != cat.size()) throw DimensionError("weights do not match catalogue");
  std::vector<double> t(cat.scenario.table_size(), 0.0);
  for (std::size_t k = 0; k < cat.size(); ++k) {
    if (weights[k] == 0.0) continue;
    const auto& v = cat.vertices[k].table();
    for (std::size_t i = 0; i < t.size(); ++i) t[i] += weights[k] * v[i];
  }
  return Behavior(cat.scenario, std::move(t));
}

MembershipSolver::MembershipSolver(const VertexCatalogue& cat) : cat_(cat) {
  if (cat.vertices.empty()) throw ValidationError("empty catalogue");
  const int E = static_cast<int>(cat.scenario.table_size());
  const std::size_t L = cat.size();
  barycenter_.assign(E, 0.0);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(E + 1, E + 1);
  columns_.reserve(L);
  for (const Behavior& v : cat.vertices) {
    if (!(v.scenario() == cat.scenario)) throw DimensionError("catalogue vertex with foreign scenario");
    SparseColumnData col;
    for (int i = 0; i < E; ++i)
      if (v.table()[i] != 0.0) {
        col.rows.push_back(i);
        col.values.push_back(v.table()[i]);
      }
    col.rows.push_back(E);
    col.values.push_back(1.0);
    for (std::size_t a = 0; a < col.rows.size(); ++a)
      for (std::size_t b = 0; b < col.rows.size(); ++b)
        gram(col.rows[a], col.rows[b]) += col.values[a] * col.values[b];
    columns_.push_back(std::move(col));
  }
  gram /= static_cast<double>(L);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  const double cut = 1e-10 * std::max(1.0, es.eigenvalues().maxCoeff());
  for (int k = 0; k < E + 1; ++k)
    if (es.eigenvalues()(k) <= cut) {
      Eigen::VectorXd z = es.eigenvectors().col(k);
      null_rows_.emplace_back(z.data(), z.data() + z.size());
    }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
  lu.setThreshold(1e-10);
  const int r = static_cast<int>(lu.rank());
  for (int k = 0; k < r; ++k) kept_rows_.push_back(lu.permutationQ().indices()(k));
  std::sort(kept_rows_.begin(), kept_rows_.end());

  // The LP centre is a random positive mix of rank-many affinely independent
  // vertices. It is interior, generic (the barycenter is highly degenerate),
  // and those vertices form a feasible starting basis.
  std::vector<int> slot(E + 1, -1);
  for (std::size_t k = 0; k < kept_rows_.size(); ++k) slot[kept_rows_[k]] = static_cast<int>(k);
  std::mt19937_64 gen(0x5eed);
  std::vector<int> order(L);
  for (std::size_t k = 0; k < L; ++k) order[k] = static_cast<int>(k);
  std::shuffle(order.begin(), order.end(), gen);
  Eigen::MatrixXd q(r, r);
  int accepted = 0;
  for (int k : order) {
    if (accepted == r) break;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(r);
    const SparseColumnData& col = columns_[k];
    for (std::size_t t = 0; t < col.rows.size(); ++t)
      if (slot[col.rows[t]] >= 0) v(slot[col.rows[t]]) = col.values[t];
    const double norm = v.norm();
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j < accepted; ++j) v -= q.col(j).dot(v) * q.col(j);
    if (v.norm() <= 1e-8 * norm) continue;
    q.col(accepted++) = v / v.norm();
    start_vertices_.push_back(k);
  }
  if (accepted != r) throw SolverError("could not find an affinely independent vertex set");
  std::uniform_real_distribution<double> unif(0.5, 1.5);
  std::vector<double> mixw(r);
  double total = 0.0;
  for (double& v : mixw) total += (v = unif(gen));
  barycenter_.assign(E, 0.0);
  for (int j = 0; j < r; ++j) {
    const SparseColumnData& col = columns_[start_vertices_[j]];
    for (std::size_t t = 0; t + 1 < col.rows.size(); ++t) barycenter_[col.rows[t]] += mixw[j] / total * col.values[t];
  }
}

// Visibility LP on the independent rows of [V; 1]: maximize nu subject to
//   sum_k w_k V_k - nu (b - c) = c,  sum_k w_k = 1,  nu + s = 1,  w, nu, s >= 0
// with c the catalogue barycenter. b is inside iff nu* = 1. The duals give a
// functional g with g.V_k <= -t for every vertex and g.(b - c) >= 1.
MembershipResult MembershipSolver::solve(const Behavior& query, double tol) const {
  if (!(query.scenario() == cat_.scenario)) throw DimensionError("query and catalogue scenarios differ");
  Behavior b = normalized_per_setting(query);
  const int E = static_cast<int>(b.table().size());
  const std::size_t L = cat_.size();
  std::vector<double> d(E);
  for (int i = 0; i < E; ++i) d[i] = b.table()[i] - barycenter_[i];

  auto finish_outside = [&](MembershipResult& res, std::vector<double> f) {
    double worst = -1e300;
    for (const Behavior& v : cat_.vertices) {
      double s = 0.0;
      for (int i = 0; i < E; ++i) s += f[i] * v.table()[i];
      worst = std::max(worst, s);
    }
    double fb = 0.0;
    for (int i = 0; i < E; ++i) fb += f[i] * b.table()[i];
    res.functional.coefficients = std::move(f);
    res.functional.threshold = worst;
    res.margin = fb - worst;
    if (!(res.margin > 0.0)) throw SolverError("separating functional does not separate (margin " + std::to_string(res.margin) + ", visibility " + std::to_string(res.visibility) + ")", res.margin);
  };

  // Outside the affine hull: a null relation of the vertices separates.
  for (const auto& z : null_rows_) {
    double v = 0.0;
    for (int i = 0; i < E; ++i) v += z[i] * d[i];
    if (std::abs(v) > 1e-9) {
      MembershipResult res;
      std::vector<double> f(z.begin(), z.begin() + E);
      if (v < 0)
        for (double& x : f) x = -x;
      finish_outside(res, std::move(f));
      return res;
    }
  }

  std::vector<int> slot(E + 1, -1);
  for (std::size_t k = 0; k < kept_rows_.size(); ++k) slot[kept_rows_[k]] = static_cast<int>(k);
  const int m = static_cast<int>(kept_rows_.size());
  LpProblem lp;
  lp.num_rows = m + 1;
  lp.rhs.resize(m + 1);
  for (int k = 0; k < m; ++k) lp.rhs[k] = kept_rows_[k] == E ? 1.0 : barycenter_[kept_rows_[k]];
  lp.rhs[m] = 1.0;
  lp.columns.reserve(L + 2);
  for (const SparseColumnData& c : columns_) {
    SparseColumn col;
    for (std::size_t t = 0; t < c.rows.size(); ++t)
      if (slot[c.rows[t]] >= 0) {
        col.rows.push_back(slot[c.rows[t]]);
        col.values.push_back(c.values[t]);
      }
    lp.columns.push_back(std::move(col));
    lp.cost.push_back(0.0);
  }
  SparseColumn nu;
  for (int i = 0; i < E; ++i)
    if (slot[i] >= 0 && d[i] != 0.0) {
      nu.rows.push_back(slot[i]);
      nu.values.push_back(-d[i]);
    }
  nu.rows.push_back(m);
  nu.values.push_back(1.0);
  lp.columns.push_back(std::move(nu));
  lp.cost.push_back(-1.0);
  lp.columns.push_back(SparseColumn{{m}, {1.0}});
  lp.cost.push_back(0.0);

  lp.start_basis = start_vertices_;
  lp.start_basis.push_back(static_cast<int>(L) + 1);
  LpOptions opt;
  if (L > 8192) opt.pricing_chunk = 2048;
  LpSolution sol = solve_lp(lp, opt);
  if (sol.status != LpStatus::optimal)
    throw SolverError("membership LP did not reach optimality (status " +
                          std::to_string(static_cast<int>(sol.status)) + ", " + std::to_string(sol.iterations) +
                          " pivots)",
                      sol.primal_residual);
  if (sol.primal_residual > 1e-7) throw SolverError("membership LP residual too large", sol.primal_residual);

  MembershipResult res;
  res.lp_iterations = sol.iterations;
  res.visibility = sol.x[L];
  if (res.visibility >= 1.0 - tol) {
    res.inside = true;
    res.weights.assign(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(L));
    double total = 0.0;
    for (double w : res.weights) total += w;
    for (double& w : res.weights) w /= total;
    std::vector<double> rec(E, 0.0);
    for (std::size_t k = 0; k < L; ++k) {
      if (res.weights[k] == 0.0) continue;
      for (int i = 0; i < E; ++i) rec[i] += res.weights[k] * cat_.vertices[k].table()[i];
    }
    for (int i = 0; i < E; ++i) res.residual = std::max(res.residual, std::abs(rec[i] - b.table()[i]));
    res.margin = res.visibility - 1.0;
    return res;
  }
  std::vector<double> f(E, 0.0);
  for (int i = 0; i < E; ++i)
    if (slot[i] >= 0) f[i] = sol.duals[slot[i]];
  finish_outside(res, std::move(f));
  return res;
}

MembershipResult membership(const Behavior& b, const VertexCatalogue& cat, double tol) {
  return MembershipSolver(cat).solve(b, tol);
}

}  // namespace boxcast
