#include "boxcast/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "boxcast/errors.hpp"

namespace boxcast {

Scenario::Scenario(std::vector<Site> sites, std::vector<std::vector<int>> grouping)
    : sites_(std::move(sites)), grouping_(std::move(grouping)) {
  if (sites_.empty()) throw ValidationError("scenario without sites");
  for (const Site& s : sites_)
    if (s.inputs < 1 || s.outputs < 1) throw ValidationError("site cardinalities must be >= 1");
  if (grouping_.size() != 2 || grouping_[0].empty() || grouping_[1].empty())
    throw ValidationError("grouping must split sites into two non-empty wings");
  int k = 0;
  for (const auto& cell : grouping_)
    for (int s : cell) {
      if (s != k) throw ValidationError("grouping must list Alice's sites first, in site order");
      ++k;
    }
  if (k != num_sites()) throw ValidationError("grouping does not cover every site exactly once");
  for (int s : grouping_[0]) {
    ma_ *= sites_[s].inputs;
    oa_ *= sites_[s].outputs;
  }
  for (int s : grouping_[1]) {
    mb_ *= sites_[s].inputs;
    ob_ *= sites_[s].outputs;
  }
}

Scenario Scenario::bipartite(Site a, Site b) { return Scenario({a, b}, {{0}, {1}}); }

Scenario Scenario::broadcast(Site a, Site b) { return Scenario({a, a, b, b}, {{0, 1}, {2, 3}}); }

std::vector<int> Scenario::setting_digits(int s) const {
  std::vector<int> d(sites_.size());
  for (int i = num_sites() - 1; i >= 0; --i) {
    d[i] = s % sites_[i].inputs;
    s /= sites_[i].inputs;
  }
  return d;
}

std::vector<int> Scenario::outcome_digits(int o) const {
  std::vector<int> d(sites_.size());
  for (int i = num_sites() - 1; i >= 0; --i) {
    d[i] = o % sites_[i].outputs;
    o /= sites_[i].outputs;
  }
  return d;
}

int Scenario::setting_index(std::span<const int> digits) const {
  int s = 0;
  for (int i = 0; i < num_sites(); ++i) s = s * sites_[i].inputs + digits[i];
  return s;
}

int Scenario::outcome_index(std::span<const int> digits) const {
  int o = 0;
  for (int i = 0; i < num_sites(); ++i) o = o * sites_[i].outputs + digits[i];
  return o;
}

Scenario Scenario::restrict(std::span<const int> keep) const {
  std::vector<Site> s;
  std::vector<std::vector<int>> g(2);
  int prev = -1;
  for (int k : keep) {
    if (k <= prev || k >= num_sites()) throw DimensionError("site subset must be increasing and in range");
    prev = k;
    int cell = k < alice_sites() ? 0 : 1;
    g[cell].push_back(static_cast<int>(s.size()));
    s.push_back(sites_[k]);
  }
  return Scenario(std::move(s), std::move(g));
}

bool Scenario::is_broadcast_shape() const {
  return num_sites() == 4 && alice_sites() == 2 && sites_[0] == sites_[1] && sites_[2] == sites_[3];
}

Behavior::Behavior(Scenario sc, std::vector<double> table) : sc_(std::move(sc)), t_(std::move(table)) {
  if (t_.size() != sc_.table_size())
    throw DimensionError("behavior table has " + std::to_string(t_.size()) + " entries, scenario needs " +
                         std::to_string(sc_.table_size()));
  const int no = num_outcomes();
  for (int s = 0; s < num_settings(); ++s) {
    double total = 0.0;
    for (int o = 0; o < no; ++o) {
      double& v = t_[static_cast<std::size_t>(s) * no + o];
      if (!std::isfinite(v) || v < -kSimplexTol) throw ValidationError("behavior entry outside [0,1]");
      if (v < 0.0) v = 0.0;
      total += v;
    }
    if (std::abs(total - 1.0) > kNormTol)
      throw ValidationError("behavior setting " + std::to_string(s) + " sums to " + std::to_string(total));
  }
}

namespace {

// Marginal table over `keep` sites for every full setting, plus its
// worst dependence on the discarded inputs.
struct MarginalScan {
  std::vector<double> table;  // [reduced setting][reduced outcome], at reference 0
  double violation = 0.0;
};

MarginalScan scan_marginal(const Behavior& b, std::span<const int> keep) {
  const Scenario& sc = b.scenario();
  Scenario red = sc.restrict(keep);
  const int n = sc.num_sites();
  std::vector<char> kept(n, 0);
  for (int k : keep) kept[k] = 1;

  const int rs = red.num_settings(), ro = red.num_outcomes();
  // full[s][o_red] for every full setting s
  std::vector<double> full(static_cast<std::size_t>(b.num_settings()) * ro, 0.0);
  std::vector<int> rd(keep.size());
  for (int o = 0; o < b.num_outcomes(); ++o) {
    auto od = sc.outcome_digits(o);
    for (std::size_t i = 0; i < keep.size(); ++i) rd[i] = od[keep[i]];
    int oi = red.outcome_index(rd);
    for (int s = 0; s < b.num_settings(); ++s) full[static_cast<std::size_t>(s) * ro + oi] += b(s, o);
  }
  MarginalScan out;
  out.table.assign(static_cast<std::size_t>(rs) * ro, 0.0);
  for (int s = 0; s < b.num_settings(); ++s) {
    auto sd = sc.setting_digits(s);
    bool reference = true;
    for (int i = 0; i < n; ++i)
      if (!kept[i] && sd[i] != 0) reference = false;
    for (std::size_t i = 0; i < keep.size(); ++i) rd[i] = sd[keep[i]];
    int si = red.setting_index(rd);
    if (reference)
      std::copy_n(full.begin() + static_cast<std::ptrdiff_t>(s) * ro, ro,
                  out.table.begin() + static_cast<std::ptrdiff_t>(si) * ro);
  }
  for (int s = 0; s < b.num_settings(); ++s) {
    auto sd = sc.setting_digits(s);
    for (std::size_t i = 0; i < keep.size(); ++i) rd[i] = sd[keep[i]];
    int si = red.setting_index(rd);
    for (int o = 0; o < ro; ++o)
      out.violation = std::max(out.violation, std::abs(full[static_cast<std::size_t>(s) * ro + o] -
                                                       out.table[static_cast<std::size_t>(si) * ro + o]));
  }
  return out;
}

std::vector<int> complement(int n, std::span<const int> cell) {
  std::vector<char> in(n, 0);
  for (int c : cell) in.at(c) = 1;
  std::vector<int> out;
  for (int i = 0; i < n; ++i)
    if (!in[i]) out.push_back(i);
  return out;
}

}  // namespace

NsReport is_nonsignalling(const Behavior& b, std::span<const int> cell) {
  const Scenario& sc = b.scenario();
  std::vector<int> first(cell.begin(), cell.end());
  if (first.empty()) first = sc.grouping()[0];
  std::sort(first.begin(), first.end());
  std::vector<int> second = complement(sc.num_sites(), first);
  if (second.empty()) throw ValidationError("partition cell must be a proper subset of sites");
  auto violation = [&](const std::vector<int>& keep) {
    const int n = sc.num_sites();
    std::vector<char> kept(n, 0);
    for (int k : keep) kept[k] = 1;
    int ro = 1, rs = 1;
    for (int k : keep) {
      ro *= sc.sites()[k].outputs;
      rs *= sc.sites()[k].inputs;
    }
    auto red_index = [&](const std::vector<int>& d, bool inputs) {
      int idx = 0;
      for (int k : keep) idx = idx * (inputs ? sc.sites()[k].inputs : sc.sites()[k].outputs) + d[k];
      return idx;
    };
    std::vector<double> full(static_cast<std::size_t>(b.num_settings()) * ro, 0.0);
    std::vector<int> out_red(b.num_outcomes());
    for (int o = 0; o < b.num_outcomes(); ++o) out_red[o] = red_index(sc.outcome_digits(o), false);
    for (int s = 0; s < b.num_settings(); ++s)
      for (int o = 0; o < b.num_outcomes(); ++o) full[static_cast<std::size_t>(s) * ro + out_red[o]] += b(s, o);
    std::vector<int> ref(rs, -1);
    double worst = 0.0;
    for (int s = 0; s < b.num_settings(); ++s) {
      int si = red_index(sc.setting_digits(s), true);
      if (ref[si] < 0) {
        ref[si] = s;
        continue;
      }
      for (int o = 0; o < ro; ++o)
        worst = std::max(worst, std::abs(full[static_cast<std::size_t>(s) * ro + o] -
                                         full[static_cast<std::size_t>(ref[si]) * ro + o]));
    }
    return worst;
  };
  double v = std::max(violation(first), violation(second));
  return {v <= kMarginalTol, v};
}

Behavior marginal(const Behavior& b, std::span<const int> keep, double tol) {
  MarginalScan m = scan_marginal(b, keep);
  if (m.violation > tol)
    throw SignallingError("marginal depends on discarded inputs (violation " + std::to_string(m.violation) + ")");
  return Behavior(b.scenario().restrict(keep), std::move(m.table));
}

Behavior marginal_pair(const Behavior& b4, int pair) {
  if (b4.scenario().num_sites() != 4 || b4.scenario().alice_sites() != 2)
    throw DimensionError("marginal_pair needs sites A0 A1 B0 B1");
  if (pair != 0 && pair != 1) throw DimensionError("pair must be 0 or 1");
  const int keep[2] = {pair, 2 + pair};
  return marginal(b4, keep);
}

bool is_broadcast_of(const Behavior& b4, const Behavior& b2) {
  for (int pair = 0; pair < 2; ++pair) {
    Behavior m = marginal_pair(b4, pair);
    if (!(m.scenario() == b2.scenario())) throw DimensionError("pair marginal and target scenario differ");
    if (max_abs_diff(m, b2) > kMarginalTol) return false;
  }
  return true;
}

ProbVector condition_on_pair0(const Behavior& b4, int a0, int b0, int x0, int y0, int x1, int y1) {
  const Scenario& sc = b4.scenario();
  if (sc.num_sites() != 4 || sc.alice_sites() != 2) throw DimensionError("conditioning needs sites A0 A1 B0 B1");
  const auto& st = sc.sites();
  const int sd[4] = {x0, x1, y0, y1};
  for (int i = 0; i < 4; ++i)
    if (sd[i] < 0 || sd[i] >= st[i].inputs) throw DimensionError("input out of range");
  if (a0 < 0 || a0 >= st[0].outputs || b0 < 0 || b0 >= st[2].outputs) throw DimensionError("output out of range");
  const int s = sc.setting_index(sd);
  const int o1 = st[1].outputs, ob1 = st[3].outputs;
  std::vector<double> joint(static_cast<std::size_t>(o1) * ob1);
  double norm = 0.0;
  for (int a1 = 0; a1 < o1; ++a1)
    for (int b1 = 0; b1 < ob1; ++b1) {
      const int od[4] = {a0, a1, b0, b1};
      double v = b4(s, sc.outcome_index(od));
      joint[static_cast<std::size_t>(a1) * ob1 + b1] = v;
      norm += v;
    }
  if (norm <= kConditionGuard) throw ConditioningError("conditioning event has probability " + std::to_string(norm));
  for (double& v : joint) v /= norm;
  return ProbVector(std::move(joint));
}

Behavior pr_box() {
  std::vector<double> t(16, 0.0);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          if ((a ^ b) == (x & y)) t[(x * 2 + y) * 4 + a * 2 + b] = 0.5;
  return Behavior(Scenario::bipartite(), std::move(t));
}

Behavior uniform_box(const Scenario& sc) {
  return Behavior(sc, std::vector<double>(sc.table_size(), 1.0 / sc.num_outcomes()));
}

Behavior deterministic_box(const Scenario& sc, std::span<const std::vector<int>> responses) {
  if (static_cast<int>(responses.size()) != sc.num_sites()) throw DimensionError("one response per site");
  for (int i = 0; i < sc.num_sites(); ++i) {
    if (static_cast<int>(responses[i].size()) != sc.sites()[i].inputs)
      throw DimensionError("response must list an output per input");
    for (int v : responses[i])
      if (v < 0 || v >= sc.sites()[i].outputs) throw DimensionError("response output out of range");
  }
  std::vector<double> t(sc.table_size(), 0.0);
  std::vector<int> od(sc.num_sites());
  for (int s = 0; s < sc.num_settings(); ++s) {
    auto sd = sc.setting_digits(s);
    for (int i = 0; i < sc.num_sites(); ++i) od[i] = responses[i][sd[i]];
    t[static_cast<std::size_t>(s) * sc.num_outcomes() + sc.outcome_index(od)] = 1.0;
  }
  return Behavior(sc, std::move(t));
}

Behavior product(const Behavior& p, const Behavior& q) {
  const Scenario& ps = p.scenario();
  const Scenario& qs = q.scenario();
  if (ps.num_sites() != 2 || qs.num_sites() != 2) throw DimensionError("product expects two bipartite boxes");
  const auto& P = ps.sites();
  const auto& Q = qs.sites();
  Scenario out({P[0], Q[0], P[1], Q[1]}, {{0, 1}, {2, 3}});
  std::vector<double> t(out.table_size());
  for (int s = 0; s < out.num_settings(); ++s) {
    auto sd = out.setting_digits(s);
    int sp = sd[0] * P[1].inputs + sd[2];
    int sq = sd[1] * Q[1].inputs + sd[3];
    for (int o = 0; o < out.num_outcomes(); ++o) {
      auto od = out.outcome_digits(o);
      t[static_cast<std::size_t>(s) * out.num_outcomes() + o] =
          p(sp, od[0] * P[1].outputs + od[2]) * q(sq, od[1] * Q[1].outputs + od[3]);
    }
  }
  return Behavior(std::move(out), std::move(t));
}

Behavior wing_product(const Behavior& qa, const Behavior& qb) {
  std::vector<Site> sites = qa.scenario().sites();
  const int na = static_cast<int>(sites.size());
  for (const Site& s : qb.scenario().sites()) sites.push_back(s);
  std::vector<std::vector<int>> g(2);
  for (int i = 0; i < static_cast<int>(sites.size()); ++i) g[i < na ? 0 : 1].push_back(i);
  Scenario out(std::move(sites), std::move(g));
  const int ma = qa.num_settings(), mb = qb.num_settings();
  const int oa = qa.num_outcomes(), ob = qb.num_outcomes();
  std::vector<double> t(out.table_size());
  for (int x = 0; x < ma; ++x)
    for (int y = 0; y < mb; ++y)
      for (int a = 0; a < oa; ++a)
        for (int b = 0; b < ob; ++b)
          t[(static_cast<std::size_t>(x) * mb + y) * (oa * ob) + a * ob + b] = qa(x, a) * qb(y, b);
  return Behavior(std::move(out), std::move(t));
}

Behavior mix(std::span<const Behavior> parts, std::span<const double> weights) {
  if (parts.empty() || parts.size() != weights.size()) throw DimensionError("mix: parts and weights differ");
  std::vector<double> t(parts[0].table().size(), 0.0);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (!(parts[k].scenario() == parts[0].scenario())) throw DimensionError("mix: scenarios differ");
    for (std::size_t i = 0; i < t.size(); ++i) t[i] += weights[k] * parts[k].table()[i];
  }
  return Behavior(parts[0].scenario(), std::move(t));
}

double max_abs_diff(const Behavior& p, const Behavior& q) {
  if (!(p.scenario() == q.scenario())) throw DimensionError("scenarios differ");
  double d = 0.0;
  for (std::size_t i = 0; i < p.table().size(); ++i) d = std::max(d, std::abs(p.table()[i] - q.table()[i]));
  return d;
}

Behavior normalized_per_setting(const Behavior& b) {
  std::vector<double> t = b.table();
  const int no = b.num_outcomes();
  for (int s = 0; s < b.num_settings(); ++s) {
    double total = 0.0;
    for (int o = 0; o < no; ++o) total += t[static_cast<std::size_t>(s) * no + o];
    for (int o = 0; o < no; ++o) t[static_cast<std::size_t>(s) * no + o] /= total;
  }
  return Behavior(b.scenario(), std::move(t));
}

}  // namespace boxcast
