#include "boxcast/losr.hpp"

#include <algorithm>
#include <cmath>

#include "boxcast/divergence.hpp"
#include "boxcast/errors.hpp"
#include "boxcast/parallel.hpp"
#include "boxcast/random.hpp"

namespace boxcast {

Conditional::Conditional(int rows, int cols, std::vector<double> p) : rows_(rows), cols_(cols), p_(std::move(p)) {
  if (rows <= 0 || cols <= 0) throw DimensionError("conditional needs positive shape");
  if (p_.size() != static_cast<std::size_t>(rows) * cols) throw DimensionError("conditional size mismatch");
  for (int r = 0; r < rows; ++r) {
    double s = 0.0;
    for (int c = 0; c < cols; ++c) {
      double& v = p_[static_cast<std::size_t>(r) * cols + c];
      if (!(v >= -1e-12) || !std::isfinite(v)) throw ValidationError("conditional entry is negative or not finite");
      v = std::max(v, 0.0);
      s += v;
    }
    if (std::abs(s - 1.0) > kNormTol) throw ValidationError("conditional row does not sum to 1");
  }
}

Conditional Conditional::deterministic(int rows, int cols, const std::vector<int>& choice) {
  if (static_cast<int>(choice.size()) != rows) throw DimensionError("one choice per row expected");
  std::vector<double> p(static_cast<std::size_t>(rows) * cols, 0.0);
  for (int r = 0; r < rows; ++r) {
    if (choice[r] < 0 || choice[r] >= cols) throw DimensionError("choice out of range");
    p[static_cast<std::size_t>(r) * cols + choice[r]] = 1.0;
  }
  return Conditional(rows, cols, std::move(p));
}

namespace {

void check_wing(const WingProcessing& w, int out_settings, int out_outcomes, int in_settings, int in_outcomes) {
  if (w.pre.rows() != out_settings || w.pre.cols() != in_settings)
    throw DimensionError("pre-processing table has the wrong shape");
  if (w.post.rows() != out_settings * in_settings * in_outcomes || w.post.cols() != out_outcomes)
    throw DimensionError("post-processing table has the wrong shape");
}

// T[(xs * O + as) * (m * o) + x * o + a] = pre(x|xs) post(as|xs,x,a)
std::vector<double> wing_transfer(const WingProcessing& w, int S, int O, int m, int o) {
  std::vector<double> t(static_cast<std::size_t>(S) * O * m * o);
  for (int xs = 0; xs < S; ++xs)
    for (int as = 0; as < O; ++as)
      for (int x = 0; x < m; ++x)
        for (int a = 0; a < o; ++a)
          t[((static_cast<std::size_t>(xs) * O + as) * m + x) * o + a] =
              w.pre(xs, x) * w.post((xs * m + x) * o + a, as);
  return t;
}

Conditional dirichlet_conditional(Rng& rng, int rows, int cols, double alpha) {
  std::vector<double> p;
  p.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    std::vector<double> d = rng.dirichlet(cols, alpha);
    p.insert(p.end(), d.begin(), d.end());
  }
  return Conditional(rows, cols, std::move(p));
}

}  // namespace

LosrMap::LosrMap(Scenario input, Scenario output, std::vector<double> lambda_weights,
                 std::vector<WingProcessing> alice, std::vector<WingProcessing> bob)
    : in_(std::move(input)), out_(std::move(output)), alice_(std::move(alice)), bob_(std::move(bob)) {
  if (lambda_weights.empty() || static_cast<int>(lambda_weights.size()) > kMaxLambda)
    throw ValidationError("shared randomness must have between 1 and 64 values");
  r_ = validate_simplex(std::move(lambda_weights));
  if (alice_.size() != r_.size() || bob_.size() != r_.size())
    throw DimensionError("one wing processing per lambda expected");
  for (std::size_t l = 0; l < r_.size(); ++l) {
    check_wing(alice_[l], out_.alice_inputs(), out_.alice_outputs(), in_.alice_inputs(), in_.alice_outputs());
    check_wing(bob_[l], out_.bob_inputs(), out_.bob_outputs(), in_.bob_inputs(), in_.bob_outputs());
  }
}

Behavior apply(const LosrMap& m, const Behavior& p) {
  if (!(p.scenario() == m.input())) throw DimensionError("box does not match the map's input scenario");
  const Scenario& in = m.input();
  const Scenario& out = m.output();
  const int mx = in.alice_inputs(), my = in.bob_inputs(), oa = in.alice_outputs(), ob = in.bob_outputs();
  const int SA = out.alice_inputs(), SB = out.bob_inputs(), OA = out.alice_outputs(), OB = out.bob_outputs();
  const int ka = mx * oa, kb = my * ob;
  std::vector<double> table(out.table_size(), 0.0);
  // P as a (x,a) x (y,b) matrix
  std::vector<double> pm(static_cast<std::size_t>(ka) * kb);
  for (int x = 0; x < mx; ++x)
    for (int a = 0; a < oa; ++a)
      for (int y = 0; y < my; ++y)
        for (int b = 0; b < ob; ++b) pm[static_cast<std::size_t>(x * oa + a) * kb + y * ob + b] = p.at(x, y, a, b);

  std::vector<double> half(static_cast<std::size_t>(ka) * SB * OB);
  for (int l = 0; l < m.num_lambda(); ++l) {
    const double r = m.lambda_weights()[l];
    if (r == 0.0) continue;
    const std::vector<double> ta = wing_transfer(m.alice(l), SA, OA, mx, oa);
    const std::vector<double> tb = wing_transfer(m.bob(l), SB, OB, my, ob);
    // half[(x,a)][(ys,bs)] = sum_{y,b} P(x,y,a,b) Tb[(ys,bs)][(y,b)]
    for (int i = 0; i < ka; ++i)
      for (int j = 0; j < SB * OB; ++j) {
        double acc = 0.0;
        for (int k = 0; k < kb; ++k) acc += pm[static_cast<std::size_t>(i) * kb + k] * tb[static_cast<std::size_t>(j) * kb + k];
        half[static_cast<std::size_t>(i) * SB * OB + j] = acc;
      }
    for (int xs = 0; xs < SA; ++xs)
      for (int as = 0; as < OA; ++as) {
        const double* trow = &ta[(static_cast<std::size_t>(xs) * OA + as) * ka];
        for (int ys = 0; ys < SB; ++ys)
          for (int bs = 0; bs < OB; ++bs) {
            double acc = 0.0;
            for (int i = 0; i < ka; ++i) acc += trow[i] * half[static_cast<std::size_t>(i) * SB * OB + ys * OB + bs];
            table[static_cast<std::size_t>(xs * SB + ys) * (OA * OB) + as * OB + bs] += r * acc;
          }
      }
  }
  return Behavior(out, std::move(table));
}

LosrMap random_losr(std::uint64_t seed, const LosrShape& shape) {
  if (shape.num_lambda < 1 || shape.num_lambda > kMaxLambda)
    throw ValidationError("shared randomness must have between 1 and 64 values");
  Rng rng(seed);
  const Scenario& in = shape.input;
  const Scenario& out = shape.output;
  std::vector<double> r = rng.dirichlet(shape.num_lambda);
  std::vector<WingProcessing> alice, bob;
  for (int l = 0; l < shape.num_lambda; ++l) {
    WingProcessing wa, wb;
    wa.pre = dirichlet_conditional(rng, out.alice_inputs(), in.alice_inputs(), shape.alpha);
    wa.post = dirichlet_conditional(rng, out.alice_inputs() * in.alice_inputs() * in.alice_outputs(), out.alice_outputs(),
                                    shape.alpha);
    wb.pre = dirichlet_conditional(rng, out.bob_inputs(), in.bob_inputs(), shape.alpha);
    wb.post =
        dirichlet_conditional(rng, out.bob_inputs() * in.bob_inputs() * in.bob_outputs(), out.bob_outputs(), shape.alpha);
    alice.push_back(std::move(wa));
    bob.push_back(std::move(wb));
  }
  return LosrMap(in, out, std::move(r), std::move(alice), std::move(bob));
}

namespace {

// Broadcast wing of (2,2,2): routed site `route` goes through the box, the
// other site answers from local randomness.
WingProcessing routing_wing(Rng& rng, int route) {
  const int other = 1 - route;
  // pre: x | (x0,x1), depends on x_route only
  Conditional by_site = dirichlet_conditional(rng, 2, 2, 1.0);
  std::vector<double> pre(4 * 2);
  for (int xs = 0; xs < 4; ++xs) {
    const int d[2] = {xs >> 1, xs & 1};
    for (int x = 0; x < 2; ++x) pre[xs * 2 + x] = by_site(d[route], x);
  }
  // routed output a_route | x_route, x, a ; free output a_other | x_other
  Conditional routed = dirichlet_conditional(rng, 2 * 2 * 2, 2, 0.5);
  Conditional free = dirichlet_conditional(rng, 2, 2, 0.5);
  std::vector<double> post(4 * 2 * 2 * 4);
  for (int xs = 0; xs < 4; ++xs) {
    const int d[2] = {xs >> 1, xs & 1};
    for (int x = 0; x < 2; ++x)
      for (int a = 0; a < 2; ++a)
        for (int as = 0; as < 4; ++as) {
          const int o[2] = {as >> 1, as & 1};
          post[((xs * 2 + x) * 2 + a) * 4 + as] =
              routed((d[route] * 2 + x) * 2 + a, o[route]) * free(d[other], o[other]);
        }
  }
  return {Conditional(4, 2, std::move(pre)), Conditional(16, 4, std::move(post))};
}

}  // namespace

LosrMap random_routing_losr(std::uint64_t seed, int num_lambda) {
  if (num_lambda < 1 || num_lambda > kMaxLambda) throw ValidationError("shared randomness must have between 1 and 64 values");
  Rng rng(seed);
  std::vector<double> r = rng.dirichlet(num_lambda);
  std::vector<WingProcessing> alice, bob;
  for (int l = 0; l < num_lambda; ++l) {
    alice.push_back(routing_wing(rng, rng.index(2)));
    bob.push_back(routing_wing(rng, rng.index(2)));
  }
  return LosrMap(Scenario::bipartite(), Scenario::broadcast(), std::move(r), std::move(alice), std::move(bob));
}

namespace {

// pre: x = first site's input; post: every output site copies a.
WingProcessing copy_wing(const Scenario& out, bool alice, int m, int o) {
  const int first = alice ? 0 : out.alice_sites();
  const int last = alice ? out.alice_sites() : out.num_sites();
  const int S = alice ? out.alice_inputs() : out.bob_inputs();
  const int O = alice ? out.alice_outputs() : out.bob_outputs();
  std::vector<int> pre(S), post(static_cast<std::size_t>(S) * m * o);
  std::vector<int> radix_in, radix_out;
  for (int s = first; s < last; ++s) {
    radix_in.push_back(out.sites()[s].inputs);
    radix_out.push_back(out.sites()[s].outputs);
    if (out.sites()[s].outputs < o) throw DimensionError("copy wiring needs output sites at least as wide as the box");
  }
  for (int xs = 0; xs < S; ++xs) {
    const int lead = xs / (S / radix_in[0]);
    pre[xs] = lead % m;
    for (int x = 0; x < m; ++x)
      for (int a = 0; a < o; ++a) {
        int as = 0;
        for (int r : radix_out) as = as * r + a;
        post[(static_cast<std::size_t>(xs) * m + x) * o + a] = as;
      }
  }
  return {Conditional::deterministic(S, m, pre), Conditional::deterministic(S * m * o, O, post)};
}

}  // namespace

LosrMap copy_wiring(const Scenario& input, const Scenario& output) {
  WingProcessing a = copy_wing(output, true, input.alice_inputs(), input.alice_outputs());
  WingProcessing b = copy_wing(output, false, input.bob_inputs(), input.bob_outputs());
  return LosrMap(input, output, {1.0}, {a}, {b});
}

LosrMap constant_map(const Scenario& input, const Scenario& output, const Conditional& alice_wing,
                     const Conditional& bob_wing) {
  auto wing = [](const Conditional& target, int m, int o) {
    const int S = target.rows(), O = target.cols();
    std::vector<double> post;
    post.reserve(static_cast<std::size_t>(S) * m * o * O);
    for (int xs = 0; xs < S; ++xs)
      for (int k = 0; k < m * o; ++k)
        for (int as = 0; as < O; ++as) post.push_back(target(xs, as));
    return WingProcessing{Conditional::deterministic(S, m, std::vector<int>(S, 0)),
                          Conditional(S * m * o, O, std::move(post))};
  };
  return LosrMap(input, output, {1.0}, {wing(alice_wing, input.alice_inputs(), input.alice_outputs())},
                 {wing(bob_wing, input.bob_inputs(), input.bob_outputs())});
}

Conditional as_conditional(const Behavior& b) { return Conditional(b.num_settings(), b.num_outcomes(), b.table()); }

namespace {

constexpr double kFactorTol = 1e-10;

// Splits a joint table over (row_a, row_b) x (col_a, col_b) into a product
// of two conditionals, or throws.
std::pair<Conditional, Conditional> factorise(const Conditional& joint, int ra, int rb, int ca, int cb) {
  if (joint.rows() != ra * rb || joint.cols() != ca * cb) throw DimensionError("joint wiring table has the wrong shape");
  std::vector<double> fa(static_cast<std::size_t>(ra) * ca, 0.0), fb(static_cast<std::size_t>(rb) * cb, 0.0);
  for (int i = 0; i < ra; ++i)
    for (int c = 0; c < ca; ++c)
      for (int d = 0; d < cb; ++d) fa[static_cast<std::size_t>(i) * ca + c] += joint(i * rb, c * cb + d);
  for (int j = 0; j < rb; ++j)
    for (int d = 0; d < cb; ++d)
      for (int c = 0; c < ca; ++c) fb[static_cast<std::size_t>(j) * cb + d] += joint(j, c * cb + d);
  for (int i = 0; i < ra; ++i)
    for (int j = 0; j < rb; ++j)
      for (int c = 0; c < ca; ++c)
        for (int d = 0; d < cb; ++d)
          if (std::abs(joint(i * rb + j, c * cb + d) - fa[static_cast<std::size_t>(i) * ca + c] * fb[static_cast<std::size_t>(j) * cb + d]) >
              kFactorTol)
            throw ValidationError("wiring correlates the wings beyond shared randomness");
  return {Conditional(ra, ca, std::move(fa)), Conditional(rb, cb, std::move(fb))};
}

}  // namespace

LosrMap from_joint_wiring(const JointWiring& w) {
  const Scenario& in = w.input;
  const Scenario& out = w.output;
  if (w.pre.size() != w.lambda_weights.size() || w.post.size() != w.lambda_weights.size())
    throw DimensionError("one joint pre and post table per lambda expected");
  std::vector<WingProcessing> alice, bob;
  for (std::size_t l = 0; l < w.lambda_weights.size(); ++l) {
    auto [pa, pb] = factorise(w.pre[l], out.alice_inputs(), out.bob_inputs(), in.alice_inputs(), in.bob_inputs());
    auto [qa, qb] = factorise(w.post[l], out.alice_inputs() * in.alice_inputs() * in.alice_outputs(),
                              out.bob_inputs() * in.bob_inputs() * in.bob_outputs(), out.alice_outputs(),
                              out.bob_outputs());
    alice.push_back({std::move(pa), std::move(qa)});
    bob.push_back({std::move(pb), std::move(qb)});
  }
  return LosrMap(in, out, w.lambda_weights, std::move(alice), std::move(bob));
}

PreservationReport preserves_lrns(const LosrMap& m, const VertexCatalogue& input_vertices,
                                  const MembershipSolver& output_set) {
  if (!(input_vertices.scenario == m.input())) throw DimensionError("input catalogue does not match the map");
  const std::size_t n = input_vertices.size();
  std::vector<MembershipResult> res(n);
  parallel_for(n, [&](std::size_t k) { res[k] = output_set.solve(apply(m, input_vertices.vertices[k])); });
  PreservationReport rep;
  rep.vertices_checked = static_cast<int>(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (res[k].inside) continue;
    if (rep.preserves) rep.offending_vertex = static_cast<int>(k);
    rep.preserves = false;
    rep.worst_margin = std::max(rep.worst_margin, res[k].margin);
  }
  return rep;
}

ContractivityReport contractivity_check(const LosrMap& m, const Behavior& p, const Behavior& q, double tol) {
  ContractivityReport r;
  r.original_kl = box_kl(p, q).value;
  r.image_kl = box_kl(apply(m, p), apply(m, q)).value;
  r.holds = !(r.image_kl > r.original_kl + tol);
  return r;
}

}  // namespace boxcast
