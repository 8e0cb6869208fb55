#include "boxcast/random.hpp"

#include "boxcast/polytope.hpp"

namespace boxcast {

std::vector<double> Rng::dirichlet(int n, double alpha) {
  std::gamma_distribution<double> g(alpha, 1.0);
  std::vector<double> w(n);
  double total = 0.0;
  for (double& v : w) {
    v = g(gen_);
    total += v;
  }
  for (double& v : w) v /= total;
  return w;
}

Behavior random_ns_222(Rng& rng) {
  static const VertexCatalogue ns = ns_vertices_222();
  return combine(ns, rng.dirichlet(static_cast<int>(ns.size())));
}

Behavior random_local(Rng& rng, const Scenario& sc) {
  VertexCatalogue cat = local_deterministic_vertices(sc);
  return combine(cat, rng.dirichlet(static_cast<int>(cat.size())));
}

Behavior random_broadcast_ns(Rng& rng, int terms, bool interior) {
  std::vector<Behavior> parts;
  std::vector<double> r = rng.dirichlet(terms);
  for (int k = 0; k < terms; ++k) parts.push_back(product(random_ns_222(rng), random_ns_222(rng)));
  if (interior) {
    for (double& v : r) v *= 0.98;
    r.push_back(0.02);
    parts.push_back(uniform_box(Scenario::broadcast()));
  }
  return mix(parts, r);
}

Behavior random_lrns_mixture(Rng& rng, int support) {
  static const VertexCatalogue lr = lrns_broadcast_222();
  std::vector<double> w(lr.size(), 0.0);
  std::vector<double> d = rng.dirichlet(support);
  for (int k = 0; k < support; ++k) w[rng.index(static_cast<int>(lr.size()))] += d[k];
  return combine(lr, w);
}

}  // namespace boxcast
