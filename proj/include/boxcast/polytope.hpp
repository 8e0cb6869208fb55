#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "boxcast/behavior.hpp"

namespace boxcast {

enum class CatalogueKind { local_deterministic, ns_222, lrns_product, custom };

std::string to_string(CatalogueKind k);

inline constexpr std::size_t kDefaultCatalogueCap = 1'000'000;

struct VertexCatalogue {
  Scenario scenario;
  std::vector<Behavior> vertices;
  CatalogueKind kind = CatalogueKind::custom;

  std::size_t size() const { return vertices.size(); }
};

// Products of wing-deterministic strategies: every map from a wing's joint
// input to its joint output.
VertexCatalogue local_deterministic_vertices(const Scenario& sc, std::size_t cap = kDefaultCatalogueCap);

// The 24 extreme points of the (2,2,2) NS polytope: the 16 local
// deterministic boxes, then a^b = xy ^ alpha x ^ beta y ^ gamma for
// index 4 alpha + 2 beta + gamma.
VertexCatalogue ns_vertices_222();
Behavior nonlocal_ns_vertex(int alpha, int beta, int gamma);

// Q_A (x) Q_B for every pair; each wing catalogue is a bipartite box over
// the wing's own sites.
VertexCatalogue lrns_vertices(const VertexCatalogue& wing_a, const VertexCatalogue& wing_b,
                              std::size_t cap = kDefaultCatalogueCap);

// The LR_ns catalogue of the (2,2,2) broadcast scenario (576 vertices).
VertexCatalogue lrns_broadcast_222();

struct SparseColumnData {
  std::vector<int> rows;
  std::vector<double> values;
};

struct SeparatingFunctional {
  std::vector<double> coefficients;  // same layout as the behavior table
  double threshold = 0.0;            // bounds every vertex from above
};

struct MembershipResult {
  bool inside = false;
  std::vector<double> weights;        // over catalogue vertices, when inside
  SeparatingFunctional functional;    // when outside
  double margin = 0.0;                // functional(query) - threshold
  double visibility = 0.0;            // largest v with centre + v (query - centre) inside, for an internal interior centre
  double residual = 0.0;              // reconstruction residual (max norm)
  int lp_iterations = 0;
};

// Precomputes the catalogue's row space so repeated queries only solve a
// reduced LP. Holds a reference: the catalogue must outlive the solver.
class MembershipSolver {
 public:
  explicit MembershipSolver(const VertexCatalogue& cat);
  MembershipResult solve(const Behavior& b, double tol = 1e-9) const;
  const VertexCatalogue& catalogue() const { return cat_; }
  int rank() const { return static_cast<int>(kept_rows_.size()); }

 private:
  const VertexCatalogue& cat_;
  std::vector<double> barycenter_;               // E entries
  std::vector<int> kept_rows_;                   // independent rows of [V; 1]
  std::vector<std::vector<double>> null_rows_;   // z with z.(V_k;1) = 0 for all k
  std::vector<SparseColumnData> columns_;
  std::vector<int> start_vertices_;              // affinely independent, one per kept row
};

MembershipResult membership(const Behavior& b, const VertexCatalogue& cat, double tol = 1e-9);

// Weighted vertex sum.
Behavior combine(const VertexCatalogue& cat, const std::vector<double>& weights);

}  // namespace boxcast
