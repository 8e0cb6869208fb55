#pragma once

// Independent reference computations used only by tests.

#include "boxcast/assemblage.hpp"
#include "boxcast/behavior.hpp"
#include "boxcast/losr.hpp"
#include "boxcast/polytope.hpp"
#include "boxcast/random.hpp"

namespace oracle {

// Coarse E_LR: Euclidean projected subgradient on the weight simplex,
// best iterate over `iters` steps.
double elr_projected_subgradient(const boxcast::Behavior& p, const boxcast::VertexCatalogue& cat, int iters = 100000);

// (2,2,2) box v * (random nonlocal NS vertex) + (1 - v) * (random local mixture).
boxcast::Behavior random_nonlocal_222(boxcast::Rng& rng, double vmin = 0.55, double vmax = 0.95);

// LOSR map applied by direct summation over lambda and every input and
// output index of both wings.
boxcast::Behavior apply_brute(const boxcast::LosrMap& m, const boxcast::Behavior& p);

// Assemblage LOSR map by direct summation, Kraus operators applied term by
// term.
boxcast::Assemblage apply_assemblage_brute(const boxcast::AssemblageLosrMap& m, const boxcast::Assemblage& a);

// Upper bound on the relative entropy of steering by Frank-Wolfe with a
// golden-section line search on a log-sum-exp smoothing of the max over
// inputs. Divergences evaluated with the matrix logarithm. Bits.
double steering_entropy_fw(const boxcast::Assemblage& a, const std::vector<boxcast::Strategy>& strategies,
                           int iters = 1000, double tau = 1e-3);

}  // namespace oracle
