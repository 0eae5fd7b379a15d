// SPDX-License-Identifier: MIT
//
// Numerical verification of the weighted inequalities: Carleson sums and
// embeddings, the localized weight propositions (dyadic and anisotropic),
// the Bellman-function size/convexity properties, induction-in-scales
// instances, the martingale-transform inequality chain, and scaling studies
// of operator norm against the A_2 characteristic.
//
// The checks report empirical constants (maximal LHS/RHS ratios with the
// unknown absolute constants stripped from the RHS); pass verdicts compare
// against caller-supplied caps, defaulting to no cap.
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dpl/operators.hpp"

namespace dpl {

// Nonnegative numbers alpha_{j,Q} indexed by the Haar lattice.
class CarlesonSequence {
  public:
    CarlesonSequence(int dim, int depth);
    static CarlesonSequence zeros(int dim, int depth) { return {dim, depth}; }
    // alpha = <b, h>^2, the sequence driving the paraproduct bounds.
    static CarlesonSequence from_symbol(const GridFunction& b);

    int dim() const { return indexer_.dim(); }
    int depth() const { return indexer_.depth(); }
    const HaarIndexer& indexer() const { return indexer_; }

    double at(const HaarIndex& idx) const;
    void set(const HaarIndex& idx, double value);
    std::span<const double> values() const { return values_; }

  private:
    HaarIndexer indexer_;
    std::vector<double> values_;
};

// (1/|E_base|) sum of alpha * kernel over all indices whose support set is
// contained in E_base; containment is the exact rectangle-inclusion test.
double carleson_sum(const CarlesonSequence& alpha, const HaarIndex& base,
                    const std::function<double(const HaarIndex&)>& kernel = {});

// For every node, the sum of node_values over refinement-tree
// descendants-or-self; the fast path behind all localized sweeps.
std::vector<double> e_tree_descendant_sums(const HaarIndexer& indexer,
                                           std::span<const double> node_values);

inline constexpr double kNoCap = std::numeric_limits<double>::infinity();

// Weighted Carleson embedding: computes the minimal admissible A by sweeping
// all (Q', i), then reports sum alpha <f w^{1/2}>^2_E against A ||f||^2.
CheckReport weighted_carleson_embedding_check(const CarlesonSequence& alpha, const Weight& w,
                                              const GridFunction& f, double cap = kNoCap);

// kWeightedAverage pairs the w- and v-averages of f and g against weighted
// norms; kProductWeights pairs <f w^{1/2}> <g v^{1/2}> |E| against plain L2
// norms (the two forms trade places under alpha -> alpha <v><w>|E|).
enum class BilinearVariant { kWeightedAverage, kProductWeights };

// Bilinear embedding with the variant's three localized conditions; the
// minimal A covers all of them plus sup_Q <w>_Q <v>_Q.
CheckReport bilinear_embedding_check(const CarlesonSequence& alpha, const Weight& w,
                                     const Weight& v, const GridFunction& f,
                                     const GridFunction& g, BilinearVariant variant,
                                     double cap = kNoCap);

enum class Proposition { kWp1, kWp2, kWp3, kWp4 };
enum class RegionClass { kDyadic, kAnisotropic };

// Localized weight inequalities. The dyadic variant normalizes by
// [w]_{A_2^d}, the anisotropic one by [w]_{A_2^R} over dyadic rectangles.
// wp1 requires alpha; its Carleson constant is computed by sweep.
CheckReport proposition_suite(const Weight& w, Proposition which, RegionClass variant,
                              const CarlesonSequence* alpha = nullptr, double cap = kNoCap);

struct BellmanPoint {
    double big_f = 0.0;  // F
    double f = 0.0;
    double u = 0.0;
    double y = 0.0;

    bool in_domain() const;
};

// Size and midpoint-convexity of B(F,f,u,Y) = 4A (F - f^2/(u+Y)) with A = 1,
// over seeded rejection samples of point pairs plus the slack M.
CheckReport bellman_lmwce_check(std::int64_t samples, std::uint64_t seed, double tol = 1e-12);

// Data for one induction-in-scales run: per-node convexity contributions,
// the per-node bound |E| A b(X), and the (X, Y, M) tuples whose midpoint
// relations hold by construction.
struct InductionInstance {
    std::string name;
    int dim = 1;
    int depth = 0;
    int x_components = 0;
    std::vector<double> convexity;             // per node id, >= 0
    std::vector<double> bound;                 // per node id: |E| * A * b(X_E)
    std::vector<std::array<double, 3>> x;      // per node id
    std::vector<double> y;                     // per node id
    std::vector<double> m;                     // per node id
    std::vector<std::array<double, 3>> leaf_x;  // per cell flat index
    std::vector<double> leaf_y;                 // per cell flat index

    double max_midpoint_defect() const;
};

// Carleson-sequence instance (X = (<w>, <w^{-1}>), M = alpha/(A|E|)); the
// conclusion is the alpha/<w^{-1}> bound with the Bellman size constant 4.
InductionInstance make_wp1_instance(const Weight& w, const CarlesonSequence& alpha);

// Weighted-embedding instance (X = (<f^2>, <f w^{1/2}>, <w>)); f positive.
InductionInstance make_mwce_instance(const Weight& w, const CarlesonSequence& alpha,
                                     const GridFunction& f);

// Verifies sum of convexity contributions over the subtree of root against
// the root bound. Throws if the midpoint relations are violated.
CheckReport induction_in_scales_check(const InductionInstance& instance, const HaarIndex& root);

// The martingale-transform inequalities: empirical constants for the square
// of the reciprocal increments, the mixed increment sum, and the
// reciprocal-normalized mixed sum, plus the per-node Cauchy-Schwarz chain
// |mixed| <= sqrt(sum4) sqrt(sum5) verified to 1e-12.
CheckReport mmte_suite(const Weight& w, double cap = kNoCap);

struct WeightFamilyEntry {
    double alpha = 0.0;  // family label, e.g. the power exponent
    Weight w;
};

struct ScalingRow {
    double alpha = 0.0;
    double a2d = 1.0;
    double a2r = 1.0;
    double norm = 0.0;
    double ratio = 0.0;
};

struct ScalingTable {
    std::vector<ScalingRow> rows;
    double slope = 0.0;  // log-log fit of norm against [w]_{A_2^d}
};

enum class ScalingOp { kParaproduct, kMartingale, kSquare };

// Norm-vs-characteristic study over a weight family. The reference for the
// ratio column is [w] ||b||_{BMO^d} for the paraproduct, [w] for the
// martingale transform, and [w]^{1/2} for the square function. Throws on a
// degenerate family (fewer than two distinct characteristics).
ScalingTable scaling_experiment(std::span<const WeightFamilyEntry> family, const GridFunction& b,
                                ScalingOp op, std::uint64_t sigma_seed = 1);

// CSV with header alpha,a2d,a2r,norm,ratio,slope (slope repeated per row).
std::string scaling_csv(const ScalingTable& table);

}  // namespace dpl
