// SPDX-License-Identifier: MIT
//
// Wilson's Haar system on [0,1)^n (plain, weighted, orthogonalized), the
// standard tensor-product Haar basis, and analysis/synthesis between grid
// functions and coefficient trees. Sign convention: h = |E|^{-1/2}
// (chi_{E^2} - chi_{E^1}), positive on the upper half.
#pragma once

#include <cstdint>
#include <map>
#include <utility>

#include "dpl/grid.hpp"

namespace dpl {

// Tensor-product Haar index: per-axis choice between the mean-zero factor
// (bit 0) and the normalized indicator (bit 1); the all-indicator signature
// is excluded. Bit of axis a is (dim-1-a), matching child addresses.
struct TensorHaarIndex {
    DyadicCube cube;
    std::uint32_t signature = 0;
};

// Haar expansion of a grid function: one coefficient per HaarIndex with cube
// level < depth, plus the explicit global-average term that replaces the
// coarser scales lost to truncating R^n to the unit cube.
class CoefficientTree {
  public:
    CoefficientTree() = default;
    CoefficientTree(int dim, int depth) : dim_(dim), depth_(depth) {}

    int dim() const { return dim_; }
    int depth() const { return depth_; }

    double mean() const { return mean_; }
    void set_mean(double m) { mean_ = m; }

    double at(const HaarIndex& idx) const;
    void set(const HaarIndex& idx, double c);

    // Level-major traversal (map key order).
    const std::map<HaarIndex, double>& coefficients() const { return coef_; }

    // Sum of squared coefficients.
    double coefficient_energy() const;

  private:
    int dim_ = 1;
    int depth_ = 0;
    double mean_ = 0.0;
    std::map<HaarIndex, double> coef_;
};

// h_{j,Q} sampled at the given depth (>= level(Q)+1).
GridFunction wilson_haar(const HaarIndex& idx, int depth);

// h^w_{j,Q}: unit L2(w) norm, w-orthogonal to constants on E_{j,Q}.
// Throws if any weight cell is nonpositive.
GridFunction weighted_wilson_haar(const HaarIndex& idx, const GridFunction& w);

struct OrthogonalHaar {
    GridFunction h;  // H^w_{j,Q} = h sqrt(|E|) - A chi_E
    double a = 0.0;  // A^w_{j,Q}
};

// The disbalanced system: {w^{1/2} H^w} is orthogonal in plain L2 with
// norms at most sqrt(|E| <w>_E).
OrthogonalHaar orthogonal_haar(const HaarIndex& idx, const GridFunction& w);

CoefficientTree analyze(const GridFunction& f);
CoefficientTree analyze(const GridFunction& f, const GridFunction& w);
GridFunction synthesize(const CoefficientTree& tree);
GridFunction synthesize(const CoefficientTree& tree, const GridFunction& w);

// Recovers <f>_{E_{j,Q}} (resp. the w-average) from coefficients of strictly
// larger pairs plus the global mean, walking the refinement-tree ancestors.
double average_from_coefficients(const CoefficientTree& tree, const HaarIndex& idx);
double average_from_coefficients(const CoefficientTree& tree, const HaarIndex& idx,
                                 const GridFunction& w);

GridFunction tensor_haar(const TensorHaarIndex& idx, int depth);

// Projection onto W(Q) = span of the 2^n - 1 Haar functions of Q; the Wilson
// and tensor routes compute the same subspace projection.
GridFunction project_wq(const GridFunction& f, const DyadicCube& q);
GridFunction project_wq_tensor(const GridFunction& f, const DyadicCube& q);

}  // namespace dpl
