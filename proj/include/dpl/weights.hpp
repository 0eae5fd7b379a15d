// SPDX-License-Identifier: MIT
//
// Weight and symbol diagnostics: A_p^d and A_2^R characteristics, BMO^d and
// BMO^R norms, the John-Nirenberg profile, the self-improving p-oscillation
// ratio, and generators for test weights and symbols.
//
// The discretized weight is the ground-truth object: w^{-1} means the
// cellwise reciprocal, so every characteristic below is exact for the grid
// model. Rectangle suprema range over dyadic rectangles with per-axis levels
// up to the grid depth.
#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "dpl/grid.hpp"
#include "dpl/report.hpp"

namespace dpl {

// A grid function with strictly positive cells.
class Weight {
  public:
    explicit Weight(GridFunction g);

    int dim() const { return grid_.dim(); }
    int depth() const { return grid_.depth(); }
    const GridFunction& grid() const { return grid_; }

    Weight reciprocal() const;

  private:
    GridFunction grid_;
};

// [w]_{A_p^d}: exact supremum of <w>_Q <w^{-1/(p-1)}>_Q^{p-1} over all dyadic
// cubes of level <= depth. Requires p > 1.
CharacteristicReport apd_characteristic(const Weight& w, double p);

// [w]_{A_2^R}: supremum of <w>_R <w^{-1}>_R over all dyadic rectangles.
CharacteristicReport a2r_characteristic(const Weight& w);

enum class BmoVariant { kL1, kL2 };

// L1: sup_Q <|b - <b>_Q|>_Q. L2: sup_Q <(b - <b>_Q)^2>_Q, which equals the
// normalized sum of squared Haar coefficients below Q by local Parseval.
double bmod_norm(const GridFunction& b, BmoVariant variant);

// Mean oscillation supremum over dyadic rectangles; >= the L1 cube norm.
double bmor_norm(const GridFunction& b);

// Level-set measures |{x in R : |b - <b>_R| > lambda}| against the
// anisotropic John-Nirenberg bound e^{1+2/e} |R| exp(-(2/e) lambda / ||b||).
CheckReport john_nirenberg_profile(const GridFunction& b, const DyadicRectangle& r,
                                   std::span<const double> lambdas);

// sup_R (<|b - <b>_R|^p>_R)^{1/p} / ||b||_{BMO^R}; equals 1 at p = 1.
double self_improving_ratio(const GridFunction& b, double p);

// Power weight |x|^alpha, alpha > -dim: exact dyadic-cell averages in one
// dimension, cell-midpoint values otherwise (documented approximation; the
// discretized function is a bona fide weight either way).
Weight make_power_weight(int dim, int depth, double alpha);

// Multiplicative dyadic cascade: each child carries the parent value times
// (1 +/- delta), signs drawn from the seed, 0 < delta < 1.
Weight make_cascade_weight(int dim, int depth, double delta, std::uint64_t seed);

// Dispatcher for textual specs: "unit", "power:<alpha>",
// "cascade:<delta>:<seed>", "file:<path>".
Weight make_weight(int dim, int depth, const std::string& spec);

// Test symbols: logarithm of |x| at cell midpoints (the canonical unbounded
// BMO function), or a random dyadic martingale with coefficients scaled by
// sqrt(|E|).
GridFunction make_log_symbol(int dim, int depth);
GridFunction make_random_symbol(int dim, int depth, std::uint64_t seed);

// Dispatcher: "log", "random:<seed>", "haar:<j>", "file:<path>".
GridFunction make_symbol(int dim, int depth, const std::string& spec);

// Number of worker threads for the rectangle sweeps: DPL_THREADS if set,
// otherwise 1.
int worker_threads();

}  // namespace dpl
