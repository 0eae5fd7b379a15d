// SPDX-License-Identifier: MIT
#include "dpl/haar.hpp"

#include <cmath>
#include <stdexcept>

namespace dpl {

namespace {

void require_positive(const GridFunction& w) {
    for (std::int64_t i = 0; i < w.cell_count(); ++i)
        if (!(w[i] > 0.0)) throw std::invalid_argument("weight has a nonpositive cell");
}

void require_representable(const HaarIndex& idx, int depth) {
    if (idx.cube.level() + 1 > depth)
        throw std::invalid_argument("depth too shallow to represent the split");
}

struct WeightedHaarValues {
    double on_e1 = 0.0;
    double on_e2 = 0.0;
};

// Constant values of h^w_{j,Q} on the two halves, from the half w-masses.
WeightedHaarValues weighted_haar_values(const IntegralPyramid& wpyr, const HaarIndex& idx) {
    auto [w1, w2] = wpyr.halves(idx);
    const double we = w1 + w2;
    if (!(w1 > 0.0) || !(w2 > 0.0))
        throw std::invalid_argument("weight has zero mass on a half set");
    return {-std::sqrt(w2 / w1) / std::sqrt(we), std::sqrt(w1 / w2) / std::sqrt(we)};
}

}  // namespace

// ---------------------------------------------------------------------------
// CoefficientTree
// ---------------------------------------------------------------------------

double CoefficientTree::at(const HaarIndex& idx) const {
    auto it = coef_.find(idx);
    return it == coef_.end() ? 0.0 : it->second;
}

void CoefficientTree::set(const HaarIndex& idx, double c) {
    if (idx.cube.dim() != dim_ || idx.cube.level() >= depth_)
        throw std::invalid_argument("CoefficientTree: index outside tree");
    coef_[idx] = c;
}

double CoefficientTree::coefficient_energy() const {
    double s = 0.0;
    for (const auto& [idx, c] : coef_) s += c * c;
    return s;
}

// ---------------------------------------------------------------------------
// Basis functions
// ---------------------------------------------------------------------------

GridFunction wilson_haar(const HaarIndex& idx, int depth) {
    require_representable(idx, depth);
    auto [e1, e2] = pair_sets(idx);
    const double amp = 1.0 / std::sqrt(e_set(idx).volume());
    GridFunction h(idx.cube.dim(), depth);
    h.add_on(e1, -amp);
    h.add_on(e2, amp);
    return h;
}

GridFunction weighted_wilson_haar(const HaarIndex& idx, const GridFunction& w) {
    require_representable(idx, w.depth());
    require_positive(w);
    IntegralPyramid wpyr(w);
    const auto values = weighted_haar_values(wpyr, idx);
    auto [e1, e2] = pair_sets(idx);
    GridFunction h(w.dim(), w.depth());
    h.add_on(e1, values.on_e1);
    h.add_on(e2, values.on_e2);
    return h;
}

OrthogonalHaar orthogonal_haar(const HaarIndex& idx, const GridFunction& w) {
    require_representable(idx, w.depth());
    require_positive(w);
    IntegralPyramid wpyr(w);
    auto [w1, w2] = wpyr.halves(idx);
    auto [e1, e2] = pair_sets(idx);
    const double half_volume = e1.volume();
    const double avg1 = w1 / half_volume;
    const double avg2 = w2 / half_volume;
    const double avg = (w1 + w2) / (2.0 * half_volume);
    const double a = (avg2 - avg1) / (2.0 * avg);

    GridFunction h(w.dim(), w.depth());
    h.add_on(e1, -1.0 - a);
    h.add_on(e2, 1.0 - a);
    return {std::move(h), a};
}

// ---------------------------------------------------------------------------
// Analysis / synthesis
// ---------------------------------------------------------------------------

CoefficientTree analyze(const GridFunction& f) {
    CoefficientTree tree(f.dim(), f.depth());
    tree.set_mean(f.integral());  // |[0,1)^n| = 1
    IntegralPyramid pyr(f);
    const int per_cube = haar_indices_per_cube(f.dim());
    for (int k = 0; k < f.depth(); ++k) {
        const std::int64_t cubes = std::int64_t{1} << (f.dim() * k);
        for (std::int64_t flat = 0; flat < cubes; ++flat) {
            const DyadicCube q = DyadicCube::from_flat(f.dim(), k, static_cast<std::uint64_t>(flat));
            for (int j = 1; j <= per_cube; ++j) {
                const HaarIndex idx{q, j};
                auto [i1, i2] = pyr.halves(idx);
                tree.set(idx, (i2 - i1) / std::sqrt(e_set(idx).volume()));
            }
        }
    }
    return tree;
}

CoefficientTree analyze(const GridFunction& f, const GridFunction& w) {
    if (!f.same_shape(w)) throw std::invalid_argument("analyze: weight shape mismatch");
    require_positive(w);
    CoefficientTree tree(f.dim(), f.depth());
    IntegralPyramid fw(f, w);
    IntegralPyramid wpyr(w);
    tree.set_mean(fw.root() / wpyr.root());
    const int per_cube = haar_indices_per_cube(f.dim());
    for (int k = 0; k < f.depth(); ++k) {
        const std::int64_t cubes = std::int64_t{1} << (f.dim() * k);
        for (std::int64_t flat = 0; flat < cubes; ++flat) {
            const DyadicCube q = DyadicCube::from_flat(f.dim(), k, static_cast<std::uint64_t>(flat));
            for (int j = 1; j <= per_cube; ++j) {
                const HaarIndex idx{q, j};
                auto [w1, w2] = wpyr.halves(idx);
                auto [fw1, fw2] = fw.halves(idx);
                const double we = w1 + w2;
                // <f, h^w>_w with the half-mass square roots folded in.
                tree.set(idx, (std::sqrt(w1 / w2) * fw2 - std::sqrt(w2 / w1) * fw1) / std::sqrt(we));
            }
        }
    }
    return tree;
}

GridFunction synthesize(const CoefficientTree& tree) {
    GridFunction f(tree.dim(), tree.depth(), tree.mean());
    for (const auto& [idx, c] : tree.coefficients()) {
        if (c == 0.0) continue;
        auto [e1, e2] = pair_sets(idx);
        const double amp = c / std::sqrt(e_set(idx).volume());
        f.add_on(e1, -amp);
        f.add_on(e2, amp);
    }
    return f;
}

GridFunction synthesize(const CoefficientTree& tree, const GridFunction& w) {
    if (w.dim() != tree.dim() || w.depth() != tree.depth())
        throw std::invalid_argument("synthesize: weight shape mismatch");
    require_positive(w);
    IntegralPyramid wpyr(w);
    GridFunction f(tree.dim(), tree.depth(), tree.mean());
    for (const auto& [idx, c] : tree.coefficients()) {
        if (c == 0.0) continue;
        const auto values = weighted_haar_values(wpyr, idx);
        auto [e1, e2] = pair_sets(idx);
        f.add_on(e1, c * values.on_e1);
        f.add_on(e2, c * values.on_e2);
    }
    return f;
}

// ---------------------------------------------------------------------------
// Average recovery
// ---------------------------------------------------------------------------

double average_from_coefficients(const CoefficientTree& tree, const HaarIndex& idx) {
    double value = tree.mean();
    HaarIndex cur = idx;
    while (auto parent = e_parent(cur)) {
        const double c = tree.at(parent->idx);
        const double amp = 1.0 / std::sqrt(e_set(parent->idx).volume());
        value += c * (parent->half == 1 ? -amp : amp);
        cur = parent->idx;
    }
    return value;
}

double average_from_coefficients(const CoefficientTree& tree, const HaarIndex& idx,
                                 const GridFunction& w) {
    if (w.dim() != tree.dim() || w.depth() != tree.depth())
        throw std::invalid_argument("average_from_coefficients: weight shape mismatch");
    require_positive(w);
    IntegralPyramid wpyr(w);
    double value = tree.mean();
    HaarIndex cur = idx;
    while (auto parent = e_parent(cur)) {
        const double c = tree.at(parent->idx);
        const auto values = weighted_haar_values(wpyr, parent->idx);
        value += c * (parent->half == 1 ? values.on_e1 : values.on_e2);
        cur = parent->idx;
    }
    return value;
}

// ---------------------------------------------------------------------------
// Tensor basis and projections
// ---------------------------------------------------------------------------

GridFunction tensor_haar(const TensorHaarIndex& idx, int depth) {
    const int n = idx.cube.dim();
    const std::uint32_t all_ones = (1u << n) - 1u;
    if (idx.signature == all_ones)
        throw std::invalid_argument("tensor_haar: all-indicator signature excluded");
    if (idx.signature > all_ones) throw std::invalid_argument("tensor_haar: bad signature");
    if (idx.cube.level() + 1 > depth)
        throw std::invalid_argument("depth too shallow to represent the split");

    const double amp = 1.0 / std::sqrt(idx.cube.volume());
    GridFunction h(n, depth);
    // Constant on each child of Q: product of per-axis signs on the
    // mean-zero axes (lower half negative).
    for (std::uint32_t address = 0; address < (1u << n); ++address) {
        double v = amp;
        for (int a = 0; a < n; ++a) {
            const std::uint32_t bit = (address >> (n - 1 - a)) & 1u;
            const bool indicator = (idx.signature >> (n - 1 - a)) & 1u;
            if (!indicator && bit == 0) v = -v;
        }
        h.add_on(idx.cube.child(address).to_rectangle(), v);
    }
    return h;
}

GridFunction project_wq(const GridFunction& f, const DyadicCube& q) {
    if (q.level() >= f.depth()) throw std::invalid_argument("project_wq: level(Q) must be < depth");
    IntegralPyramid pyr(f);
    GridFunction out(f.dim(), f.depth());
    for (int j = 1; j <= haar_indices_per_cube(f.dim()); ++j) {
        const HaarIndex idx{q, j};
        auto [i1, i2] = pyr.halves(idx);
        const double c = (i2 - i1) / std::sqrt(e_set(idx).volume());
        auto [e1, e2] = pair_sets(idx);
        const double amp = c / std::sqrt(e_set(idx).volume());
        out.add_on(e1, -amp);
        out.add_on(e2, amp);
    }
    return out;
}

GridFunction project_wq_tensor(const GridFunction& f, const DyadicCube& q) {
    if (q.level() >= f.depth()) throw std::invalid_argument("project_wq_tensor: level(Q) must be < depth");
    IntegralPyramid pyr(f);
    const int n = f.dim();
    GridFunction out(f.dim(), f.depth());
    const double amp = 1.0 / std::sqrt(q.volume());
    for (std::uint32_t sig = 0; sig < (1u << n) - 1u; ++sig) {
        // <f, h^s_sig> from child integrals, then paint c * h^s_sig.
        double c = 0.0;
        for (std::uint32_t address = 0; address < (1u << n); ++address) {
            double sign = 1.0;
            for (int a = 0; a < n; ++a) {
                const std::uint32_t bit = (address >> (n - 1 - a)) & 1u;
                const bool indicator = (sig >> (n - 1 - a)) & 1u;
                if (!indicator && bit == 0) sign = -sign;
            }
            c += sign * amp * pyr.child(q, address);
        }
        for (std::uint32_t address = 0; address < (1u << n); ++address) {
            double sign = 1.0;
            for (int a = 0; a < n; ++a) {
                const std::uint32_t bit = (address >> (n - 1 - a)) & 1u;
                const bool indicator = (sig >> (n - 1 - a)) & 1u;
                if (!indicator && bit == 0) sign = -sign;
            }
            out.add_on(q.child(address).to_rectangle(), c * sign * amp);
        }
    }
    return out;
}

}  // namespace dpl
