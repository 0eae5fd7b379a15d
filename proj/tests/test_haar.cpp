// SPDX-License-Identifier: MIT
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "dpl/haar.hpp"

using namespace dpl;

namespace {

GridFunction positive_grid(int dim, int depth, std::uint64_t seed) {
    return random_grid(dim, depth, seed, 0.2, 3.0);
}

}  // namespace

TEST_CASE("wilson_haar: classical 1-d Haar and normalization") {
    const GridFunction h = wilson_haar(HaarIndex{DyadicCube::root(1), 1}, 1);
    CHECK(h[0] == -1.0);
    CHECK(h[1] == 1.0);

    // n=2, j=3: supported on the upper slab, amplitude sqrt(2).
    const GridFunction h3 = wilson_haar(HaarIndex{DyadicCube::root(2), 3}, 1);
    CHECK(h3[0] == 0.0);                               // cell (0,0)
    CHECK(h3[1] == doctest::Approx(-std::sqrt(2.0)));  // cell (0,1) in E^1
    CHECK(h3[2] == 0.0);
    CHECK(h3[3] == doctest::Approx(std::sqrt(2.0)));

    for (int n = 1; n <= 3; ++n) {
        const HaarIndexer indexer(n, 2);
        for (std::int64_t id = 0; id < indexer.size(); ++id) {
            const GridFunction h_id = wilson_haar(indexer.at(id), 3);
            CHECK(std::abs(h_id.integral()) < 1e-15);
            CHECK(h_id.inner(h_id) == doctest::Approx(1.0).epsilon(1e-14));
        }
    }

    CHECK_THROWS_AS(wilson_haar(HaarIndex{DyadicCube::root(2), 1}, 0), std::invalid_argument);
}

TEST_CASE("Wilson system Gram matrix is the identity (via exact analysis)") {
    for (int n = 1; n <= 3; ++n) {
        const int depth = (n == 3) ? 3 : 4;
        const HaarIndexer indexer(n, depth);
        std::mt19937_64 pick(7);
        for (int trial = 0; trial < 40; ++trial) {
            const std::int64_t id =
                static_cast<std::int64_t>(pick() % static_cast<std::uint64_t>(indexer.size()));
            const HaarIndex idx = indexer.at(id);
            const CoefficientTree tree = analyze(wilson_haar(idx, depth));
            CHECK(std::abs(tree.mean()) < 1e-13);
            for (const auto& [other, coef] : tree.coefficients()) {
                if (other == idx)
                    CHECK(coef == doctest::Approx(1.0).epsilon(1e-12));
                else
                    CHECK(std::abs(coef) < 1e-12);
            }
        }
    }
}

TEST_CASE("analyze/synthesize: round trip and Parseval") {
    const GridFunction f = random_grid(2, 4, 11, -1.0, 1.0);
    const CoefficientTree tree = analyze(f);
    CHECK(max_abs_diff(synthesize(tree), f) < 1e-12);

    const double energy = tree.mean() * tree.mean() + tree.coefficient_energy();
    CHECK(energy == doctest::Approx(f.inner(f)).epsilon(1e-12));

    // Constants have no Haar content.
    const CoefficientTree tc = analyze(GridFunction::constant(2, 3, 4.5));
    CHECK(tc.mean() == doctest::Approx(4.5));
    CHECK(tc.coefficient_energy() < 1e-26);

    // A single basis function has a single unit coefficient.
    const HaarIndex idx{DyadicCube::root(2).child(2), 3};
    const CoefficientTree th = analyze(wilson_haar(idx, 3));
    CHECK(th.at(idx) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(th.coefficient_energy() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("weighted system: unit weight reduces to the plain one") {
    const HaarIndex idx{DyadicCube::root(2), 2};
    const GridFunction w = GridFunction::constant(2, 3, 1.0);
    CHECK(max_abs_diff(weighted_wilson_haar(idx, w), wilson_haar(idx, 3)) < 1e-14);
}

TEST_CASE("weighted system: two-cell weight, norms and orthogonality") {
    GridFunction w(1, 1);
    w[0] = 1.0;
    w[1] = 3.0;
    const HaarIndex idx{DyadicCube::root(1), 1};
    const GridFunction hw = weighted_wilson_haar(idx, w);
    CHECK(hw[0] == doctest::Approx(-std::sqrt(1.5)));
    CHECK(hw[1] == doctest::Approx(1.0 / std::sqrt(6.0)));
    CHECK(hw.weighted_norm(w) == doctest::Approx(1.0).epsilon(1e-14));
    // w-orthogonal to the indicator of the support.
    CHECK(std::abs(hw.weighted_inner(GridFunction::constant(1, 1, 1.0), w)) < 1e-15);

    const OrthogonalHaar oh = orthogonal_haar(idx, w);
    CHECK(oh.a == doctest::Approx(0.5));

    GridFunction wneg(1, 1);
    wneg[0] = 1.0;
    wneg[1] = 0.0;
    CHECK_THROWS_AS(weighted_wilson_haar(idx, wneg), std::invalid_argument);
}

TEST_CASE("weighted expansion reconstructs exactly at finite depth") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const int n = 2;
        const int depth = 3;
        const GridFunction w = positive_grid(n, depth, seed);
        const GridFunction f = random_grid(n, depth, seed + 100, -2.0, 2.0);
        const CoefficientTree tree = analyze(f, w);
        CHECK(max_abs_diff(synthesize(tree, w), f) < 1e-11);

        // Weighted Parseval with the explicit mean term.
        const double w_total = w.integral();
        const double energy = tree.mean() * tree.mean() * w_total + tree.coefficient_energy();
        CHECK(energy == doctest::Approx(f.weighted_inner(f, w)).epsilon(1e-10));
    }
}

TEST_CASE("orthogonal system: pairwise orthogonality, norm bound, Bessel") {
    const int n = 2;
    const int depth = 3;
    const GridFunction w = positive_grid(n, depth, 21);
    const GridFunction sqrt_w = cellwise_sqrt(w);
    const HaarIndexer indexer(n, depth);
    IntegralPyramid wpyr(w);

    std::vector<GridFunction> disbalanced;
    std::vector<double> cap;
    for (std::int64_t id = 0; id < indexer.size(); ++id) {
        const HaarIndex idx = indexer.at(id);
        const OrthogonalHaar oh = orthogonal_haar(idx, w);
        disbalanced.push_back(cellwise_product(sqrt_w, oh.h));
        cap.push_back(std::sqrt(wpyr.e_set_integral(idx)));
    }

    std::mt19937_64 pick(3);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t a = static_cast<std::size_t>(pick() % disbalanced.size());
        const std::size_t b = static_cast<std::size_t>(pick() % disbalanced.size());
        if (a == b) continue;
        CHECK(std::abs(disbalanced[a].inner(disbalanced[b])) < 1e-12);
    }
    for (std::size_t i = 0; i < disbalanced.size(); ++i)
        CHECK(disbalanced[i].norm_l2() <= cap[i] * (1.0 + 1e-12));

    // Bessel: sum <g w^{1/2}, H^w>^2 / (|E| <w>_E) <= ||g||^2.
    for (std::uint64_t seed = 40; seed < 45; ++seed) {
        const GridFunction g = random_grid(n, depth, seed, -1.0, 1.0);
        const GridFunction gsw = cellwise_product(g, sqrt_w);
        double total = 0.0;
        for (std::int64_t id = 0; id < indexer.size(); ++id) {
            const HaarIndex idx = indexer.at(id);
            const OrthogonalHaar oh = orthogonal_haar(idx, w);
            const double inner = gsw.inner(oh.h);
            total += inner * inner / wpyr.e_set_integral(idx);
        }
        CHECK(total <= g.inner(g) * (1.0 + 1e-12));
    }
}

TEST_CASE("average recovery matches direct averages") {
    const int n = 2;
    const int depth = 3;
    const GridFunction f = random_grid(n, depth, 5, -1.0, 1.0);
    const HaarIndexer indexer(n, depth);

    // Unweighted, every index.
    const CoefficientTree plain = analyze(f);
    for (std::int64_t id = 0; id < indexer.size(); ++id) {
        const HaarIndex idx = indexer.at(id);
        CHECK(average_from_coefficients(plain, idx) ==
              doctest::Approx(f.average(e_set(idx))).epsilon(1e-12));
    }

    // Weighted.
    const GridFunction w = positive_grid(n, depth, 6);
    const CoefficientTree weighted = analyze(f, w);
    IntegralPyramid fw(f, w);
    IntegralPyramid pw(w);
    for (std::int64_t id = 0; id < indexer.size(); ++id) {
        const HaarIndex idx = indexer.at(id);
        const double direct = fw.e_set_integral(idx) / pw.e_set_integral(idx);
        CHECK(average_from_coefficients(weighted, idx, w) ==
              doctest::Approx(direct).epsilon(1e-12));
    }

    // Constants recover themselves.
    const CoefficientTree tc = analyze(GridFunction::constant(n, depth, 2.5), w);
    CHECK(average_from_coefficients(tc, indexer.at(7), w) == doctest::Approx(2.5).epsilon(1e-13));
}

TEST_CASE("tensor basis: orthonormal, matches 1-d Haar, span projections agree") {
    // n=1, signature (0) is the classical Haar function.
    CHECK(max_abs_diff(tensor_haar(TensorHaarIndex{DyadicCube::root(1), 0}, 2),
                       wilson_haar(HaarIndex{DyadicCube::root(1), 1}, 2)) < 1e-15);

    // Gram of the 2^n - 1 signatures on one cube is the identity.
    const DyadicCube q = DyadicCube::root(2);
    std::vector<GridFunction> basis;
    for (std::uint32_t sig = 0; sig < 3; ++sig)
        basis.push_back(tensor_haar(TensorHaarIndex{q, sig}, 2));
    for (std::size_t a = 0; a < basis.size(); ++a)
        for (std::size_t b = 0; b < basis.size(); ++b)
            CHECK(basis[a].inner(basis[b]) == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-13));

    // h^0(x1) h^1(x2): sign split along the first axis, |Q|^{-1/2} = 1.
    const GridFunction mixed = tensor_haar(TensorHaarIndex{q, 1}, 1);  // sig bits: axis0=0, axis1=1
    CHECK(mixed[0] == doctest::Approx(-1.0));
    CHECK(mixed[1] == doctest::Approx(-1.0));
    CHECK(mixed[2] == doctest::Approx(1.0));
    CHECK(mixed[3] == doctest::Approx(1.0));

    CHECK_THROWS_AS(tensor_haar(TensorHaarIndex{q, 3}, 2), std::invalid_argument);

    // Dual-route projection agreement on random data.
    for (std::uint64_t seed = 60; seed < 70; ++seed) {
        const GridFunction f = random_grid(2, 3, seed, -1.0, 1.0);
        const DyadicCube target = (seed % 2) ? DyadicCube::root(2) : DyadicCube::root(2).child(3);
        CHECK(max_abs_diff(project_wq(f, target), project_wq_tensor(f, target)) < 1e-12);
    }

    // Projection fixes members of W(Q) and kills constants.
    const GridFunction h = wilson_haar(HaarIndex{q, 2}, 3);
    CHECK(max_abs_diff(project_wq(h, q), h) < 1e-13);
    CHECK(max_abs_diff(project_wq(GridFunction::constant(2, 3, 3.0), q), GridFunction(2, 3)) <
          1e-13);
}

TEST_CASE("GFN1 round trip and malformed input rejection") {
    const GridFunction f = random_grid(2, 2, 77, -5.0, 5.0);
    std::stringstream buffer;
    write_gfn1(buffer, f);
    const GridFunction g = read_gfn1(buffer);
    CHECK(g.dim() == f.dim());
    CHECK(g.depth() == f.depth());
    CHECK(max_abs_diff(f, g) == 0.0);  // %.17g round-trips doubles exactly

    std::stringstream missing("gfn 1\ndim=1 depth=1\n0.5\n");
    CHECK_THROWS_AS(read_gfn1(missing), std::runtime_error);
    std::stringstream extra("gfn 1\ndim=1 depth=1\n0.5 0.5 0.5\n");
    CHECK_THROWS_AS(read_gfn1(extra), std::runtime_error);
    std::stringstream magic("gfnX 1\ndim=1 depth=1\n0.5 0.5\n");
    CHECK_THROWS_AS(read_gfn1(magic), std::runtime_error);
}
