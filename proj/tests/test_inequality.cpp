// SPDX-License-Identifier: MIT
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "dpl/inequality.hpp"

using namespace dpl;

namespace {

// Independent inclusion test: enumerate the depth-L cells of both sets and
// compare as point sets. Deliberately avoids DyadicRectangle::contains.
bool included_by_cells(const GridFunction& probe, const DyadicRectangle& inner,
                       const DyadicRectangle& outer) {
    std::set<std::int64_t> outer_cells;
    probe.for_each_cell(outer, [&](std::int64_t c) { outer_cells.insert(c); });
    bool ok = true;
    probe.for_each_cell(inner, [&](std::int64_t c) {
        if (!outer_cells.count(c)) ok = false;
    });
    return ok;
}

double carleson_sum_bruteforce(const CarlesonSequence& alpha, const HaarIndex& base) {
    const GridFunction probe(alpha.dim(), alpha.depth());
    const DyadicRectangle base_rect = e_set(base);
    double total = 0.0;
    for (std::int64_t id = 0; id < alpha.indexer().size(); ++id) {
        const HaarIndex idx = alpha.indexer().at(id);
        if (included_by_cells(probe, e_set(idx), base_rect)) total += alpha.at(idx);
    }
    return total / base_rect.volume();
}

Weight two_cell_weight() {
    GridFunction g(1, 1);
    g[0] = 1.0;
    g[1] = 3.0;
    return Weight(std::move(g));
}

}  // namespace

TEST_CASE("carleson_sum: trivial masses and the brute-force oracle") {
    const HaarIndex root_idx{DyadicCube::root(2), 1};
    CarlesonSequence zero = CarlesonSequence::zeros(2, 3);
    CHECK(carleson_sum(zero, root_idx) == 0.0);

    // A unit mass at exactly the base index contributes 1/|E|.
    const HaarIndex idx{DyadicCube::root(2).child(1), 3};
    CarlesonSequence unit = CarlesonSequence::zeros(2, 3);
    unit.set(idx, 1.0);
    CHECK(carleson_sum(unit, idx) == doctest::Approx(1.0 / e_set(idx).volume()).epsilon(1e-14));

    // Random sequences against the cell-enumeration oracle, several bases.
    const CarlesonSequence alpha = CarlesonSequence::from_symbol(make_random_symbol(2, 3, 5));
    const HaarIndexer& indexer = alpha.indexer();
    std::mt19937_64 pick(2);
    for (int trial = 0; trial < 12; ++trial) {
        const HaarIndex base = indexer.at(
            static_cast<std::int64_t>(pick() % static_cast<std::uint64_t>(indexer.size())));
        CHECK(carleson_sum(alpha, base) ==
              doctest::Approx(carleson_sum_bruteforce(alpha, base)).epsilon(1e-12));
    }

    CHECK_THROWS_AS(unit.set(idx, -1.0), std::invalid_argument);
}

TEST_CASE("descendant sums agree with carleson_sum on every node") {
    const CarlesonSequence alpha = CarlesonSequence::from_symbol(make_random_symbol(2, 3, 9));
    const HaarIndexer& indexer = alpha.indexer();
    const std::vector<double> sums = e_tree_descendant_sums(indexer, alpha.values());
    for (std::int64_t id = 0; id < indexer.size(); ++id) {
        const HaarIndex idx = indexer.at(id);
        const double direct = carleson_sum(alpha, idx) * e_set(idx).volume();
        CHECK(sums[static_cast<std::size_t>(id)] == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("weighted Carleson embedding: trivial and nontrivial instances") {
    // alpha = 0: ratio 0.
    const Weight unit(GridFunction::constant(1, 2, 1.0));
    CHECK(weighted_carleson_embedding_check(CarlesonSequence::zeros(1, 2), unit,
                                            GridFunction::constant(1, 2, 1.0))
              .empirical_constant == 0.0);

    // Unit mass at the root, w = 1, f = 1: LHS = <f>^2 = 1, A = 1 / <w> = 1,
    // ||f||^2 = 1, ratio 1.
    CarlesonSequence mass = CarlesonSequence::zeros(1, 2);
    mass.set(HaarIndex{DyadicCube::root(1), 1}, 1.0);
    const auto hand =
        weighted_carleson_embedding_check(mass, unit, GridFunction::constant(1, 2, 1.0));
    CHECK(hand.empirical_constant == doctest::Approx(1.0).epsilon(1e-13));

    // Cascade weight, symbol-driven alpha, random f: finite ratios.
    const Weight w = make_cascade_weight(2, 3, 0.4, 3);
    const CarlesonSequence alpha = CarlesonSequence::from_symbol(make_random_symbol(2, 3, 4));
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const GridFunction f = random_grid(2, 3, 50 + seed, -1.0, 1.0);
        const auto report = weighted_carleson_embedding_check(alpha, w, f);
        CHECK(std::isfinite(report.empirical_constant));
        worst = std::max(worst, report.empirical_constant);
    }
    CHECK(worst > 0.0);
}

TEST_CASE("bilinear embedding: both variants on trivial and cascade data") {
    const Weight unit(GridFunction::constant(1, 2, 1.0));
    const GridFunction one = GridFunction::constant(1, 2, 1.0);
    for (auto variant : {BilinearVariant::kWeightedAverage, BilinearVariant::kProductWeights}) {
        const auto trivial =
            bilinear_embedding_check(CarlesonSequence::zeros(1, 2), unit, unit, one, one, variant);
        CHECK(trivial.empirical_constant == 0.0);
        CHECK(trivial.pass);
    }

    // Unit mass at the root with unit weights: LHS = 1, A = 1, norms 1.
    CarlesonSequence mass = CarlesonSequence::zeros(1, 2);
    mass.set(HaarIndex{DyadicCube::root(1), 1}, 1.0);
    for (auto variant : {BilinearVariant::kWeightedAverage, BilinearVariant::kProductWeights}) {
        const auto hand = bilinear_embedding_check(mass, unit, unit, one, one, variant);
        CHECK(hand.empirical_constant == doctest::Approx(1.0).epsilon(1e-13));
    }

    // w cascade with v = w^{-1}.
    const Weight w = make_cascade_weight(2, 3, 0.4, 6);
    const Weight v = w.reciprocal();
    const CarlesonSequence alpha = CarlesonSequence::from_symbol(make_random_symbol(2, 3, 7));
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const GridFunction f = random_grid(2, 3, 80 + seed, -1.0, 1.0);
        const GridFunction g = random_grid(2, 3, 90 + seed, -1.0, 1.0);
        const auto report =
            bilinear_embedding_check(alpha, w, v, f, g, BilinearVariant::kWeightedAverage);
        CHECK(std::isfinite(report.empirical_constant));
        CHECK(report.params.count("hypothesis_note") == 1);
    }
}

TEST_CASE("propositions: unit weight kills the difference sums exactly") {
    const Weight unit(GridFunction::constant(2, 3, 1.0));
    for (auto which : {Proposition::kWp2, Proposition::kWp3, Proposition::kWp4}) {
        for (auto variant : {RegionClass::kDyadic, RegionClass::kAnisotropic}) {
            const auto report = proposition_suite(unit, which, variant);
            CHECK(report.empirical_constant == 0.0);
            CHECK(report.pass);
        }
    }
}

TEST_CASE("propositions: hand arithmetic for the two-cell weight") {
    // w = (1,3) on the halves of [0,1), depth 1: a single (Q',i) node.
    // <w> = 2, <w^{-1}> = 2/3, [w]_{A2^d} = 4/3.
    const Weight w = two_cell_weight();

    const auto wp2 = proposition_suite(w, Proposition::kWp2, RegionClass::kDyadic);
    CHECK(wp2.empirical_constant == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(wp2.params.at("free_constant") == format_double(0.5 / (2.0 / 3.0)));

    const auto wp3 = proposition_suite(w, Proposition::kWp3, RegionClass::kDyadic);
    CHECK(wp3.empirical_constant == doctest::Approx(1.0).epsilon(1e-12));

    const auto wp4 = proposition_suite(w, Proposition::kWp4, RegionClass::kDyadic);
    CHECK(wp4.empirical_constant == doctest::Approx(0.75).epsilon(1e-12));

    CarlesonSequence mass = CarlesonSequence::zeros(1, 1);
    mass.set(HaarIndex{DyadicCube::root(1), 1}, 1.0);
    const auto wp1 = proposition_suite(w, Proposition::kWp1, RegionClass::kDyadic, &mass);
    CHECK(wp1.empirical_constant == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(wp1.params.at("carleson_constant") == format_double(1.0));

    // In one dimension the anisotropic and dyadic variants coincide.
    const auto wp4r = proposition_suite(w, Proposition::kWp4, RegionClass::kAnisotropic);
    CHECK(wp4r.empirical_constant == doctest::Approx(0.75).epsilon(1e-12));

    CHECK_THROWS_AS(proposition_suite(w, Proposition::kWp1, RegionClass::kDyadic, nullptr),
                    std::invalid_argument);
}

TEST_CASE("propositions: empirical constants are scale invariant") {
    const Weight w = make_cascade_weight(2, 3, 0.4, 11);
    GridFunction scaled_grid = w.grid();
    scaled_grid *= 7.0;
    const Weight scaled(std::move(scaled_grid));
    const CarlesonSequence alpha = CarlesonSequence::from_symbol(make_random_symbol(2, 3, 12));

    for (auto which :
         {Proposition::kWp1, Proposition::kWp2, Proposition::kWp3, Proposition::kWp4}) {
        const auto base = proposition_suite(w, which, RegionClass::kDyadic, &alpha);
        const auto other = proposition_suite(scaled, which, RegionClass::kDyadic, &alpha);
        CHECK(other.empirical_constant == doctest::Approx(base.empirical_constant).epsilon(1e-10));
    }
}

TEST_CASE("propositions: finite on the cascade and power suites") {
    for (int n = 1; n <= 2; ++n) {
        for (int depth = 3; depth <= 4; ++depth) {
            const Weight cascade = make_cascade_weight(n, depth, 0.3, 7);
            const Weight power = make_power_weight(n, depth, n == 1 ? 0.5 : 1.0);
            const CarlesonSequence alpha =
                CarlesonSequence::from_symbol(make_random_symbol(n, depth, 13));
            for (const Weight& w : {cascade, power}) {
                for (auto variant : {RegionClass::kDyadic, RegionClass::kAnisotropic}) {
                    for (auto which : {Proposition::kWp1, Proposition::kWp2, Proposition::kWp3,
                                       Proposition::kWp4}) {
                        const auto report = proposition_suite(w, which, variant, &alpha);
                        CHECK(std::isfinite(report.empirical_constant));
                        CHECK(report.empirical_constant >= 0.0);
                    }
                }
            }
        }
    }
}

TEST_CASE("bellman check: domain membership, degenerate midpoint, seeded run") {
    const BellmanPoint inside{1.0, 0.5, 0.5, 0.25};
    CHECK(inside.in_domain());
    const BellmanPoint outside{1.0, 2.0, 0.5, 0.25};  // f^2 > Fu
    CHECK_FALSE(outside.in_domain());

    // Boundary of the domain: f^2 = Fu, Y = u still satisfies the size bound.
    const double b = 4.0 * (1.0 - 1.0 / (1.0 + 1.0));
    CHECK(b >= 0.0);
    CHECK(b <= 4.0);

    const auto report = bellman_lmwce_check(20000, 42);
    CHECK(report.pass);
    CHECK(report.violations.empty());
    CHECK(report.params.at("violation_count") == "0");

    CHECK_THROWS_AS(bellman_lmwce_check(0, 1), std::invalid_argument);
}

TEST_CASE("induction in scales: wp1 and mwce instances hold; faults are caught") {
    const Weight w = make_cascade_weight(2, 3, 0.4, 14);
    const CarlesonSequence alpha = CarlesonSequence::from_symbol(make_random_symbol(2, 3, 15));
    const HaarIndex root{DyadicCube::root(2), 1};

    InductionInstance wp1 = make_wp1_instance(w, alpha);
    CHECK(wp1.max_midpoint_defect() < 1e-12);
    const auto wp1_report = induction_in_scales_check(wp1, root);
    CHECK(wp1_report.pass);
    CHECK(wp1_report.empirical_constant <= 1.0);

    const GridFunction f = random_grid(2, 3, 16, 0.1, 2.0);
    InductionInstance mwce = make_mwce_instance(w, alpha, f);
    CHECK(mwce.max_midpoint_defect() < 1e-12);
    const auto mwce_report = induction_in_scales_check(mwce, root);
    CHECK(mwce_report.pass);

    // Also check at non-root bases.
    const HaarIndexer indexer(2, 3);
    for (std::int64_t id : {std::int64_t{1}, std::int64_t{2}, std::int64_t{11}}) {
        CHECK(induction_in_scales_check(wp1, indexer.at(id)).pass);
        CHECK(induction_in_scales_check(mwce, indexer.at(id)).pass);
    }

    // Fault injection: scaled contributions must fail.
    InductionInstance broken = wp1;
    for (double& c : broken.convexity) c *= 1e6;
    const auto broken_report = induction_in_scales_check(broken, root);
    CHECK_FALSE(broken_report.pass);
    CHECK(!broken_report.violations.empty());

    // Corrupted midpoint data is rejected.
    InductionInstance corrupt = wp1;
    corrupt.y[0] += 1.0;
    CHECK_THROWS_AS(induction_in_scales_check(corrupt, root), std::invalid_argument);
}

TEST_CASE("mmte suite: unit weight, hand case, cascade chain") {
    const auto trivial = mmte_suite(Weight(GridFunction::constant(2, 2, 1.0)));
    CHECK(trivial.empirical_constant == 0.0);
    CHECK(trivial.pass);

    // Two-cell weight: the single-node chain is Cauchy-Schwarz with equality.
    const auto hand = mmte_suite(two_cell_weight());
    CHECK(hand.pass);
    CHECK(std::stod(hand.params.at("square_constant")) == doctest::Approx(0.75).epsilon(1e-13));
    CHECK(std::stod(hand.params.at("chain_max_excess")) <= 1e-12);

    for (std::uint64_t seed = 20; seed < 24; ++seed) {
        const auto report = mmte_suite(make_cascade_weight(2, 3, 0.4, seed));
        CHECK(report.pass);
        CHECK(std::isfinite(report.empirical_constant));
        CHECK(std::stod(report.params.at("chain_max_excess")) <= 1e-12);
    }
}

TEST_CASE("scaling experiment: table shape, slope, degenerate family") {
    std::vector<WeightFamilyEntry> family;
    for (double a : {0.0, 0.4, -0.4}) family.push_back({a, make_power_weight(1, 5, a)});
    const GridFunction b = make_log_symbol(1, 5);

    const ScalingTable table = scaling_experiment(family, b, ScalingOp::kParaproduct);
    REQUIRE(table.rows.size() == 3);
    for (const auto& row : table.rows) {
        CHECK(std::isfinite(row.norm));
        CHECK(row.norm > 0.0);
        CHECK(row.ratio > 0.0);
        CHECK(row.a2r >= row.a2d * (1.0 - 1e-12));
    }
    CHECK(std::isfinite(table.slope));

    const std::string csv = scaling_csv(table);
    CHECK(csv.rfind("alpha,a2d,a2r,norm,ratio,slope\n", 0) == 0);

    // Martingale and square variants run on the same family.
    CHECK(scaling_experiment(family, b, ScalingOp::kMartingale).rows.size() == 3);
    CHECK(scaling_experiment(family, b, ScalingOp::kSquare).rows.size() == 3);

    std::vector<WeightFamilyEntry> degenerate;
    degenerate.push_back({0.0, Weight(GridFunction::constant(1, 3, 1.0))});
    CHECK_THROWS_AS(scaling_experiment(degenerate, b, ScalingOp::kParaproduct),
                    std::invalid_argument);
}
