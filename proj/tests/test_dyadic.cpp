// SPDX-License-Identifier: MIT
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "dpl/dyadic.hpp"

using namespace dpl;

namespace {

using PairFamily = std::vector<std::pair<DyadicRectangle, DyadicRectangle>>;

DyadicRectangle append_axis(const DyadicRectangle& r, const DyadicInterval& iv) {
    std::vector<DyadicInterval> axes;
    for (int a = 0; a < r.dim(); ++a) axes.push_back(r.axis(a));
    axes.push_back(iv);
    return DyadicRectangle(axes);
}

// Literal inductive construction: the first pair splits the last axis, the
// remaining 2^n - 2 pairs interleave the (n-1)-dimensional family restricted
// to the lower and upper slabs.
PairFamily recursive_pairs(const std::vector<DyadicInterval>& cube_axes) {
    const int n = static_cast<int>(cube_axes.size());
    const DyadicInterval last = cube_axes.back();
    if (n == 1) {
        std::vector<DyadicInterval> lo{last.half(0)}, hi{last.half(1)};
        return {{DyadicRectangle(lo), DyadicRectangle(hi)}};
    }
    std::vector<DyadicInterval> tilde(cube_axes.begin(), cube_axes.end() - 1);
    const PairFamily prev = recursive_pairs(tilde);

    std::vector<DyadicInterval> tilde_axes(tilde);
    DyadicRectangle q_tilde{tilde_axes};
    PairFamily out(static_cast<std::size_t>((1 << n) - 1));
    out[0] = {append_axis(q_tilde, last.half(0)), append_axis(q_tilde, last.half(1))};
    for (int j = 1; j <= (1 << (n - 1)) - 1; ++j) {
        const auto& [e1, e2] = prev[static_cast<std::size_t>(j - 1)];
        out[static_cast<std::size_t>(2 * j - 1)] = {append_axis(e1, last.half(0)),
                                                    append_axis(e2, last.half(0))};
        out[static_cast<std::size_t>(2 * j)] = {append_axis(e1, last.half(1)),
                                                append_axis(e2, last.half(1))};
    }
    return out;
}

std::vector<DyadicInterval> cube_axes_of(const DyadicCube& q) {
    std::vector<DyadicInterval> axes;
    for (int a = 0; a < q.dim(); ++a) axes.push_back(DyadicInterval{q.level(), q.coord(a)});
    return axes;
}

DyadicRectangle rect1(double, DyadicInterval iv) {
    std::vector<DyadicInterval> axes{iv};
    return DyadicRectangle(axes);
}

}  // namespace

TEST_CASE("children: interval halving and quadrants") {
    const auto kids1 = children(DyadicCube::root(1));
    REQUIRE(kids1.size() == 2);
    CHECK(kids1[0].to_rectangle() == rect1(0, DyadicInterval{1, 0}));
    CHECK(kids1[1].to_rectangle() == rect1(0, DyadicInterval{1, 1}));

    const auto kids2 = children(DyadicCube::root(2));
    REQUIRE(kids2.size() == 4);
    // Lexicographic coordinate order: (0,0), (0,1), (1,0), (1,1).
    CHECK(kids2[0].coord(0) == 0);
    CHECK(kids2[0].coord(1) == 0);
    CHECK(kids2[1].coord(0) == 0);
    CHECK(kids2[1].coord(1) == 1);
    CHECK(kids2[2].coord(0) == 1);
    CHECK(kids2[2].coord(1) == 0);

    double total = 0.0;
    for (const auto& c : children(DyadicCube::root(3))) total += c.volume();
    CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("children/parent round-trip") {
    for (int n = 1; n <= 4; ++n) {
        const DyadicCube q = DyadicCube::root(n).child(1u % (1u << n));
        for (const auto& c : children(q)) {
            CHECK(c.parent() == q);
            CHECK(q.child(c.child_address()) == c);
        }
    }
}

TEST_CASE("pair_sets: spec examples") {
    const DyadicCube root2 = DyadicCube::root(2);

    // j = 1 splits the last axis.
    auto [a1, a2] = pair_sets(HaarIndex{root2, 1});
    CHECK(a1.axis(0) == DyadicInterval{0, 0});
    CHECK(a1.axis(1) == DyadicInterval{1, 0});
    CHECK(a2.axis(1) == DyadicInterval{1, 1});

    // One dimension: classical halving.
    auto [b1, b2] = pair_sets(HaarIndex{DyadicCube::root(1), 1});
    CHECK(b1 == rect1(0, DyadicInterval{1, 0}));
    CHECK(b2 == rect1(0, DyadicInterval{1, 1}));

    // j = 2: the lower slab split along the first axis.
    auto [c1, c2] = pair_sets(HaarIndex{root2, 2});
    CHECK(c1.axis(0) == DyadicInterval{1, 0});
    CHECK(c1.axis(1) == DyadicInterval{1, 0});
    CHECK(c2.axis(0) == DyadicInterval{1, 1});
    CHECK(c2.axis(1) == DyadicInterval{1, 0});
}

TEST_CASE("e_set: assignments and the recursive-oracle example") {
    const DyadicCube root2 = DyadicCube::root(2);
    const DyadicRectangle e2 = e_set(HaarIndex{root2, 2});
    CHECK(e2.axis(0) == DyadicInterval{0, 0});
    CHECK(e2.axis(1) == DyadicInterval{1, 0});

    for (int n = 1; n <= 4; ++n)
        CHECK(e_set(HaarIndex{DyadicCube::root(n), 1}) == DyadicCube::root(n).to_rectangle());

    // n=3, j=5 = 101b: axis 3 upper, axis 2 lower, axis 1 free.
    const DyadicRectangle e5 = e_set(HaarIndex{DyadicCube::root(3), 5});
    CHECK(e5.axis(0) == DyadicInterval{0, 0});
    CHECK(e5.axis(1) == DyadicInterval{1, 0});
    CHECK(e5.axis(2) == DyadicInterval{1, 1});

    CHECK_THROWS_AS(e_set(HaarIndex{root2, 0}), std::invalid_argument);
    CHECK_THROWS_AS(e_set(HaarIndex{root2, 4}), std::invalid_argument);
}

TEST_CASE("pair_sets closed form equals the recursive construction") {
    for (int n = 1; n <= 4; ++n) {
        std::vector<DyadicCube> cubes{DyadicCube::root(n)};
        for (const auto& c : children(DyadicCube::root(n))) cubes.push_back(c);
        cubes.push_back(children(cubes[1])[0]);
        for (const auto& q : cubes) {
            const PairFamily oracle = recursive_pairs(cube_axes_of(q));
            for (int j = 1; j <= haar_indices_per_cube(n); ++j) {
                const auto [e1, e2] = pair_sets(HaarIndex{q, j});
                CHECK(e1 == oracle[static_cast<std::size_t>(j - 1)].first);
                CHECK(e2 == oracle[static_cast<std::size_t>(j - 1)].second);
            }
        }
    }
}

TEST_CASE("generation measures add up to |Q|") {
    for (int n = 1; n <= 4; ++n) {
        const DyadicCube q = DyadicCube::root(n);
        for (int m = 0; m < n; ++m) {
            double total = 0.0;
            for (int j = (1 << m); j < (1 << (m + 1)); ++j)
                total += e_set(HaarIndex{q, j}).volume();
            CHECK(total == doctest::Approx(q.volume()).epsilon(1e-15));
        }
    }
}

TEST_CASE("verify_partition_properties passes up to level 3 for n <= 4") {
    for (int n = 1; n <= 4; ++n) {
        for (int level = 0; level <= 3; ++level) {
            const std::int64_t cubes = std::int64_t{1} << (n * level);
            // Sample a spread of cubes at each level; exhaustive at the root.
            for (std::int64_t flat = 0; flat < cubes; flat += (level < 2 ? 1 : 7)) {
                const auto report = verify_partition_properties(
                    DyadicCube::from_flat(n, level, static_cast<std::uint64_t>(flat)));
                CHECK(report.pass);
            }
        }
    }
}

TEST_CASE("mutated family fails the nesting trichotomy") {
    const DyadicCube q = DyadicCube::root(2);
    PairFamily family;
    for (int j = 1; j <= 3; ++j) family.push_back(pair_sets(HaarIndex{q, j}));
    // Swap one half between pairs 2 and 3.
    family[1].first = family[2].first;
    const auto report = verify_pair_family(q, family);
    CHECK_FALSE(report.pass);
    REQUIRE(!report.violations.empty());
    CHECK(report.violations[0].find("(4)") != std::string::npos);
}

TEST_CASE("e_halves and e_parent are mutually inverse on the refinement tree") {
    for (int n = 1; n <= 3; ++n) {
        const HaarIndexer indexer(n, 3);
        for (std::int64_t id = 0; id < indexer.size(); ++id) {
            const HaarIndex idx = indexer.at(id);
            auto [h1, h2] = e_halves(idx);
            const auto [e1, e2] = pair_sets(idx);
            CHECK(e_set(h1) == e1);
            CHECK(e_set(h2) == e2);
            const auto p1 = e_parent(h1);
            const auto p2 = e_parent(h2);
            REQUIRE(p1.has_value());
            REQUIRE(p2.has_value());
            CHECK(p1->idx == idx);
            CHECK(p1->half == 1);
            CHECK(p2->idx == idx);
            CHECK(p2->half == 2);
        }
        CHECK_FALSE(e_parent(HaarIndex{DyadicCube::root(n), 1}).has_value());
    }
}

TEST_CASE("HaarIndexer round-trips ids") {
    for (int n = 1; n <= 3; ++n) {
        const HaarIndexer indexer(n, 3);
        const std::int64_t expected =
            haar_indices_per_cube(n) * (((std::int64_t{1} << (n * 3)) - 1) / ((1 << n) - 1));
        CHECK(indexer.size() == expected);
        for (std::int64_t id = 0; id < indexer.size(); ++id)
            CHECK(indexer.id(indexer.at(id)) == id);
    }
}
