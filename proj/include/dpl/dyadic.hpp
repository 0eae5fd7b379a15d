// SPDX-License-Identifier: MIT
//
// Dyadic geometry on the unit cube [0,1)^n: cubes, rectangles, and the
// 2^n - 1 pair-set splittings per cube that generate Wilson's Haar system.
// All coordinates are integer (level, index) pairs; containment and
// disjointness tests are exact.
#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dpl/report.hpp"

namespace dpl {

inline constexpr int kMaxDim = 16;

// Half-open dyadic interval [index * 2^-level, (index+1) * 2^-level).
struct DyadicInterval {
    int level = 0;
    std::uint32_t index = 0;

    double length() const;
    double lower() const;
    double upper() const;
    DyadicInterval half(int which) const;  // 0 = lower, 1 = upper
    bool contains(const DyadicInterval& inner) const;
    friend auto operator<=>(const DyadicInterval&, const DyadicInterval&) = default;
};

class DyadicRectangle;

class DyadicCube {
  public:
    DyadicCube() = default;
    DyadicCube(int dim, int level, std::span<const std::uint32_t> coords);
    static DyadicCube root(int dim);
    // Inverse of flat_index() at a given level.
    static DyadicCube from_flat(int dim, int level, std::uint64_t flat);

    int dim() const { return dim_; }
    int level() const { return level_; }
    std::uint32_t coord(int axis) const { return coords_[static_cast<std::size_t>(axis)]; }

    double side() const;    // 2^-level
    double volume() const;  // 2^{-dim*level}

    // Lexicographic rank among the 2^{dim*level} cubes of this level
    // (axis 0 most significant).
    std::uint64_t flat_index() const;

    bool has_parent() const { return level_ > 0; }
    DyadicCube parent() const;
    // Child selected by an address whose bit (dim-1-a) carries the
    // upper/lower choice along axis a; address order is the lexicographic
    // coordinate order of the children.
    DyadicCube child(std::uint32_t address) const;
    // Address of this cube within its parent.
    std::uint32_t child_address() const;

    DyadicRectangle to_rectangle() const;
    bool contains(const DyadicCube& inner) const;

    std::string to_string() const;

    friend bool operator==(const DyadicCube& a, const DyadicCube& b);
    friend std::strong_ordering operator<=>(const DyadicCube& a, const DyadicCube& b);

  private:
    int dim_ = 1;
    int level_ = 0;
    std::array<std::uint32_t, kMaxDim> coords_{};
};

// Product of per-axis dyadic intervals; a cube is the equal-level case.
class DyadicRectangle {
  public:
    DyadicRectangle() = default;
    explicit DyadicRectangle(std::span<const DyadicInterval> axes);

    int dim() const { return dim_; }
    const DyadicInterval& axis(int a) const { return axes_[static_cast<std::size_t>(a)]; }
    DyadicInterval& axis(int a) { return axes_[static_cast<std::size_t>(a)]; }

    double volume() const;
    bool contains(const DyadicRectangle& inner) const;
    // Dyadic rectangles either nest or are disjoint along every axis, so
    // overlap reduces to per-axis containment one way or the other.
    bool intersects(const DyadicRectangle& other) const;
    bool is_cube() const;

    std::string to_string() const;

    friend bool operator==(const DyadicRectangle& a, const DyadicRectangle& b);

  private:
    int dim_ = 0;
    std::array<DyadicInterval, kMaxDim> axes_{};
};

// One of the 2^n - 1 Wilson pairs of a cube; addresses E_{j,Q} and its halves.
struct HaarIndex {
    DyadicCube cube;
    int j = 1;

    // m(j) = floor(log2 j): number of axes already halved; |E_{j,Q}| = |Q| 2^-m.
    int split_count() const;
    std::string to_string() const;

    friend bool operator==(const HaarIndex& a, const HaarIndex& b);
    friend std::strong_ordering operator<=>(const HaarIndex& a, const HaarIndex& b);
};

inline int haar_indices_per_cube(int dim) { return (1 << dim) - 1; }

// The 2^n children of Q in lexicographic coordinate order.
std::vector<DyadicCube> children(const DyadicCube& q);

// Closed form of the inductive pair construction. Writing
// j = 2^m + sum_{i<m} c_i 2^i, the support E_{j,Q} is Q with axis (dim-1-i)
// restricted to its lower (c_i = 0) or upper (c_i = 1) half for i = 0..m-1;
// the pair then splits E_{j,Q} along axis (dim-1-m) into lower/upper halves.
std::pair<DyadicRectangle, DyadicRectangle> pair_sets(const HaarIndex& idx);

// E_{j,Q} = E^1 u E^2 as a single rectangle; e_set({Q,1}) = Q.
DyadicRectangle e_set(const HaarIndex& idx);

// The two halves of E_{j,Q} viewed as nodes of the global binary refinement
// tree: for j < 2^{n-1} they are (Q,2j) and (Q,2j+1); otherwise they are the
// first-index nodes of two child cubes of Q.
std::pair<HaarIndex, HaarIndex> e_halves(const HaarIndex& idx);

struct EParent {
    HaarIndex idx;
    int half = 1;  // 1 if the child was E^1 of the parent, 2 if E^2
};

// Parent node in the refinement tree; empty at the root pair (root cube, j=1).
std::optional<EParent> e_parent(const HaarIndex& idx);

// Exhaustive structural check of the pair family of Q: equal half measures,
// halves are unions of children, disjointness, the nesting trichotomy for
// j != k, per-generation covers of Q, and identification of the finest halves
// with the children of Q. Reports the first violated clause.
CheckReport verify_partition_properties(const DyadicCube& q);

// Same checks against a caller-supplied family (entry k holds the pair for
// j = k+1); lets tests inject faults.
CheckReport verify_pair_family(const DyadicCube& q,
                               std::span<const std::pair<DyadicRectangle, DyadicRectangle>> family);

// Canonical enumeration of all Haar indices with cube level < depth:
// level-major, then cube rank, then j.
class HaarIndexer {
  public:
    HaarIndexer(int dim, int depth);

    int dim() const { return dim_; }
    int depth() const { return depth_; }
    std::int64_t size() const { return size_; }

    std::int64_t id(const HaarIndex& idx) const;
    HaarIndex at(std::int64_t id) const;

  private:
    int dim_ = 1;
    int depth_ = 0;
    std::int64_t size_ = 0;
    std::vector<std::int64_t> level_offset_;
};

}  // namespace dpl
