// SPDX-License-Identifier: MIT
//
// Piecewise-constant functions at dyadic depth L on [0,1)^n. Cell values are
// the exact ambient model: every average over a dyadic cube or rectangle of
// level <= L is a finite mean of cells, so containment and averaging carry
// no discretization error beyond the representation itself.
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "dpl/dyadic.hpp"

namespace dpl {

class GridFunction {
  public:
    GridFunction() = default;
    GridFunction(int dim, int depth, double fill = 0.0);
    static GridFunction constant(int dim, int depth, double c) { return GridFunction(dim, depth, c); }

    int dim() const { return dim_; }
    int depth() const { return depth_; }
    std::int64_t cell_count() const { return static_cast<std::int64_t>(values_.size()); }
    std::int64_t cells_per_axis() const { return std::int64_t{1} << depth_; }
    double cell_volume() const;

    double& operator[](std::int64_t flat) { return values_[static_cast<std::size_t>(flat)]; }
    double operator[](std::int64_t flat) const { return values_[static_cast<std::size_t>(flat)]; }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    bool same_shape(const GridFunction& other) const {
        return dim_ == other.dim_ && depth_ == other.depth_;
    }

    // Integrals are plain cell sums times the cell volume; averages divide by
    // the region volume, so both are exact for the discretized function.
    double integral() const;
    double integral(const DyadicRectangle& r) const;
    double average(const DyadicRectangle& r) const;
    double average(const DyadicCube& q) const;

    double inner(const GridFunction& g) const;  // \int f g
    double norm_l2() const;
    double weighted_inner(const GridFunction& g, const GridFunction& w) const;  // \int f g w
    double weighted_norm(const GridFunction& w) const;                          // L2(w) norm

    void add_on(const DyadicRectangle& r, double delta);
    void fill(double c);

    // Visits the flat indices of the cells covered by r, in lexicographic order.
    void for_each_cell(const DyadicRectangle& r, const std::function<void(std::int64_t)>& fn) const;

    GridFunction& operator+=(const GridFunction& g);
    GridFunction& operator-=(const GridFunction& g);
    GridFunction& operator*=(double c);

  private:
    int dim_ = 1;
    int depth_ = 0;
    std::vector<double> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double c, GridFunction a);

GridFunction cellwise_product(const GridFunction& a, const GridFunction& b);
GridFunction cellwise_reciprocal(const GridFunction& a);
GridFunction cellwise_sqrt(const GridFunction& a);
GridFunction cellwise_pow(const GridFunction& a, double e);
double max_abs_diff(const GridFunction& a, const GridFunction& b);

// GFN1 text format: "gfn 1" / "dim=<n> depth=<L>" / 2^{nL} values in
// lexicographic cell order. Readers reject value-count mismatches.
void write_gfn1(std::ostream& os, const GridFunction& f);
GridFunction read_gfn1(std::istream& is);
void write_gfn1_file(const std::string& path, const GridFunction& f);
GridFunction read_gfn1_file(const std::string& path);

// Deterministic uniform draw in [0,1) from the raw engine stream; used
// instead of std::uniform_real_distribution so results do not depend on the
// standard library implementation.
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

GridFunction random_grid(int dim, int depth, std::uint64_t seed, double lo, double hi);

// Per-level table of cube integrals of f (optionally of f*w), supporting O(2^n)
// lookups of integrals over any E_{j,Q} and its halves.
class IntegralPyramid {
  public:
    explicit IntegralPyramid(const GridFunction& f);
    IntegralPyramid(const GridFunction& f, const GridFunction& w);

    int dim() const { return dim_; }
    int depth() const { return depth_; }

    double root() const { return level_[0][0]; }
    double cube(const DyadicCube& q) const;
    double child(const DyadicCube& q, std::uint32_t address) const;

    // Integrals over E^1_{j,Q} and E^2_{j,Q}, assembled from child cubes.
    std::pair<double, double> halves(const HaarIndex& idx) const;
    double e_set_integral(const HaarIndex& idx) const;
    double e_set_average(const HaarIndex& idx) const;

  private:
    void build(const GridFunction& cells);

    int dim_ = 1;
    int depth_ = 0;
    std::vector<std::vector<double>> level_;  // level k: 2^{nk} integrals, lex order
};

}  // namespace dpl
