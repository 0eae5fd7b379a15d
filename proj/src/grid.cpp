// SPDX-License-Identifier: MIT
#include "dpl/grid.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dpl {

GridFunction::GridFunction(int dim, int depth, double fill) : dim_(dim), depth_(depth) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("GridFunction: dim out of range");
    if (depth < 0) throw std::invalid_argument("GridFunction: negative depth");
    if (dim * depth > 40) throw std::invalid_argument("GridFunction: grid too large");
    values_.assign(std::size_t{1} << (dim * depth), fill);
}

double GridFunction::cell_volume() const { return std::ldexp(1.0, -dim_ * depth_); }

double GridFunction::integral() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s * cell_volume();
}

namespace {

struct CellRange {
    std::int64_t begin = 0;
    std::int64_t count = 0;
};

// Per-axis contiguous cell ranges covered by a rectangle at grid depth L.
void axis_ranges(const DyadicRectangle& r, int depth, std::vector<CellRange>& out) {
    out.resize(static_cast<std::size_t>(r.dim()));
    for (int a = 0; a < r.dim(); ++a) {
        const DyadicInterval& iv = r.axis(a);
        if (iv.level > depth)
            throw std::invalid_argument("rectangle finer than grid depth");
        const int shift = depth - iv.level;
        out[static_cast<std::size_t>(a)] = {static_cast<std::int64_t>(iv.index) << shift,
                                            std::int64_t{1} << shift};
    }
}

}  // namespace

void GridFunction::for_each_cell(const DyadicRectangle& r,
                                 const std::function<void(std::int64_t)>& fn) const {
    if (r.dim() != dim_) throw std::invalid_argument("for_each_cell: dim mismatch");
    std::vector<CellRange> ranges;
    axis_ranges(r, depth_, ranges);

    // Odometer over the per-axis ranges; the last axis is the fastest and
    // contiguous in the flat layout.
    std::vector<std::int64_t> pos(static_cast<std::size_t>(dim_), 0);
    const std::int64_t stride_last = 1;
    for (;;) {
        std::int64_t base = 0;
        for (int a = 0; a < dim_; ++a)
            base = (base << depth_) + ranges[static_cast<std::size_t>(a)].begin +
                   pos[static_cast<std::size_t>(a)];
        // inner loop over the last axis handled by caller callback per cell
        (void)stride_last;
        fn(base);
        int a = dim_ - 1;
        while (a >= 0) {
            if (++pos[static_cast<std::size_t>(a)] < ranges[static_cast<std::size_t>(a)].count) break;
            pos[static_cast<std::size_t>(a)] = 0;
            --a;
        }
        if (a < 0) break;
    }
}

double GridFunction::integral(const DyadicRectangle& r) const {
    double s = 0.0;
    for_each_cell(r, [&](std::int64_t c) { s += values_[static_cast<std::size_t>(c)]; });
    return s * cell_volume();
}

double GridFunction::average(const DyadicRectangle& r) const { return integral(r) / r.volume(); }

double GridFunction::average(const DyadicCube& q) const { return average(q.to_rectangle()); }

double GridFunction::inner(const GridFunction& g) const {
    if (!same_shape(g)) throw std::invalid_argument("inner: shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) s += values_[i] * g.values_[i];
    return s * cell_volume();
}

double GridFunction::norm_l2() const { return std::sqrt(inner(*this)); }

double GridFunction::weighted_inner(const GridFunction& g, const GridFunction& w) const {
    if (!same_shape(g) || !same_shape(w)) throw std::invalid_argument("weighted_inner: shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) s += values_[i] * g.values_[i] * w.values_[i];
    return s * cell_volume();
}

double GridFunction::weighted_norm(const GridFunction& w) const {
    return std::sqrt(weighted_inner(*this, w));
}

void GridFunction::add_on(const DyadicRectangle& r, double delta) {
    for_each_cell(r, [&](std::int64_t c) { values_[static_cast<std::size_t>(c)] += delta; });
}

void GridFunction::fill(double c) { values_.assign(values_.size(), c); }

GridFunction& GridFunction::operator+=(const GridFunction& g) {
    if (!same_shape(g)) throw std::invalid_argument("operator+=: shape mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += g.values_[i];
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& g) {
    if (!same_shape(g)) throw std::invalid_argument("operator-=: shape mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= g.values_[i];
    return *this;
}

GridFunction& GridFunction::operator*=(double c) {
    for (double& v : values_) v *= c;
    return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double c, GridFunction a) { return a *= c; }

GridFunction cellwise_product(const GridFunction& a, const GridFunction& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("cellwise_product: shape mismatch");
    GridFunction out(a.dim(), a.depth());
    for (std::int64_t i = 0; i < a.cell_count(); ++i) out[i] = a[i] * b[i];
    return out;
}

GridFunction cellwise_reciprocal(const GridFunction& a) {
    GridFunction out(a.dim(), a.depth());
    for (std::int64_t i = 0; i < a.cell_count(); ++i) out[i] = 1.0 / a[i];
    return out;
}

GridFunction cellwise_sqrt(const GridFunction& a) {
    GridFunction out(a.dim(), a.depth());
    for (std::int64_t i = 0; i < a.cell_count(); ++i) out[i] = std::sqrt(a[i]);
    return out;
}

GridFunction cellwise_pow(const GridFunction& a, double e) {
    GridFunction out(a.dim(), a.depth());
    for (std::int64_t i = 0; i < a.cell_count(); ++i) out[i] = std::pow(a[i], e);
    return out;
}

double max_abs_diff(const GridFunction& a, const GridFunction& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::int64_t i = 0; i < a.cell_count(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// ---------------------------------------------------------------------------
// GFN1
// ---------------------------------------------------------------------------

void write_gfn1(std::ostream& os, const GridFunction& f) {
    os << "gfn 1\n";
    os << "dim=" << f.dim() << " depth=" << f.depth() << "\n";
    for (std::int64_t i = 0; i < f.cell_count(); ++i) {
        os << format_double(f[i]);
        os << (((i + 1) % 8 == 0 || i + 1 == f.cell_count()) ? '\n' : ' ');
    }
}

GridFunction read_gfn1(std::istream& is) {
    std::string word, version;
    if (!(is >> word >> version) || word != "gfn" || version != "1")
        throw std::runtime_error("GFN1: bad magic");
    std::string dim_kv, depth_kv;
    if (!(is >> dim_kv >> depth_kv) || dim_kv.rfind("dim=", 0) != 0 || depth_kv.rfind("depth=", 0) != 0)
        throw std::runtime_error("GFN1: bad header");
    const int dim = std::stoi(dim_kv.substr(4));
    const int depth = std::stoi(depth_kv.substr(6));
    GridFunction f(dim, depth);
    for (std::int64_t i = 0; i < f.cell_count(); ++i) {
        if (!(is >> f[i])) throw std::runtime_error("GFN1: too few values");
    }
    double extra;
    if (is >> extra) throw std::runtime_error("GFN1: too many values");
    return f;
}

void write_gfn1_file(const std::string& path, const GridFunction& f) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    write_gfn1(os, f);
}

GridFunction read_gfn1_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open for reading: " + path);
    return read_gfn1(is);
}

GridFunction random_grid(int dim, int depth, std::uint64_t seed, double lo, double hi) {
    GridFunction f(dim, depth);
    std::mt19937_64 gen(seed);
    for (std::int64_t i = 0; i < f.cell_count(); ++i) f[i] = lo + (hi - lo) * uniform01(gen);
    return f;
}

// ---------------------------------------------------------------------------
// IntegralPyramid
// ---------------------------------------------------------------------------

IntegralPyramid::IntegralPyramid(const GridFunction& f) : dim_(f.dim()), depth_(f.depth()) {
    build(f);
}

IntegralPyramid::IntegralPyramid(const GridFunction& f, const GridFunction& w)
    : dim_(f.dim()), depth_(f.depth()) {
    build(cellwise_product(f, w));
}

void IntegralPyramid::build(const GridFunction& cells) {
    level_.resize(static_cast<std::size_t>(depth_) + 1);
    auto& finest = level_[static_cast<std::size_t>(depth_)];
    finest.resize(static_cast<std::size_t>(cells.cell_count()));
    const double vol = cells.cell_volume();
    for (std::int64_t i = 0; i < cells.cell_count(); ++i)
        finest[static_cast<std::size_t>(i)] = cells[i] * vol;

    // Coarsen one level at a time; children of a cube are contiguous per axis,
    // so accumulate with an explicit child-address loop for clarity.
    for (int k = depth_ - 1; k >= 0; --k) {
        auto& cur = level_[static_cast<std::size_t>(k)];
        cur.assign(std::size_t{1} << (dim_ * k), 0.0);
        const auto& finer = level_[static_cast<std::size_t>(k) + 1];
        const std::int64_t count = static_cast<std::int64_t>(cur.size());
        for (std::int64_t flat = 0; flat < count; ++flat) {
            const DyadicCube q = DyadicCube::from_flat(dim_, k, static_cast<std::uint64_t>(flat));
            double s = 0.0;
            for (std::uint32_t address = 0; address < (1u << dim_); ++address)
                s += finer[static_cast<std::size_t>(q.child(address).flat_index())];
            cur[static_cast<std::size_t>(flat)] = s;
        }
    }
}

double IntegralPyramid::cube(const DyadicCube& q) const {
    if (q.level() > depth_) throw std::invalid_argument("IntegralPyramid: cube finer than depth");
    return level_[static_cast<std::size_t>(q.level())][static_cast<std::size_t>(q.flat_index())];
}

double IntegralPyramid::child(const DyadicCube& q, std::uint32_t address) const {
    return cube(q.child(address));
}

std::pair<double, double> IntegralPyramid::halves(const HaarIndex& idx) const {
    const int n = dim_;
    const int m = idx.split_count();
    if (idx.cube.level() >= depth_)
        throw std::invalid_argument("IntegralPyramid: index has no children at this depth");
    double s1 = 0.0, s2 = 0.0;
    const int split_axis_bit = m;  // axis n-1-m sits at address bit m
    for (std::uint32_t address = 0; address < (1u << n); ++address) {
        bool inside = true;
        for (int i = 0; i < m; ++i) {
            const std::uint32_t want = static_cast<std::uint32_t>((idx.j >> i) & 1);
            if (((address >> i) & 1u) != want) {  // axis n-1-i has address bit i
                inside = false;
                break;
            }
        }
        if (!inside) continue;
        const double v = child(idx.cube, address);
        if ((address >> split_axis_bit & 1u) == 0)
            s1 += v;
        else
            s2 += v;
    }
    return {s1, s2};
}

double IntegralPyramid::e_set_integral(const HaarIndex& idx) const {
    auto [s1, s2] = halves(idx);
    return s1 + s2;
}

double IntegralPyramid::e_set_average(const HaarIndex& idx) const {
    return e_set_integral(idx) / e_set(idx).volume();
}

}  // namespace dpl
