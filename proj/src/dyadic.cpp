// SPDX-License-Identifier: MIT
#include "dpl/dyadic.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dpl {

// ---------------------------------------------------------------------------
// DyadicInterval
// ---------------------------------------------------------------------------

double DyadicInterval::length() const { return std::ldexp(1.0, -level); }
double DyadicInterval::lower() const { return std::ldexp(static_cast<double>(index), -level); }
double DyadicInterval::upper() const { return std::ldexp(static_cast<double>(index) + 1.0, -level); }

DyadicInterval DyadicInterval::half(int which) const {
    return DyadicInterval{level + 1, 2 * index + static_cast<std::uint32_t>(which)};
}

bool DyadicInterval::contains(const DyadicInterval& inner) const {
    if (level > inner.level) return false;
    return (inner.index >> (inner.level - level)) == index;
}

// ---------------------------------------------------------------------------
// DyadicCube
// ---------------------------------------------------------------------------

DyadicCube::DyadicCube(int dim, int level, std::span<const std::uint32_t> coords)
    : dim_(dim), level_(level) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("DyadicCube: dim out of range");
    if (level < 0) throw std::invalid_argument("DyadicCube: negative level");
    if (static_cast<int>(coords.size()) != dim)
        throw std::invalid_argument("DyadicCube: coordinate count mismatch");
    for (int a = 0; a < dim; ++a) {
        if (level < 32 && coords[static_cast<std::size_t>(a)] >= (1u << level))
            throw std::invalid_argument("DyadicCube: coordinate out of range");
        coords_[static_cast<std::size_t>(a)] = coords[static_cast<std::size_t>(a)];
    }
}

DyadicCube DyadicCube::root(int dim) {
    std::vector<std::uint32_t> zeros(static_cast<std::size_t>(dim), 0);
    return DyadicCube(dim, 0, zeros);
}

DyadicCube DyadicCube::from_flat(int dim, int level, std::uint64_t flat) {
    std::vector<std::uint32_t> coords(static_cast<std::size_t>(dim));
    for (int a = dim - 1; a >= 0; --a) {
        coords[static_cast<std::size_t>(a)] = static_cast<std::uint32_t>(flat & ((1u << level) - 1u));
        flat >>= level;
    }
    return DyadicCube(dim, level, coords);
}

double DyadicCube::side() const { return std::ldexp(1.0, -level_); }
double DyadicCube::volume() const { return std::ldexp(1.0, -dim_ * level_); }

std::uint64_t DyadicCube::flat_index() const {
    std::uint64_t flat = 0;
    for (int a = 0; a < dim_; ++a) flat = (flat << level_) | coords_[static_cast<std::size_t>(a)];
    return flat;
}

DyadicCube DyadicCube::parent() const {
    if (!has_parent()) throw std::logic_error("DyadicCube: root has no parent");
    DyadicCube p(*this);
    p.level_ = level_ - 1;
    for (int a = 0; a < dim_; ++a) p.coords_[static_cast<std::size_t>(a)] >>= 1;
    return p;
}

DyadicCube DyadicCube::child(std::uint32_t address) const {
    DyadicCube c(*this);
    c.level_ = level_ + 1;
    for (int a = 0; a < dim_; ++a) {
        std::uint32_t bit = (address >> (dim_ - 1 - a)) & 1u;
        c.coords_[static_cast<std::size_t>(a)] = 2 * coords_[static_cast<std::size_t>(a)] + bit;
    }
    return c;
}

std::uint32_t DyadicCube::child_address() const {
    if (!has_parent()) throw std::logic_error("DyadicCube: root has no parent address");
    std::uint32_t address = 0;
    for (int a = 0; a < dim_; ++a)
        address |= (coords_[static_cast<std::size_t>(a)] & 1u) << (dim_ - 1 - a);
    return address;
}

DyadicRectangle DyadicCube::to_rectangle() const {
    std::vector<DyadicInterval> axes(static_cast<std::size_t>(dim_));
    for (int a = 0; a < dim_; ++a)
        axes[static_cast<std::size_t>(a)] = DyadicInterval{level_, coords_[static_cast<std::size_t>(a)]};
    return DyadicRectangle(axes);
}

bool DyadicCube::contains(const DyadicCube& inner) const {
    if (dim_ != inner.dim_ || level_ > inner.level_) return false;
    for (int a = 0; a < dim_; ++a) {
        if ((inner.coords_[static_cast<std::size_t>(a)] >> (inner.level_ - level_)) !=
            coords_[static_cast<std::size_t>(a)])
            return false;
    }
    return true;
}

std::string DyadicCube::to_string() const { return to_rectangle().to_string(); }

bool operator==(const DyadicCube& a, const DyadicCube& b) {
    if (a.dim_ != b.dim_ || a.level_ != b.level_) return false;
    for (int i = 0; i < a.dim_; ++i)
        if (a.coords_[static_cast<std::size_t>(i)] != b.coords_[static_cast<std::size_t>(i)]) return false;
    return true;
}

std::strong_ordering operator<=>(const DyadicCube& a, const DyadicCube& b) {
    if (auto c = a.dim_ <=> b.dim_; c != 0) return c;
    if (auto c = a.level_ <=> b.level_; c != 0) return c;
    for (int i = 0; i < a.dim_; ++i) {
        if (auto c = a.coords_[static_cast<std::size_t>(i)] <=> b.coords_[static_cast<std::size_t>(i)];
            c != 0)
            return c;
    }
    return std::strong_ordering::equal;
}

// ---------------------------------------------------------------------------
// DyadicRectangle
// ---------------------------------------------------------------------------

DyadicRectangle::DyadicRectangle(std::span<const DyadicInterval> axes)
    : dim_(static_cast<int>(axes.size())) {
    if (dim_ < 1 || dim_ > kMaxDim) throw std::invalid_argument("DyadicRectangle: dim out of range");
    for (int a = 0; a < dim_; ++a) axes_[static_cast<std::size_t>(a)] = axes[static_cast<std::size_t>(a)];
}

double DyadicRectangle::volume() const {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= axes_[static_cast<std::size_t>(a)].length();
    return v;
}

bool DyadicRectangle::contains(const DyadicRectangle& inner) const {
    if (dim_ != inner.dim_) return false;
    for (int a = 0; a < dim_; ++a)
        if (!axes_[static_cast<std::size_t>(a)].contains(inner.axes_[static_cast<std::size_t>(a)]))
            return false;
    return true;
}

bool DyadicRectangle::intersects(const DyadicRectangle& other) const {
    if (dim_ != other.dim_) return false;
    for (int a = 0; a < dim_; ++a) {
        const auto& x = axes_[static_cast<std::size_t>(a)];
        const auto& y = other.axes_[static_cast<std::size_t>(a)];
        if (!x.contains(y) && !y.contains(x)) return false;
    }
    return true;
}

bool DyadicRectangle::is_cube() const {
    for (int a = 1; a < dim_; ++a)
        if (axes_[static_cast<std::size_t>(a)].level != axes_[0].level) return false;
    return true;
}

std::string DyadicRectangle::to_string() const {
    std::ostringstream os;
    for (int a = 0; a < dim_; ++a) {
        if (a) os << "x";
        const auto& iv = axes_[static_cast<std::size_t>(a)];
        os << "[" << format_double(iv.lower()) << "," << format_double(iv.upper()) << ")";
    }
    return os.str();
}

bool operator==(const DyadicRectangle& a, const DyadicRectangle& b) {
    if (a.dim_ != b.dim_) return false;
    for (int i = 0; i < a.dim_; ++i)
        if (!(a.axes_[static_cast<std::size_t>(i)] == b.axes_[static_cast<std::size_t>(i)])) return false;
    return true;
}

// ---------------------------------------------------------------------------
// HaarIndex and the pair-set construction
// ---------------------------------------------------------------------------

int HaarIndex::split_count() const {
    return std::bit_width(static_cast<std::uint32_t>(j)) - 1;
}

std::string HaarIndex::to_string() const {
    std::ostringstream os;
    os << "j=" << j << " Q=" << cube.to_string();
    return os.str();
}

bool operator==(const HaarIndex& a, const HaarIndex& b) { return a.cube == b.cube && a.j == b.j; }

std::strong_ordering operator<=>(const HaarIndex& a, const HaarIndex& b) {
    if (auto c = a.cube <=> b.cube; c != 0) return c;
    return a.j <=> b.j;
}

std::vector<DyadicCube> children(const DyadicCube& q) {
    std::vector<DyadicCube> out;
    const std::uint32_t count = 1u << q.dim();
    out.reserve(count);
    for (std::uint32_t address = 0; address < count; ++address) out.push_back(q.child(address));
    return out;
}

namespace {

void check_haar_index(const HaarIndex& idx) {
    const int n = idx.cube.dim();
    if (idx.j < 1 || idx.j > haar_indices_per_cube(n))
        throw std::invalid_argument("HaarIndex: j out of [1, 2^n - 1]");
}

}  // namespace

std::pair<DyadicRectangle, DyadicRectangle> pair_sets(const HaarIndex& idx) {
    check_haar_index(idx);
    const int n = idx.cube.dim();
    const int m = idx.split_count();

    std::vector<DyadicInterval> axes(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) axes[static_cast<std::size_t>(a)] = DyadicInterval{idx.cube.level(), idx.cube.coord(a)};
    for (int i = 0; i < m; ++i) {
        const int bit = (idx.j >> i) & 1;
        const int axis = n - 1 - i;
        axes[static_cast<std::size_t>(axis)] = axes[static_cast<std::size_t>(axis)].half(bit);
    }

    const int split_axis = n - 1 - m;
    std::vector<DyadicInterval> lower(axes), upper(axes);
    lower[static_cast<std::size_t>(split_axis)] = axes[static_cast<std::size_t>(split_axis)].half(0);
    upper[static_cast<std::size_t>(split_axis)] = axes[static_cast<std::size_t>(split_axis)].half(1);
    return {DyadicRectangle(lower), DyadicRectangle(upper)};
}

DyadicRectangle e_set(const HaarIndex& idx) {
    check_haar_index(idx);
    const int n = idx.cube.dim();
    const int m = idx.split_count();

    std::vector<DyadicInterval> axes(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) axes[static_cast<std::size_t>(a)] = DyadicInterval{idx.cube.level(), idx.cube.coord(a)};
    for (int i = 0; i < m; ++i) {
        const int bit = (idx.j >> i) & 1;
        const int axis = n - 1 - i;
        axes[static_cast<std::size_t>(axis)] = axes[static_cast<std::size_t>(axis)].half(bit);
    }
    return DyadicRectangle(axes);
}

std::pair<HaarIndex, HaarIndex> e_halves(const HaarIndex& idx) {
    check_haar_index(idx);
    const int n = idx.cube.dim();
    const int m = idx.split_count();
    if (m < n - 1) {
        // E^1_{j,Q} = E_{j + 2^m, Q} and E^2_{j,Q} = E_{j + 2^{m+1}, Q}: the
        // halves restrict one more axis, with the new bit in position m.
        return {HaarIndex{idx.cube, idx.j + (1 << m)}, HaarIndex{idx.cube, idx.j + (1 << (m + 1))}};
    }
    // Finest splits: the halves are child cubes. Their addresses carry the
    // restriction bits of j in the low positions and the half choice on axis 0.
    const std::uint32_t low = static_cast<std::uint32_t>(idx.j) - (1u << (n - 1));
    const std::uint32_t a1 = low;
    const std::uint32_t a2 = low | (1u << (n - 1));
    return {HaarIndex{idx.cube.child(a1), 1}, HaarIndex{idx.cube.child(a2), 1}};
}

std::optional<EParent> e_parent(const HaarIndex& idx) {
    check_haar_index(idx);
    const int n = idx.cube.dim();
    if (idx.j > 1) {
        const int m = idx.split_count();
        const int top = (idx.j >> (m - 1)) & 1;  // the most recent restriction bit
        if (top == 0) return EParent{HaarIndex{idx.cube, idx.j - (1 << (m - 1))}, 1};
        return EParent{HaarIndex{idx.cube, idx.j - (1 << m)}, 2};
    }
    if (!idx.cube.has_parent()) return std::nullopt;
    const std::uint32_t address = idx.cube.child_address();
    const std::uint32_t topbit = address >> (n - 1);
    const std::uint32_t low = address & ((1u << (n - 1)) - 1u);
    const int j = (1 << (n - 1)) + static_cast<int>(low);
    return EParent{HaarIndex{idx.cube.parent(), j}, static_cast<int>(topbit) + 1};
}

// ---------------------------------------------------------------------------
// Partition property verification
// ---------------------------------------------------------------------------

namespace {

// Mask of the children of q covered by rect, or nullopt if rect is not a
// union of children.
std::optional<std::uint64_t> child_mask(const DyadicCube& q, const DyadicRectangle& rect) {
    const int n = q.dim();
    std::uint64_t mask = 0;
    double covered = 0.0;
    for (std::uint32_t address = 0; address < (1u << n); ++address) {
        const DyadicRectangle child_rect = q.child(address).to_rectangle();
        if (rect.contains(child_rect)) {
            mask |= (1ull << address);
            covered += child_rect.volume();
        } else if (rect.intersects(child_rect)) {
            return std::nullopt;  // partial overlap
        }
    }
    if (covered != rect.volume()) return std::nullopt;
    return mask;
}

}  // namespace

CheckReport verify_pair_family(
    const DyadicCube& q,
    std::span<const std::pair<DyadicRectangle, DyadicRectangle>> family) {
    CheckReport report;
    report.check = "partition-properties";
    report.dim = q.dim();
    report.pass = true;

    const int n = q.dim();
    if (n > 6) throw std::invalid_argument("verify_pair_family: exhaustive checker supports dim <= 6");
    const int count = haar_indices_per_cube(n);
    if (static_cast<int>(family.size()) != count) {
        report.pass = false;
        report.violations.push_back("family size != 2^n - 1");
        return report;
    }

    auto fail = [&](const std::string& clause, const std::string& where) {
        report.pass = false;
        report.violations.push_back(clause + " at " + where);
    };

    std::vector<std::uint64_t> mask1(static_cast<std::size_t>(count)), mask2(static_cast<std::size_t>(count));

    // Clauses (1)-(3): equal measures, unions of children, disjoint halves.
    for (int k = 0; k < count; ++k) {
        const auto& [e1, e2] = family[static_cast<std::size_t>(k)];
        const std::string where = "j=" + std::to_string(k + 1);
        if (e1.volume() != e2.volume()) {
            fail("(1) |E1| != |E2|", where);
            return report;
        }
        const auto m1 = child_mask(q, e1);
        const auto m2 = child_mask(q, e2);
        if (!m1 || !m2 || *m1 == 0 || *m2 == 0) {
            fail("(2) half is not a nonempty union of children", where);
            return report;
        }
        if ((*m1 & *m2) != 0) {
            fail("(3) E1 and E2 intersect", where);
            return report;
        }
        mask1[static_cast<std::size_t>(k)] = *m1;
        mask2[static_cast<std::size_t>(k)] = *m2;
    }

    // Clause (4): for j != k the unions nest inside a single half or are disjoint.
    for (int a = 0; a < count; ++a) {
        const std::uint64_t ua = mask1[static_cast<std::size_t>(a)] | mask2[static_cast<std::size_t>(a)];
        for (int b = 0; b < count; ++b) {
            if (a == b) continue;
            const std::uint64_t ub = mask1[static_cast<std::size_t>(b)] | mask2[static_cast<std::size_t>(b)];
            const bool a_in_b = (ua & ~mask1[static_cast<std::size_t>(b)]) == 0 ||
                                (ua & ~mask2[static_cast<std::size_t>(b)]) == 0;
            const bool b_in_a = (ub & ~mask1[static_cast<std::size_t>(a)]) == 0 ||
                                (ub & ~mask2[static_cast<std::size_t>(a)]) == 0;
            const bool disjoint = (ua & ub) == 0;
            if (!a_in_b && !b_in_a && !disjoint) {
                fail("(4) nesting trichotomy violated",
                     "j=" + std::to_string(a + 1) + ",k=" + std::to_string(b + 1));
                return report;
            }
        }
    }

    // Each generation j in [2^m, 2^{m+1}) partitions Q.
    const std::uint64_t full = (n == 6) ? ~0ull : ((1ull << (1u << n)) - 1ull);
    for (int m = 0; m < n; ++m) {
        std::uint64_t cover = 0;
        for (int j = (1 << m); j < (1 << (m + 1)); ++j) {
            const std::uint64_t u =
                mask1[static_cast<std::size_t>(j - 1)] | mask2[static_cast<std::size_t>(j - 1)];
            if ((cover & u) != 0) {
                fail("(cover) generation overlap", "m=" + std::to_string(m));
                return report;
            }
            cover |= u;
        }
        if (cover != full) {
            fail("(cover) generation does not cover Q", "m=" + std::to_string(m));
            return report;
        }
    }

    // The finest halves are exactly the children of Q.
    std::uint64_t leaves = 0;
    int leaf_count = 0;
    for (int j = (1 << (n - 1)); j < (1 << n); ++j) {
        for (std::uint64_t m : {mask1[static_cast<std::size_t>(j - 1)], mask2[static_cast<std::size_t>(j - 1)]}) {
            if (std::popcount(m) != 1) {
                fail("(children) finest half is not a single child", "j=" + std::to_string(j));
                return report;
            }
            leaves |= m;
            ++leaf_count;
        }
    }
    if (leaves != full || leaf_count != (1 << n)) {
        fail("(children) finest halves do not enumerate D_1(Q)", q.to_string());
        return report;
    }

    return report;
}

CheckReport verify_partition_properties(const DyadicCube& q) {
    const int count = haar_indices_per_cube(q.dim());
    std::vector<std::pair<DyadicRectangle, DyadicRectangle>> family;
    family.reserve(static_cast<std::size_t>(count));
    for (int j = 1; j <= count; ++j) family.push_back(pair_sets(HaarIndex{q, j}));
    return verify_pair_family(q, family);
}

// ---------------------------------------------------------------------------
// HaarIndexer
// ---------------------------------------------------------------------------

HaarIndexer::HaarIndexer(int dim, int depth) : dim_(dim), depth_(depth) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("HaarIndexer: dim out of range");
    if (depth < 0) throw std::invalid_argument("HaarIndexer: negative depth");
    level_offset_.resize(static_cast<std::size_t>(depth) + 1, 0);
    const std::int64_t per_cube = haar_indices_per_cube(dim);
    std::int64_t total = 0;
    for (int k = 0; k < depth; ++k) {
        level_offset_[static_cast<std::size_t>(k)] = total;
        total += per_cube << (dim * k);
    }
    level_offset_[static_cast<std::size_t>(depth)] = total;
    size_ = total;
}

std::int64_t HaarIndexer::id(const HaarIndex& idx) const {
    const int k = idx.cube.level();
    if (k < 0 || k >= depth_) throw std::out_of_range("HaarIndexer: cube level outside [0, depth)");
    const std::int64_t per_cube = haar_indices_per_cube(dim_);
    return level_offset_[static_cast<std::size_t>(k)] +
           static_cast<std::int64_t>(idx.cube.flat_index()) * per_cube + (idx.j - 1);
}

HaarIndex HaarIndexer::at(std::int64_t id) const {
    if (id < 0 || id >= size_) throw std::out_of_range("HaarIndexer: id out of range");
    int k = 0;
    while (k + 1 <= depth_ && level_offset_[static_cast<std::size_t>(k) + 1] <= id) ++k;
    const std::int64_t per_cube = haar_indices_per_cube(dim_);
    const std::int64_t rem = id - level_offset_[static_cast<std::size_t>(k)];
    const std::uint64_t flat = static_cast<std::uint64_t>(rem / per_cube);
    const int j = static_cast<int>(rem % per_cube) + 1;
    return HaarIndex{DyadicCube::from_flat(dim_, k, flat), j};
}

}  // namespace dpl
