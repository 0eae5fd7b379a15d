// SPDX-License-Identifier: MIT
#include "dpl/weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "dpl/haar.hpp"

namespace dpl {

namespace {

// n-dimensional summed-area table over raw cell values; box sums in O(2^n).
class PrefixTable {
  public:
    explicit PrefixTable(const GridFunction& f) : dim_(f.dim()), depth_(f.depth()) {
        side_ = (std::int64_t{1} << depth_) + 1;
        std::int64_t total = 1;
        for (int a = 0; a < dim_; ++a) total *= side_;
        table_.assign(static_cast<std::size_t>(total), 0.0);

        std::vector<std::int64_t> coord(static_cast<std::size_t>(dim_), 0);
        const std::int64_t cells_per_axis = side_ - 1;
        for (std::int64_t flat = 0; flat < f.cell_count(); ++flat) {
            std::int64_t rest = flat;
            for (int a = dim_ - 1; a >= 0; --a) {
                coord[static_cast<std::size_t>(a)] = rest % cells_per_axis;
                rest /= cells_per_axis;
            }
            std::int64_t t = 0;
            for (int a = 0; a < dim_; ++a) t = t * side_ + coord[static_cast<std::size_t>(a)] + 1;
            table_[static_cast<std::size_t>(t)] = f[flat];
        }

        // Running sums along each axis in turn.
        for (int a = 0; a < dim_; ++a) {
            std::int64_t stride = 1;
            for (int b = a + 1; b < dim_; ++b) stride *= side_;
            const std::int64_t total_cells = static_cast<std::int64_t>(table_.size());
            for (std::int64_t base = 0; base < total_cells; ++base) {
                const std::int64_t along = (base / stride) % side_;
                if (along == 0) continue;
                table_[static_cast<std::size_t>(base)] +=
                    table_[static_cast<std::size_t>(base - stride)];
            }
        }
    }

    // Sum of cell values over [lo, hi) in cell coordinates.
    double box_sum(std::span<const std::int64_t> lo, std::span<const std::int64_t> hi) const {
        double s = 0.0;
        for (std::uint32_t mask = 0; mask < (1u << dim_); ++mask) {
            std::int64_t t = 0;
            int parity = 0;
            for (int a = 0; a < dim_; ++a) {
                const bool take_lo = (mask >> a) & 1u;
                if (take_lo) ++parity;
                t = t * side_ + (take_lo ? lo[static_cast<std::size_t>(a)] : hi[static_cast<std::size_t>(a)]);
            }
            s += (parity % 2 == 0 ? 1.0 : -1.0) * table_[static_cast<std::size_t>(t)];
        }
        return s;
    }

    double rect_sum(const DyadicRectangle& r) const {
        std::array<std::int64_t, kMaxDim> lo{}, hi{};
        for (int a = 0; a < dim_; ++a) {
            const auto& iv = r.axis(a);
            const int shift = depth_ - iv.level;
            lo[static_cast<std::size_t>(a)] = static_cast<std::int64_t>(iv.index) << shift;
            hi[static_cast<std::size_t>(a)] = lo[static_cast<std::size_t>(a)] + (std::int64_t{1} << shift);
        }
        return box_sum(std::span<const std::int64_t>(lo.data(), static_cast<std::size_t>(dim_)),
                       std::span<const std::int64_t>(hi.data(), static_cast<std::size_t>(dim_)));
    }

    double rect_mean(const DyadicRectangle& r) const {
        double cells = 1.0;
        for (int a = 0; a < dim_; ++a) cells *= std::ldexp(1.0, depth_ - r.axis(a).level);
        return rect_sum(r) / cells;
    }

  private:
    int dim_;
    int depth_;
    std::int64_t side_;
    std::vector<double> table_;
};

std::vector<DyadicInterval> all_intervals(int depth) {
    std::vector<DyadicInterval> out;
    for (int l = 0; l <= depth; ++l)
        for (std::uint32_t i = 0; i < (1u << l); ++i) out.push_back(DyadicInterval{l, i});
    return out;
}

// Visits every dyadic rectangle whose axis-0 interval lies in the given slice
// of the canonical interval list, in canonical order.
template <typename Fn>
void visit_rectangles_slice(int dim, const std::vector<DyadicInterval>& intervals,
                            std::size_t first, std::size_t last, Fn&& fn) {
    std::vector<DyadicInterval> axes(static_cast<std::size_t>(dim));
    auto recurse = [&](auto&& self, int axis) -> void {
        if (axis == dim) {
            fn(DyadicRectangle(axes));
            return;
        }
        for (const auto& iv : intervals) {
            axes[static_cast<std::size_t>(axis)] = iv;
            self(self, axis + 1);
        }
    };
    for (std::size_t i = first; i < last; ++i) {
        axes[0] = intervals[i];
        if (dim == 1) {
            fn(DyadicRectangle(axes));
        } else {
            recurse(recurse, 1);
        }
    }
}

struct RectArgmax {
    double value = -std::numeric_limits<double>::infinity();
    DyadicRectangle where;
};

// Parallel supremum over all dyadic rectangles. Chunks cover canonical-order
// slices and the merge keeps the earliest maximizer, so the result does not
// depend on the thread count.
template <typename Score>
RectArgmax rect_supremum(int dim, int depth, Score&& score) {
    const auto intervals = all_intervals(depth);
    const int threads = std::min<int>(worker_threads(), static_cast<int>(intervals.size()));

    auto scan = [&](std::size_t first, std::size_t last) {
        RectArgmax best;
        visit_rectangles_slice(dim, intervals, first, last, [&](const DyadicRectangle& r) {
            const double v = score(r);
            if (v > best.value) {
                best.value = v;
                best.where = r;
            }
        });
        return best;
    };

    if (threads <= 1) return scan(0, intervals.size());

    std::vector<RectArgmax> partial(static_cast<std::size_t>(threads));
    std::vector<std::thread> pool;
    const std::size_t per = (intervals.size() + static_cast<std::size_t>(threads) - 1) /
                            static_cast<std::size_t>(threads);
    for (int t = 0; t < threads; ++t) {
        const std::size_t first = static_cast<std::size_t>(t) * per;
        const std::size_t last = std::min(intervals.size(), first + per);
        pool.emplace_back([&, t, first, last] { partial[static_cast<std::size_t>(t)] = scan(first, last); });
    }
    for (auto& th : pool) th.join();
    RectArgmax best;
    for (const auto& p : partial)
        if (p.value > best.value) best = p;
    return best;
}

// Mean absolute (or p-th power) oscillation of b over the cells of r.
double oscillation(const GridFunction& b, const PrefixTable& pb, const DyadicRectangle& r, double p) {
    const double mean = pb.rect_mean(r);
    double s = 0.0;
    std::int64_t cells = 0;
    b.for_each_cell(r, [&](std::int64_t c) {
        const double d = std::abs(b[c] - mean);
        s += (p == 1.0) ? d : std::pow(d, p);
        ++cells;
    });
    return s / static_cast<double>(cells);
}

}  // namespace

int worker_threads() {
    if (const char* env = std::getenv("DPL_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return std::min(v, 64);
    }
    return 1;
}

// ---------------------------------------------------------------------------
// Weight
// ---------------------------------------------------------------------------

Weight::Weight(GridFunction g) : grid_(std::move(g)) {
    for (std::int64_t i = 0; i < grid_.cell_count(); ++i)
        if (!(grid_[i] > 0.0)) throw std::invalid_argument("Weight: nonpositive cell");
}

Weight Weight::reciprocal() const { return Weight(cellwise_reciprocal(grid_)); }

// ---------------------------------------------------------------------------
// Characteristics
// ---------------------------------------------------------------------------

CharacteristicReport apd_characteristic(const Weight& w, double p) {
    if (!(p > 1.0)) throw std::invalid_argument("apd_characteristic: requires p > 1");
    const GridFunction dual =
        (p == 2.0) ? cellwise_reciprocal(w.grid()) : cellwise_pow(w.grid(), -1.0 / (p - 1.0));
    IntegralPyramid pw(w.grid());
    IntegralPyramid pd(dual);

    CharacteristicReport report;
    report.p = p;
    report.value = -std::numeric_limits<double>::infinity();
    DyadicCube best;
    const int n = w.dim();
    for (int k = 0; k <= w.depth(); ++k) {
        const std::int64_t cubes = std::int64_t{1} << (n * k);
        const double vol = std::ldexp(1.0, -n * k);
        for (std::int64_t flat = 0; flat < cubes; ++flat) {
            const DyadicCube q = DyadicCube::from_flat(n, k, static_cast<std::uint64_t>(flat));
            const double value = (pw.cube(q) / vol) * std::pow(pd.cube(q) / vol, p - 1.0);
            if (value > report.value) {
                report.value = value;
                best = q;
            }
        }
    }
    report.argmax = best.to_string();
    return report;
}

CharacteristicReport a2r_characteristic(const Weight& w) {
    PrefixTable pw(w.grid());
    PrefixTable pr(cellwise_reciprocal(w.grid()));
    const RectArgmax best = rect_supremum(w.dim(), w.depth(), [&](const DyadicRectangle& r) {
        return pw.rect_mean(r) * pr.rect_mean(r);
    });
    CharacteristicReport report;
    report.p = 2.0;
    report.value = best.value;
    report.argmax = best.where.to_string();
    return report;
}

// ---------------------------------------------------------------------------
// BMO norms
// ---------------------------------------------------------------------------

double bmod_norm(const GridFunction& b, BmoVariant variant) {
    const int n = b.dim();
    IntegralPyramid pb(b);
    IntegralPyramid pb2(cellwise_product(b, b));
    PrefixTable table(b);

    double best = 0.0;
    for (int k = 0; k <= b.depth(); ++k) {
        const std::int64_t cubes = std::int64_t{1} << (n * k);
        const double vol = std::ldexp(1.0, -n * k);
        for (std::int64_t flat = 0; flat < cubes; ++flat) {
            const DyadicCube q = DyadicCube::from_flat(n, k, static_cast<std::uint64_t>(flat));
            double value;
            if (variant == BmoVariant::kL2) {
                const double mean = pb.cube(q) / vol;
                value = pb2.cube(q) / vol - mean * mean;
            } else {
                value = oscillation(b, table, q.to_rectangle(), 1.0);
            }
            best = std::max(best, value);
        }
    }
    return best;
}

double bmor_norm(const GridFunction& b) {
    PrefixTable table(b);
    const RectArgmax best = rect_supremum(b.dim(), b.depth(), [&](const DyadicRectangle& r) {
        return oscillation(b, table, r, 1.0);
    });
    return best.value;
}

CheckReport john_nirenberg_profile(const GridFunction& b, const DyadicRectangle& r,
                                   std::span<const double> lambdas) {
    const double norm = bmor_norm(b);
    if (!(norm > 0.0)) throw std::invalid_argument("john_nirenberg_profile: zero-oscillation symbol");

    CheckReport report;
    report.check = "john-nirenberg";
    report.dim = b.dim();
    report.depth = b.depth();
    report.params["bmor_norm"] = format_double(norm);

    PrefixTable table(b);
    const double mean = table.rect_mean(r);
    const double rect_volume = r.volume();
    const double front = std::exp(1.0 + 2.0 / std::numbers::e);
    const double rate = (2.0 / std::numbers::e) / norm;
    const double cell_volume = b.cell_volume();

    double worst = 0.0;
    for (double lambda : lambdas) {
        double measure = 0.0;
        b.for_each_cell(r, [&](std::int64_t c) {
            if (std::abs(b[c] - mean) > lambda) measure += cell_volume;
        });
        const double bound = front * rect_volume * std::exp(-rate * lambda);
        const double ratio = measure / bound;
        report.ratios.emplace_back("lambda=" + format_double(lambda), ratio);
        if (ratio > worst) {
            worst = ratio;
            report.worst_region = "lambda=" + format_double(lambda);
        }
        if (measure > bound * (1.0 + 1e-12))
            report.violations.push_back("level set exceeds bound at lambda=" + format_double(lambda));
    }
    report.empirical_constant = worst;
    report.pass = report.violations.empty();
    return report;
}

double self_improving_ratio(const GridFunction& b, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("self_improving_ratio: requires p >= 1");
    const double norm = bmor_norm(b);
    if (!(norm > 0.0)) throw std::invalid_argument("self_improving_ratio: zero-oscillation symbol");

    PrefixTable table(b);
    const RectArgmax best = rect_supremum(b.dim(), b.depth(), [&](const DyadicRectangle& r) {
        const double osc = oscillation(b, table, r, p);
        return (p == 1.0) ? osc : std::pow(osc, 1.0 / p);
    });
    return best.value / norm;
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

Weight make_power_weight(int dim, int depth, double alpha) {
    if (!(alpha > -static_cast<double>(dim)))
        throw std::invalid_argument("make_power_weight: requires alpha > -dim");
    GridFunction g(dim, depth);
    const std::int64_t cpa = g.cells_per_axis();
    if (dim == 1) {
        // Exact averages of t^alpha over the cells (alpha > -1 here).
        const double e = alpha + 1.0;
        for (std::int64_t i = 0; i < cpa; ++i) {
            const double a = std::ldexp(static_cast<double>(i), -depth);
            const double b = std::ldexp(static_cast<double>(i + 1), -depth);
            g[i] = (std::pow(b, e) - std::pow(a, e)) / (e * (b - a));
        }
    } else {
        for (std::int64_t flat = 0; flat < g.cell_count(); ++flat) {
            std::int64_t rest = flat;
            double r2 = 0.0;
            for (int a = dim - 1; a >= 0; --a) {
                const double mid = (static_cast<double>(rest % cpa) + 0.5) / static_cast<double>(cpa);
                r2 += mid * mid;
                rest /= cpa;
            }
            g[flat] = std::pow(r2, alpha / 2.0);
        }
    }
    return Weight(std::move(g));
}

Weight make_cascade_weight(int dim, int depth, double delta, std::uint64_t seed) {
    if (!(delta > 0.0) || !(delta < 1.0))
        throw std::invalid_argument("make_cascade_weight: requires 0 < delta < 1");
    std::mt19937_64 gen(seed);
    // Balanced signs per sibling group keep every parent average intact, so
    // the cascade at depth L+1 is a genuine refinement of the one at depth L.
    std::vector<int> signs(std::size_t{1} << dim);
    std::vector<double> level(1, 1.0);
    for (int k = 0; k < depth; ++k) {
        std::vector<double> next(level.size() << dim);
        const std::int64_t cubes = static_cast<std::int64_t>(level.size());
        for (std::int64_t flat = 0; flat < cubes; ++flat) {
            const DyadicCube q = DyadicCube::from_flat(dim, k, static_cast<std::uint64_t>(flat));
            for (std::size_t i = 0; i < signs.size(); ++i) signs[i] = (i < signs.size() / 2) ? 1 : -1;
            for (std::size_t i = signs.size() - 1; i > 0; --i)
                std::swap(signs[i], signs[gen() % (i + 1)]);
            for (std::uint32_t address = 0; address < (1u << dim); ++address) {
                next[static_cast<std::size_t>(q.child(address).flat_index())] =
                    level[static_cast<std::size_t>(flat)] *
                    (1.0 + signs[address] * delta);
            }
        }
        level = std::move(next);
    }
    GridFunction g(dim, depth);
    g.values() = std::move(level);
    return Weight(std::move(g));
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return parts;
}

}  // namespace

Weight make_weight(int dim, int depth, const std::string& spec) {
    const auto parts = split(spec, ':');
    if (parts[0] == "unit") return Weight(GridFunction::constant(dim, depth, 1.0));
    if (parts[0] == "power" && parts.size() == 2)
        return make_power_weight(dim, depth, std::stod(parts[1]));
    if (parts[0] == "cascade" && parts.size() == 3)
        return make_cascade_weight(dim, depth, std::stod(parts[1]), std::stoull(parts[2]));
    if (parts[0] == "file" && parts.size() == 2) {
        GridFunction g = read_gfn1_file(parts[1]);
        if (g.dim() != dim || g.depth() != depth)
            throw std::invalid_argument("make_weight: file shape mismatch");
        return Weight(std::move(g));
    }
    throw std::invalid_argument("make_weight: bad spec '" + spec + "'");
}

GridFunction make_log_symbol(int dim, int depth) {
    GridFunction g(dim, depth);
    const std::int64_t cpa = g.cells_per_axis();
    for (std::int64_t flat = 0; flat < g.cell_count(); ++flat) {
        std::int64_t rest = flat;
        double r2 = 0.0;
        for (int a = dim - 1; a >= 0; --a) {
            const double mid = (static_cast<double>(rest % cpa) + 0.5) / static_cast<double>(cpa);
            r2 += mid * mid;
            rest /= cpa;
        }
        g[flat] = 0.5 * std::log(r2);
    }
    return g;
}

GridFunction make_random_symbol(int dim, int depth, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    CoefficientTree tree(dim, depth);
    const HaarIndexer indexer(dim, depth);
    for (std::int64_t id = 0; id < indexer.size(); ++id) {
        const HaarIndex idx = indexer.at(id);
        const double u = 2.0 * uniform01(gen) - 1.0;
        tree.set(idx, u * std::sqrt(e_set(idx).volume()));
    }
    return synthesize(tree);
}

GridFunction make_symbol(int dim, int depth, const std::string& spec) {
    const auto parts = split(spec, ':');
    if (parts[0] == "log") return make_log_symbol(dim, depth);
    if (parts[0] == "random" && parts.size() == 2)
        return make_random_symbol(dim, depth, std::stoull(parts[1]));
    if (parts[0] == "haar" && parts.size() == 2) {
        const int j = std::stoi(parts[1]);
        return wilson_haar(HaarIndex{DyadicCube::root(dim), j}, depth);
    }
    if (parts[0] == "file" && parts.size() == 2) {
        GridFunction g = read_gfn1_file(parts[1]);
        if (g.dim() != dim || g.depth() != depth)
            throw std::invalid_argument("make_symbol: file shape mismatch");
        return g;
    }
    throw std::invalid_argument("make_symbol: bad spec '" + spec + "'");
}

}  // namespace dpl
