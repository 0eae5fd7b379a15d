// SPDX-License-Identifier: MIT
#include "dpl/operators.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace dpl {

namespace {

void require_same_shape(const GridFunction& a, const GridFunction& b, const char* what) {
    if (!a.same_shape(b)) throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

// Shared painter for the paraproduct family: out += sum over all indices of
// source_average(idx) * <b,h_idx> * h_idx, where the averaging region is
// E_{j,Q} for the Wilson paraproduct and Q for the tensor one.
enum class AverageRegion { kESet, kCube };

GridFunction paraproduct_core(const GridFunction& b, const GridFunction& f, AverageRegion region) {
    require_same_shape(b, f, "paraproduct");
    const int n = f.dim();
    IntegralPyramid pb(b);
    IntegralPyramid pf(f);
    GridFunction out(n, f.depth());
    for (int k = 0; k < f.depth(); ++k) {
        const std::int64_t cubes = std::int64_t{1} << (n * k);
        const double cube_volume = std::ldexp(1.0, -n * k);
        for (std::int64_t flat = 0; flat < cubes; ++flat) {
            const DyadicCube q = DyadicCube::from_flat(n, k, static_cast<std::uint64_t>(flat));
            const double avg_q = pf.cube(q) / cube_volume;
            for (int j = 1; j <= haar_indices_per_cube(n); ++j) {
                const HaarIndex idx{q, j};
                const double e_volume = e_set(idx).volume();
                auto [b1, b2] = pb.halves(idx);
                const double coef_b = (b2 - b1) / std::sqrt(e_volume);
                if (coef_b == 0.0) continue;
                const double avg =
                    (region == AverageRegion::kESet) ? pf.e_set_integral(idx) / e_volume : avg_q;
                const double amp = avg * coef_b / std::sqrt(e_volume);
                auto [e1, e2] = pair_sets(idx);
                out.add_on(e1, -amp);
                out.add_on(e2, amp);
            }
        }
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// SignPattern
// ---------------------------------------------------------------------------

SignPattern::SignPattern(int dim, int depth, int sign) : indexer_(dim, depth) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("SignPattern: sign must be +-1");
    signs_.assign(static_cast<std::size_t>(indexer_.size()), static_cast<std::int8_t>(sign));
}

SignPattern SignPattern::random(int dim, int depth, std::uint64_t seed) {
    SignPattern s(dim, depth, 1);
    std::mt19937_64 gen(seed);
    for (auto& v : s.signs_) v = (gen() >> 63) ? 1 : -1;
    return s;
}

int SignPattern::sign(const HaarIndex& idx) const {
    const std::int8_t s = signs_[static_cast<std::size_t>(indexer_.id(idx))];
    if (s != 1 && s != -1) throw std::logic_error("SignPattern: missing sign");
    return s;
}

void SignPattern::set(const HaarIndex& idx, int sign) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("SignPattern: sign must be +-1");
    signs_[static_cast<std::size_t>(indexer_.id(idx))] = static_cast<std::int8_t>(sign);
}

// ---------------------------------------------------------------------------
// Paraproducts
// ---------------------------------------------------------------------------

GridFunction paraproduct(const GridFunction& b, const GridFunction& f) {
    return paraproduct_core(b, f, AverageRegion::kESet);
}

GridFunction tensor_paraproduct(const GridFunction& b, const GridFunction& f, TensorRoute route) {
    if (route == TensorRoute::kWilson) return paraproduct_core(b, f, AverageRegion::kCube);

    require_same_shape(b, f, "tensor_paraproduct");
    const int n = f.dim();
    IntegralPyramid pb(b);
    IntegralPyramid pf(f);
    GridFunction out(n, f.depth());
    for (int k = 0; k < f.depth(); ++k) {
        const std::int64_t cubes = std::int64_t{1} << (n * k);
        const double cube_volume = std::ldexp(1.0, -n * k);
        const double amp = 1.0 / std::sqrt(cube_volume);
        for (std::int64_t flat = 0; flat < cubes; ++flat) {
            const DyadicCube q = DyadicCube::from_flat(n, k, static_cast<std::uint64_t>(flat));
            const double avg_q = pf.cube(q) / cube_volume;
            for (std::uint32_t sig = 0; sig < (1u << n) - 1u; ++sig) {
                double coef = 0.0;
                for (std::uint32_t address = 0; address < (1u << n); ++address) {
                    double sign = 1.0;
                    for (int a = 0; a < n; ++a) {
                        const bool indicator = (sig >> (n - 1 - a)) & 1u;
                        if (!indicator && ((address >> (n - 1 - a)) & 1u) == 0) sign = -sign;
                    }
                    coef += sign * amp * pb.child(q, address);
                }
                if (coef == 0.0) continue;
                for (std::uint32_t address = 0; address < (1u << n); ++address) {
                    double sign = 1.0;
                    for (int a = 0; a < n; ++a) {
                        const bool indicator = (sig >> (n - 1 - a)) & 1u;
                        if (!indicator && ((address >> (n - 1 - a)) & 1u) == 0) sign = -sign;
                    }
                    out.add_on(q.child(address).to_rectangle(), avg_q * coef * sign * amp);
                }
            }
        }
    }
    return out;
}

GridFunction paraproduct_adjoint(const GridFunction& b, const GridFunction& f) {
    require_same_shape(b, f, "paraproduct_adjoint");
    const int n = f.dim();
    IntegralPyramid pb(b);
    IntegralPyramid pf(f);
    GridFunction out(n, f.depth());
    for (int k = 0; k < f.depth(); ++k) {
        const std::int64_t cubes = std::int64_t{1} << (n * k);
        for (std::int64_t flat = 0; flat < cubes; ++flat) {
            const DyadicCube q = DyadicCube::from_flat(n, k, static_cast<std::uint64_t>(flat));
            for (int j = 1; j <= haar_indices_per_cube(n); ++j) {
                const HaarIndex idx{q, j};
                const double e_volume = e_set(idx).volume();
                auto [b1, b2] = pb.halves(idx);
                auto [f1, f2] = pf.halves(idx);
                const double coef_b = (b2 - b1) / std::sqrt(e_volume);
                const double coef_f = (f2 - f1) / std::sqrt(e_volume);
                const double amp = coef_b * coef_f / e_volume;
                if (amp == 0.0) continue;
                out.add_on(e_set(idx), amp);
            }
        }
    }
    return out;
}

GridFunction paraproduct_difference(const GridFunction& b, const GridFunction& f) {
    require_same_shape(b, f, "paraproduct_difference");
    const int n = f.dim();
    IntegralPyramid pb(b);
    IntegralPyramid pf(f);
    GridFunction out(n, f.depth());
    for (int k = 0; k < f.depth(); ++k) {
        const std::int64_t cubes = std::int64_t{1} << (n * k);
        const double cube_volume = std::ldexp(1.0, -n * k);
        for (std::int64_t flat = 0; flat < cubes; ++flat) {
            const DyadicCube q = DyadicCube::from_flat(n, k, static_cast<std::uint64_t>(flat));
            const double avg_q = pf.cube(q) / cube_volume;
            for (int j = 1; j <= haar_indices_per_cube(n); ++j) {
                const HaarIndex idx{q, j};
                const double e_volume = e_set(idx).volume();
                auto [b1, b2] = pb.halves(idx);
                const double coef_b = (b2 - b1) / std::sqrt(e_volume);
                if (coef_b == 0.0) continue;
                const double avg_e = pf.e_set_integral(idx) / e_volume;
                const double amp = (avg_q - avg_e) * coef_b / std::sqrt(e_volume);
                auto [e1, e2] = pair_sets(idx);
                out.add_on(e1, -amp);
                out.add_on(e2, amp);
            }
        }
    }
    return out;
}

CheckReport paraproduct_difference_domination(const GridFunction& b, const GridFunction& f) {
    require_same_shape(b, f, "paraproduct_difference_domination");
    const int n = f.dim();
    IntegralPyramid pb(b);
    IntegralPyramid pf(f);

    const GridFunction difference = paraproduct_difference(b, f);
    GridFunction majorant(n, f.depth());
    for (int k = 0; k < f.depth(); ++k) {
        const std::int64_t cubes = std::int64_t{1} << (n * k);
        for (std::int64_t flat = 0; flat < cubes; ++flat) {
            const DyadicCube q = DyadicCube::from_flat(n, k, static_cast<std::uint64_t>(flat));
            for (int j = 2; j <= haar_indices_per_cube(n); ++j) {
                const HaarIndex idx{q, j};
                const double e_volume = e_set(idx).volume();
                auto [b1, b2] = pb.halves(idx);
                const double coef_b = std::abs(b2 - b1) / std::sqrt(e_volume);
                if (coef_b == 0.0) continue;
                // Strictly larger pairs within the same cube: iterate the
                // within-cube ancestor map.
                double f_sum = 0.0;
                HaarIndex walker = idx;
                while (walker.j > 1) {
                    walker = e_parent(walker)->idx;
                    auto [f1, f2] = pf.halves(walker);
                    f_sum += std::abs(f2 - f1) / std::sqrt(e_set(walker).volume());
                }
                majorant.add_on(e_set(idx), f_sum * coef_b / e_volume);
            }
        }
    }

    CheckReport report;
    report.check = "difference-domination";
    report.dim = n;
    report.depth = f.depth();
    double worst = 0.0;
    for (std::int64_t c = 0; c < difference.cell_count(); ++c) {
        const double num = std::abs(difference[c]);
        const double den = majorant[c];
        if (num == 0.0) continue;
        if (den == 0.0) {
            report.violations.push_back("nonzero difference with zero majorant at cell " +
                                        std::to_string(c));
            continue;
        }
        worst = std::max(worst, num / den);
    }
    report.empirical_constant = worst;
    report.params["constant_bound"] = "1";
    report.pass = report.violations.empty() && worst <= 1.0 + 1e-12;
    return report;
}

// ---------------------------------------------------------------------------
// Martingale transform and square functions
// ---------------------------------------------------------------------------

GridFunction martingale_transform(const SignPattern& sigma, const GridFunction& f) {
    if (sigma.dim() != f.dim() || sigma.depth() != f.depth())
        throw std::invalid_argument("martingale_transform: shape mismatch");
    const int n = f.dim();
    IntegralPyramid pf(f);
    GridFunction out(n, f.depth());
    for (int k = 0; k < f.depth(); ++k) {
        const std::int64_t cubes = std::int64_t{1} << (n * k);
        for (std::int64_t flat = 0; flat < cubes; ++flat) {
            const DyadicCube q = DyadicCube::from_flat(n, k, static_cast<std::uint64_t>(flat));
            for (int j = 1; j <= haar_indices_per_cube(n); ++j) {
                const HaarIndex idx{q, j};
                const double e_volume = e_set(idx).volume();
                auto [f1, f2] = pf.halves(idx);
                const double coef = (f2 - f1) / std::sqrt(e_volume);
                if (coef == 0.0) continue;
                const double amp = sigma.sign(idx) * coef / std::sqrt(e_volume);
                auto [e1, e2] = pair_sets(idx);
                out.add_on(e1, -amp);
                out.add_on(e2, amp);
            }
        }
    }
    return out;
}

GridFunction square_function(const GridFunction& f, SquareForm form) {
    if (f.depth() < 1) throw std::invalid_argument("square_function: depth must be >= 1");
    const int n = f.dim();
    IntegralPyramid pf(f);
    GridFunction squared(n, f.depth());

    if (form == SquareForm::kIncrement) {
        for (int k = 1; k <= f.depth(); ++k) {
            const std::int64_t cubes = std::int64_t{1} << (n * k);
            const double vol = std::ldexp(1.0, -n * k);
            for (std::int64_t flat = 0; flat < cubes; ++flat) {
                const DyadicCube q = DyadicCube::from_flat(n, k, static_cast<std::uint64_t>(flat));
                const double avg = pf.cube(q) / vol;
                const double parent_avg = pf.cube(q.parent()) / (vol * std::ldexp(1.0, n));
                const double d = avg - parent_avg;
                squared.add_on(q.to_rectangle(), d * d);
            }
        }
    } else {
        for (int k = 0; k < f.depth(); ++k) {
            const std::int64_t cubes = std::int64_t{1} << (n * k);
            const double vol = std::ldexp(1.0, -n * k);
            for (std::int64_t flat = 0; flat < cubes; ++flat) {
                const DyadicCube q = DyadicCube::from_flat(n, k, static_cast<std::uint64_t>(flat));
                double energy = 0.0;
                for (int j = 1; j <= haar_indices_per_cube(n); ++j) {
                    const HaarIndex idx{q, j};
                    auto [f1, f2] = pf.halves(idx);
                    const double coef = (f2 - f1) / std::sqrt(e_set(idx).volume());
                    energy += coef * coef;
                }
                squared.add_on(q.to_rectangle(), energy / vol);
            }
        }
    }
    for (std::int64_t c = 0; c < squared.cell_count(); ++c)
        squared[c] = std::sqrt(squared[c]);
    return squared;
}

ProductDecomposition product_decomposition(const GridFunction& f, const GridFunction& g) {
    require_same_shape(f, g, "product_decomposition");
    return {paraproduct_adjoint(g, f), paraproduct(f, g), paraproduct(g, f)};
}

// ---------------------------------------------------------------------------
// Matrices and norms
// ---------------------------------------------------------------------------

OperatorMatrix assemble_matrix(int dim, int depth, const std::string& kind,
                               std::uint64_t symbol_hash,
                               const std::function<GridFunction(const GridFunction&)>& apply) {
    const std::int64_t size = std::int64_t{1} << (dim * depth);
    OperatorMatrix op{dim, depth, kind, symbol_hash, Eigen::MatrixXd::Zero(size, size)};
    GridFunction unit(dim, depth);
    for (std::int64_t c = 0; c < size; ++c) {
        unit[c] = 1.0;
        const GridFunction image = apply(unit);
        for (std::int64_t r = 0; r < size; ++r) op.mat(r, c) = image[r];
        unit[c] = 0.0;
    }
    return op;
}

std::uint64_t grid_hash(const GridFunction& g) {
    // FNV-1a over the raw value bytes.
    std::uint64_t h = 1469598103934665603ull;
    for (std::int64_t i = 0; i < g.cell_count(); ++i) {
        const double v = g[i];
        const unsigned char* bytes = reinterpret_cast<const unsigned char*>(&v);
        for (std::size_t b = 0; b < sizeof(double); ++b) {
            h ^= bytes[b];
            h *= 1099511628211ull;
        }
    }
    return h;
}

OperatorMatrix paraproduct_matrix(const GridFunction& b) {
    return assemble_matrix(b.dim(), b.depth(), "paraproduct", grid_hash(b),
                           [&](const GridFunction& f) { return paraproduct(b, f); });
}

OperatorMatrix tensor_paraproduct_matrix(const GridFunction& b) {
    return assemble_matrix(b.dim(), b.depth(), "tensor-paraproduct", grid_hash(b),
                           [&](const GridFunction& f) { return tensor_paraproduct(b, f); });
}

OperatorMatrix paraproduct_difference_matrix(const GridFunction& b) {
    return assemble_matrix(b.dim(), b.depth(), "paraproduct-difference", grid_hash(b),
                           [&](const GridFunction& f) { return paraproduct_difference(b, f); });
}

OperatorMatrix martingale_matrix(const SignPattern& sigma) {
    return assemble_matrix(sigma.dim(), sigma.depth(), "martingale", 0,
                           [&](const GridFunction& f) { return martingale_transform(sigma, f); });
}

namespace {

Eigen::MatrixXd conjugated(const OperatorMatrix& op, const Weight& w) {
    if (op.dim != w.dim() || op.depth != w.depth())
        throw std::invalid_argument("operator_norm: weight shape mismatch");
    const std::int64_t size = op.mat.rows();
    Eigen::VectorXd d(size), dinv(size);
    for (std::int64_t i = 0; i < size; ++i) {
        // The uniform cell-volume factor cancels in the similarity transform.
        const double s = std::sqrt(w.grid()[i]);
        d(i) = s;
        dinv(i) = 1.0 / s;
    }
    return d.asDiagonal() * op.mat * dinv.asDiagonal();
}

}  // namespace

double operator_norm_dense(const OperatorMatrix& op, const Weight& w) {
    const Eigen::MatrixXd m = conjugated(op, w);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(0);
}

PowerIterationResult operator_norm_power(const OperatorMatrix& op, const Weight& w,
                                         PowerOptions options) {
    const Eigen::MatrixXd m = conjugated(op, w);
    const std::int64_t size = m.rows();

    // Deterministic start vector.
    Eigen::VectorXd v(size);
    std::mt19937_64 gen(0x9e3779b97f4a7c15ull);
    for (std::int64_t i = 0; i < size; ++i) v(i) = 2.0 * uniform01(gen) - 1.0;
    v.normalize();

    PowerIterationResult result;
    double lambda = 0.0;
    for (int it = 1; it <= options.maxit; ++it) {
        const Eigen::VectorXd z = m.transpose() * (m * v);
        lambda = v.dot(z);
        const double zn = z.norm();
        result.iterations = it;
        if (zn == 0.0) {  // operator annihilates the iterate: norm 0 on its orbit
            result.value = 0.0;
            result.converged = true;
            return result;
        }
        const double residual = (z - lambda * v).norm();
        v = z / zn;
        if (residual <= options.tol * std::max(1.0, lambda)) {
            result.value = std::sqrt(std::max(0.0, lambda));
            result.converged = true;
            return result;
        }
    }
    result.value = std::sqrt(std::max(0.0, lambda));
    result.converged = false;
    return result;
}

double bilinear_form(const GridFunction& b, const GridFunction& f, const GridFunction& g,
                     const Weight& w) {
    require_same_shape(b, f, "bilinear_form");
    require_same_shape(b, g, "bilinear_form");
    if (!b.same_shape(w.grid())) throw std::invalid_argument("bilinear_form: weight shape mismatch");
    const GridFunction sqrt_w = cellwise_sqrt(w.grid());
    const GridFunction f_scaled = cellwise_product(f, cellwise_reciprocal(sqrt_w));
    const GridFunction g_scaled = cellwise_product(g, sqrt_w);
    return paraproduct(b, f_scaled).inner(g_scaled);
}

double square_function_weighted_norm(const Weight& w) {
    const int n = w.dim();
    const int depth = w.depth();
    const std::int64_t size = std::int64_t{1} << (n * depth);
    IntegralPyramid pw(w.grid());

    // Rows: sqrt(w(Q)) * (<f>_Q - <f>_parent) over cubes of level 1..depth.
    std::int64_t rows = 0;
    for (int k = 1; k <= depth; ++k) rows += std::int64_t{1} << (n * k);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, size);

    GridFunction probe(n, depth);
    std::int64_t row = 0;
    for (int k = 1; k <= depth; ++k) {
        const std::int64_t cubes = std::int64_t{1} << (n * k);
        const double inv_cells_q = std::ldexp(1.0, n * (k - depth));
        const double inv_cells_p = std::ldexp(1.0, n * (k - 1 - depth));
        for (std::int64_t flat = 0; flat < cubes; ++flat) {
            const DyadicCube q = DyadicCube::from_flat(n, k, static_cast<std::uint64_t>(flat));
            const double scale = std::sqrt(pw.cube(q));
            probe.for_each_cell(q.to_rectangle(),
                                [&](std::int64_t c) { a(row, c) += scale * inv_cells_q; });
            probe.for_each_cell(q.parent().to_rectangle(),
                                [&](std::int64_t c) { a(row, c) -= scale * inv_cells_p; });
            ++row;
        }
    }

    // Conjugate by the weighted-mass square root; cell volume scales the
    // row-space measure (w(Q)) and the column-space norm identically up to
    // the uniform factor, which must be kept here since rows carry integrals.
    const double cell_volume = w.grid().cell_volume();
    for (std::int64_t c = 0; c < size; ++c) {
        const double dinv = 1.0 / std::sqrt(w.grid()[c] * cell_volume);
        a.col(c) *= dinv;
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
    return svd.singularValues()(0);
}

// ---------------------------------------------------------------------------
// OPM1
// ---------------------------------------------------------------------------

void write_opm1(std::ostream& os, const OperatorMatrix& op) {
    os << "opm 1\n";
    os << "dim=" << op.dim << " depth=" << op.depth << " kind=" << op.kind << "\n";
    const std::int64_t size = op.mat.rows();
    for (std::int64_t r = 0; r < size; ++r) {
        for (std::int64_t c = 0; c < size; ++c) {
            os << format_double(op.mat(r, c));
            os << (c + 1 == size ? '\n' : ' ');
        }
    }
}

OperatorMatrix read_opm1(std::istream& is) {
    std::string word, version;
    if (!(is >> word >> version) || word != "opm" || version != "1")
        throw std::runtime_error("OPM1: bad magic");
    std::string dim_kv, depth_kv, kind_kv;
    if (!(is >> dim_kv >> depth_kv >> kind_kv) || dim_kv.rfind("dim=", 0) != 0 ||
        depth_kv.rfind("depth=", 0) != 0 || kind_kv.rfind("kind=", 0) != 0)
        throw std::runtime_error("OPM1: bad header");
    OperatorMatrix op;
    op.dim = std::stoi(dim_kv.substr(4));
    op.depth = std::stoi(depth_kv.substr(6));
    op.kind = kind_kv.substr(5);
    const std::int64_t size = std::int64_t{1} << (op.dim * op.depth);
    op.mat.resize(size, size);
    for (std::int64_t r = 0; r < size; ++r)
        for (std::int64_t c = 0; c < size; ++c)
            if (!(is >> op.mat(r, c))) throw std::runtime_error("OPM1: too few values");
    double extra;
    if (is >> extra) throw std::runtime_error("OPM1: too many values");
    return op;
}

void write_opm1_file(const std::string& path, const OperatorMatrix& op) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    write_opm1(os, op);
}

OperatorMatrix read_opm1_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open for reading: " + path);
    return read_opm1(is);
}

}  // namespace dpl
