// SPDX-License-Identifier: MIT
//
// dpl: batch front end for the dyadic paraproduct laboratory.
//
// Subcommands: basis-verify, characteristic, bmo, norm, verify-suite,
// scaling, decompose. Exit codes: 0 pass, 1 check failure, 2 usage or
// configuration error. DPL_THREADS caps sweep parallelism.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dpl/inequality.hpp"

namespace {

constexpr const char* kVersion = "dpl 0.1.0";
constexpr std::int64_t kSizeGuard = 65536;  // cells; dense matrices scale quadratically

using namespace dpl;

// ---------------------------------------------------------------------------
// Flat key = value configuration
// ---------------------------------------------------------------------------

struct ExperimentConfig {
    int dim = 1;
    int depth = 3;
    std::string weight = "unit";
    std::string symbol = "random:1";
    std::vector<std::string> checks;
    std::uint64_t seed = 1;
    std::int64_t samples = 100000;
    int trials = 20;
    double p = 2.0;
    std::uint64_t sigma_seed = 1;
    std::vector<double> alphas;  // scaling family
    std::string op = "paraproduct";
    std::map<std::string, double> caps;
    std::string out;
    std::string timings;
    bool unsafe_size = false;
    std::string raw;  // exact file bytes, hashed into the manifest
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> items;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) items.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur += c;
        }
    }
    if (!cur.empty()) items.push_back(cur);
    return items;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config: " + path);
    std::stringstream whole;
    whole << is.rdbuf();

    ExperimentConfig cfg;
    cfg.raw = whole.str();
    std::istringstream lines(cfg.raw);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "dim") cfg.dim = std::stoi(value);
        else if (key == "depth") cfg.depth = std::stoi(value);
        else if (key == "weight") cfg.weight = value;
        else if (key == "symbol") cfg.symbol = value;
        else if (key == "checks") cfg.checks = split_list(value);
        else if (key == "seed") cfg.seed = std::stoull(value);
        else if (key == "samples") cfg.samples = std::stoll(value);
        else if (key == "trials") cfg.trials = std::stoi(value);
        else if (key == "p") cfg.p = std::stod(value);
        else if (key == "sigma_seed") cfg.sigma_seed = std::stoull(value);
        else if (key == "op") cfg.op = value;
        else if (key == "out") cfg.out = value;
        else if (key == "timings") cfg.timings = value;
        else if (key == "unsafe_size") cfg.unsafe_size = (value == "1" || value == "true");
        else if (key == "alphas") {
            for (const auto& item : split_list(value)) cfg.alphas.push_back(std::stod(item));
        } else if (key.rfind("cap.", 0) == 0) {
            cfg.caps[key.substr(4)] = std::stod(value);
        } else {
            throw std::runtime_error("config line " + std::to_string(lineno) + ": unknown key '" +
                                     key + "'");
        }
    }
    return cfg;
}

void enforce_size_guard(int dim, int depth, bool unsafe) {
    if (dim < 1 || depth < 0) throw std::runtime_error("dim/depth out of range");
    if (dim * depth > 40) throw std::runtime_error("grid exceeds addressable size");
    if (!unsafe && (std::int64_t{1} << (dim * depth)) > kSizeGuard)
        throw std::runtime_error("2^(dim*depth) exceeds the size guard (use --unsafe-size)");
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_output(const std::string& path, const std::string& bytes) {
    if (path.empty()) {
        std::cout << bytes;
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << bytes;
}

// ---------------------------------------------------------------------------
// Run manifest
// ---------------------------------------------------------------------------

struct ManifestEntry {
    std::string name;
    double value = 0.0;
    bool pass = true;
    std::string region;
    double cap = kNoCap;
};

struct RunManifest {
    std::string config_hash;
    std::string version = kVersion;
    std::vector<ManifestEntry> checks;
    std::vector<double> wall_ms;  // parallel to checks; sidecar only
};

std::string manifest_json(const RunManifest& manifest) {
    std::ostringstream os;
    os << "{\"checks\":[";
    for (std::size_t i = 0; i < manifest.checks.size(); ++i) {
        const auto& entry = manifest.checks[i];
        if (i) os << ",";
        os << "{\"cap\":";
        if (std::isfinite(entry.cap))
            os << format_double(entry.cap);
        else
            os << "null";
        os << ",\"name\":\"" << json_escape(entry.name) << "\"";
        os << ",\"pass\":" << (entry.pass ? "true" : "false");
        os << ",\"region\":\"" << json_escape(entry.region) << "\"";
        os << ",\"value\":" << format_double(entry.value) << "}";
    }
    os << "],\"config_hash\":\"" << manifest.config_hash << "\"";
    os << ",\"version\":\"" << json_escape(manifest.version) << "\"}";
    os << "\n";
    return os.str();
}

std::string timings_csv(const RunManifest& manifest) {
    std::ostringstream os;
    os << "check,wall_ms\n";
    for (std::size_t i = 0; i < manifest.checks.size(); ++i)
        os << manifest.checks[i].name << "," << format_double(manifest.wall_ms[i]) << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// verify-suite checks
// ---------------------------------------------------------------------------

struct SuiteContext {
    const ExperimentConfig& cfg;
    Weight w;
    GridFunction b;
    CarlesonSequence alpha;
};

ManifestEntry run_one_check(const SuiteContext& ctx, const std::string& name) {
    const ExperimentConfig& cfg = ctx.cfg;
    ManifestEntry entry;
    entry.name = name;
    if (auto it = cfg.caps.find(name); it != cfg.caps.end()) entry.cap = it->second;

    const std::string base = name.substr(0, name.find(':'));
    const std::string suffix =
        name.find(':') == std::string::npos ? "" : name.substr(name.find(':') + 1);
    const RegionClass region =
        (suffix == "anisotropic") ? RegionClass::kAnisotropic : RegionClass::kDyadic;

    if (base == "a2d") {
        const auto report = apd_characteristic(ctx.w, cfg.p);
        entry.value = report.value;
        entry.region = report.argmax;
    } else if (base == "a2r") {
        const auto report = a2r_characteristic(ctx.w);
        entry.value = report.value;
        entry.region = report.argmax;
    } else if (base == "bmo") {
        if (suffix == "l2")
            entry.value = bmod_norm(ctx.b, BmoVariant::kL2);
        else if (suffix == "rect")
            entry.value = bmor_norm(ctx.b);
        else
            entry.value = bmod_norm(ctx.b, BmoVariant::kL1);
    } else if (base == "jn") {
        std::vector<double> lambdas;
        for (int i = 1; i <= 20; ++i) lambdas.push_back(0.5 * i);
        const auto report =
            john_nirenberg_profile(ctx.b, DyadicCube::root(cfg.dim).to_rectangle(), lambdas);
        entry.value = report.empirical_constant;
        entry.region = report.worst_region;
        entry.pass = report.pass;
    } else if (base == "selfimp") {
        entry.value = self_improving_ratio(ctx.b, cfg.p);
    } else if (base == "wp1" || base == "wp2" || base == "wp3" || base == "wp4") {
        const Proposition which = (base == "wp1")   ? Proposition::kWp1
                                  : (base == "wp2") ? Proposition::kWp2
                                  : (base == "wp3") ? Proposition::kWp3
                                                    : Proposition::kWp4;
        const auto report = proposition_suite(ctx.w, which, region, &ctx.alpha, entry.cap);
        entry.value = report.empirical_constant;
        entry.region = report.worst_region;
        entry.pass = report.pass;
        return entry;
    } else if (base == "carleson") {
        double worst = 0.0;
        std::string where;
        for (int t = 0; t < cfg.trials; ++t) {
            const GridFunction f = random_grid(cfg.dim, cfg.depth, cfg.seed + 1000 + t, -1.0, 1.0);
            const auto report = weighted_carleson_embedding_check(ctx.alpha, ctx.w, f);
            if (report.empirical_constant > worst) {
                worst = report.empirical_constant;
                where = "trial " + std::to_string(t);
            }
        }
        entry.value = worst;
        entry.region = where;
    } else if (base == "bilinear") {
        const BilinearVariant variant = (suffix == "product") ? BilinearVariant::kProductWeights
                                                              : BilinearVariant::kWeightedAverage;
        const Weight v = ctx.w.reciprocal();
        double worst = 0.0;
        for (int t = 0; t < cfg.trials; ++t) {
            const GridFunction f = random_grid(cfg.dim, cfg.depth, cfg.seed + 2000 + t, -1.0, 1.0);
            const GridFunction g = random_grid(cfg.dim, cfg.depth, cfg.seed + 3000 + t, -1.0, 1.0);
            const auto report = bilinear_embedding_check(ctx.alpha, ctx.w, v, f, g, variant);
            worst = std::max(worst, report.empirical_constant);
        }
        entry.value = worst;
    } else if (base == "bellman") {
        const auto report = bellman_lmwce_check(cfg.samples, cfg.seed);
        entry.value = std::stod(report.params.at("violation_count"));
        entry.pass = report.pass;
    } else if (base == "induction") {
        const HaarIndex root{DyadicCube::root(cfg.dim), 1};
        CheckReport report;
        if (suffix == "mwce") {
            const GridFunction f = random_grid(cfg.dim, cfg.depth, cfg.seed + 4000, 0.1, 2.0);
            report = induction_in_scales_check(make_mwce_instance(ctx.w, ctx.alpha, f), root);
        } else {
            report = induction_in_scales_check(make_wp1_instance(ctx.w, ctx.alpha), root);
        }
        entry.value = report.empirical_constant;
        entry.region = report.worst_region;
        entry.pass = report.pass;
    } else if (base == "mmte") {
        const auto report = mmte_suite(ctx.w, entry.cap);
        entry.value = report.empirical_constant;
        entry.region = report.worst_region;
        entry.pass = report.pass;
        return entry;
    } else if (base == "decomp") {
        double worst = 0.0;
        for (int t = 0; t < cfg.trials; ++t) {
            const GridFunction f = random_grid(cfg.dim, cfg.depth, cfg.seed + 5000 + t, -1.0, 1.0);
            const GridFunction g = random_grid(cfg.dim, cfg.depth, cfg.seed + 6000 + t, -1.0, 1.0);
            const auto parts = product_decomposition(f, g);
            GridFunction reconstructed =
                GridFunction::constant(cfg.dim, cfg.depth, f.integral() * g.integral());
            reconstructed += parts.diagonal;
            reconstructed += parts.upper;
            reconstructed += parts.lower;
            worst = std::max(worst, max_abs_diff(reconstructed, cellwise_product(f, g)));
        }
        entry.value = worst;
    } else if (base == "domination") {
        double worst = 0.0;
        bool ok = true;
        for (int t = 0; t < cfg.trials; ++t) {
            const GridFunction f = random_grid(cfg.dim, cfg.depth, cfg.seed + 7000 + t, -1.0, 1.0);
            const auto report = paraproduct_difference_domination(ctx.b, f);
            worst = std::max(worst, report.empirical_constant);
            ok = ok && report.pass;
        }
        entry.value = worst;
        entry.pass = ok;
    } else if (base == "norm") {
        OperatorMatrix mat;
        if (suffix == "martingale") {
            mat = martingale_matrix(SignPattern::random(cfg.dim, cfg.depth, cfg.sigma_seed));
        } else if (suffix == "square") {
            entry.value = square_function_weighted_norm(ctx.w);
            entry.pass = entry.value <= entry.cap;
            return entry;
        } else if (suffix == "tensor") {
            mat = tensor_paraproduct_matrix(ctx.b);
        } else {
            mat = paraproduct_matrix(ctx.b);
        }
        entry.value = operator_norm_dense(mat, ctx.w);
    } else {
        throw std::runtime_error("unknown check '" + name + "'");
    }
    entry.pass = entry.pass && entry.value <= entry.cap;
    return entry;
}

int cmd_verify_suite(const std::string& config_path, const std::string& out_override,
                     bool unsafe_flag) {
    ExperimentConfig cfg = parse_config(config_path);
    if (!out_override.empty()) cfg.out = out_override;
    enforce_size_guard(cfg.dim, cfg.depth, cfg.unsafe_size || unsafe_flag);

    const GridFunction b = make_symbol(cfg.dim, cfg.depth, cfg.symbol);
    SuiteContext ctx{cfg, make_weight(cfg.dim, cfg.depth, cfg.weight), b,
                     CarlesonSequence::from_symbol(b)};

    RunManifest manifest;
    manifest.config_hash = hex64(fnv1a(cfg.raw));
    bool all_pass = true;
    for (const auto& name : cfg.checks) {
        const auto start = std::chrono::steady_clock::now();
        ManifestEntry entry = run_one_check(ctx, name);
        const auto stop = std::chrono::steady_clock::now();
        manifest.wall_ms.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
        all_pass = all_pass && entry.pass;
        manifest.checks.push_back(std::move(entry));
    }

    write_output(cfg.out, manifest_json(manifest));
    if (!cfg.timings.empty()) write_output(cfg.timings, timings_csv(manifest));
    return all_pass ? 0 : 1;
}

int cmd_scaling(const std::string& config_path, const std::string& out_override,
                bool unsafe_flag) {
    ExperimentConfig cfg = parse_config(config_path);
    if (!out_override.empty()) cfg.out = out_override;
    enforce_size_guard(cfg.dim, cfg.depth, cfg.unsafe_size || unsafe_flag);
    if (cfg.alphas.empty()) throw std::runtime_error("scaling: config needs 'alphas'");

    std::vector<WeightFamilyEntry> family;
    for (double a : cfg.alphas) family.push_back({a, make_power_weight(cfg.dim, cfg.depth, a)});
    const GridFunction b = make_symbol(cfg.dim, cfg.depth, cfg.symbol);

    const ScalingOp op = (cfg.op == "martingale") ? ScalingOp::kMartingale
                         : (cfg.op == "square")   ? ScalingOp::kSquare
                                                  : ScalingOp::kParaproduct;
    const ScalingTable table = scaling_experiment(family, b, op, cfg.sigma_seed);
    write_output(cfg.out, scaling_csv(table));
    return 0;
}

int cmd_basis_verify(int dim, int depth, int levels, const std::string& out, bool unsafe_flag) {
    enforce_size_guard(dim, depth, unsafe_flag);

    bool partition_ok = true;
    std::string first_violation;
    for (int level = 0; level <= std::min(levels, depth); ++level) {
        const std::int64_t cubes = std::int64_t{1} << (dim * level);
        for (std::int64_t flat = 0; flat < cubes; ++flat) {
            const auto report = verify_partition_properties(
                DyadicCube::from_flat(dim, level, static_cast<std::uint64_t>(flat)));
            if (!report.pass) {
                partition_ok = false;
                if (first_violation.empty() && !report.violations.empty())
                    first_violation = report.violations.front();
            }
        }
    }

    // Gram columns through exact analysis: each basis function must come back
    // as a unit coefficient vector.
    const HaarIndexer indexer(dim, depth);
    double gram_error = 0.0;
    for (std::int64_t id = 0; id < indexer.size(); ++id) {
        const HaarIndex idx = indexer.at(id);
        const CoefficientTree tree = analyze(wilson_haar(idx, depth));
        gram_error = std::max(gram_error, std::abs(tree.mean()));
        for (const auto& [other, coef] : tree.coefficients())
            gram_error = std::max(gram_error, std::abs(coef - (other == idx ? 1.0 : 0.0)));
    }

    const GridFunction f = random_grid(dim, depth, 1, -1.0, 1.0);
    const double roundtrip_error = max_abs_diff(synthesize(analyze(f)), f);

    const bool pass = partition_ok && gram_error <= 1e-12 && roundtrip_error <= 1e-12;
    std::ostringstream os;
    os << "{\"depth\":" << depth << ",\"dim\":" << dim;
    os << ",\"gram_error\":" << format_double(gram_error);
    os << ",\"partition_pass\":" << (partition_ok ? "true" : "false");
    if (!first_violation.empty())
        os << ",\"partition_violation\":\"" << json_escape(first_violation) << "\"";
    os << ",\"pass\":" << (pass ? "true" : "false");
    os << ",\"roundtrip_error\":" << format_double(roundtrip_error) << "}\n";
    write_output(out, os.str());
    return pass ? 0 : 1;
}

int cmd_characteristic(int dim, int depth, const std::string& weight_spec, double p, bool rect,
                       const std::string& out, bool unsafe_flag) {
    enforce_size_guard(dim, depth, unsafe_flag);
    const Weight w = make_weight(dim, depth, weight_spec);
    const CharacteristicReport report = rect ? a2r_characteristic(w) : apd_characteristic(w, p);
    write_output(out, to_json(report) + "\n");
    return 0;
}

int cmd_bmo(int dim, int depth, const std::string& symbol_spec, const std::string& variant,
            const std::string& out, bool unsafe_flag) {
    enforce_size_guard(dim, depth, unsafe_flag);
    const GridFunction b = make_symbol(dim, depth, symbol_spec);
    double value = 0.0;
    if (variant == "l1")
        value = bmod_norm(b, BmoVariant::kL1);
    else if (variant == "l2")
        value = bmod_norm(b, BmoVariant::kL2);
    else if (variant == "rect")
        value = bmor_norm(b);
    else
        throw std::runtime_error("bmo: unknown variant '" + variant + "'");
    std::ostringstream os;
    os << "{\"value\":" << format_double(value) << ",\"variant\":\"" << variant << "\"}\n";
    write_output(out, os.str());
    return 0;
}

int cmd_norm(int dim, int depth, const std::string& op, const std::string& symbol_spec,
             const std::string& weight_spec, const std::string& method, double tol, int maxit,
             std::uint64_t sigma_seed, const std::string& out, const std::string& save_matrix,
             bool unsafe_flag) {
    enforce_size_guard(dim, depth, unsafe_flag);
    const Weight w = make_weight(dim, depth, weight_spec);

    std::optional<OperatorMatrix> mat;
    double value = 0.0;
    bool converged = true;
    int iterations = 0;
    if (op == "square") {
        value = square_function_weighted_norm(w);
    } else {
        if (op == "martingale") {
            mat = martingale_matrix(SignPattern::random(dim, depth, sigma_seed));
        } else {
            const GridFunction b = make_symbol(dim, depth, symbol_spec);
            if (op == "tensor") mat = tensor_paraproduct_matrix(b);
            else if (op == "difference") mat = paraproduct_difference_matrix(b);
            else mat = paraproduct_matrix(b);
        }
        if (method == "power") {
            const auto result = operator_norm_power(*mat, w, PowerOptions{tol, maxit});
            value = result.value;
            converged = result.converged;
            iterations = result.iterations;
        } else {
            value = operator_norm_dense(*mat, w);
        }
        if (!save_matrix.empty()) write_opm1_file(save_matrix, *mat);
    }

    std::ostringstream os;
    os << "{\"converged\":" << (converged ? "true" : "false");
    os << ",\"iterations\":" << iterations;
    os << ",\"method\":\"" << method << "\"";
    os << ",\"op\":\"" << op << "\"";
    os << ",\"value\":" << format_double(value) << "}\n";
    write_output(out, os.str());
    return converged ? 0 : 1;
}

int cmd_decompose(const std::string& f_path, const std::string& g_path,
                  const std::string& out_prefix, bool unsafe_flag) {
    const GridFunction f = read_gfn1_file(f_path);
    const GridFunction g = read_gfn1_file(g_path);
    enforce_size_guard(f.dim(), f.depth(), unsafe_flag);
    const auto parts = product_decomposition(f, g);

    GridFunction reconstructed =
        GridFunction::constant(f.dim(), f.depth(), f.integral() * g.integral());
    reconstructed += parts.diagonal;
    reconstructed += parts.upper;
    reconstructed += parts.lower;
    const double residual = max_abs_diff(reconstructed, cellwise_product(f, g));

    if (!out_prefix.empty()) {
        write_gfn1_file(out_prefix + "_diagonal.gfn", parts.diagonal);
        write_gfn1_file(out_prefix + "_upper.gfn", parts.upper);
        write_gfn1_file(out_prefix + "_lower.gfn", parts.lower);
    }
    std::ostringstream os;
    os << "{\"mean_product\":" << format_double(f.integral() * g.integral());
    os << ",\"residual\":" << format_double(residual) << "}\n";
    std::cout << os.str();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dpl: Wilson-Haar dyadic paraproducts and weighted-inequality checks"};
    app.require_subcommand(1);
    bool unsafe_flag = false;
    app.add_flag("--unsafe-size", unsafe_flag, "lift the 2^(dim*depth) <= 65536 guard");

    int dim = 1, depth = 3, levels = 2, maxit = 20000;
    double p = 2.0, tol = 1e-12;
    std::uint64_t sigma_seed = 1;
    std::string weight = "unit", symbol = "random:1", variant = "l1", op = "paraproduct";
    std::string method = "dense", out, config, f_path, g_path, out_prefix, save_matrix;

    auto* basis = app.add_subcommand("basis-verify", "partition + orthonormality checks");
    basis->add_option("--dim", dim)->required();
    basis->add_option("--depth", depth)->required();
    basis->add_option("--levels", levels, "max cube level for the partition check");
    basis->add_option("-o,--out", out);

    auto* characteristic = app.add_subcommand("characteristic", "A_p^d / A_2^R of a weight");
    characteristic->add_option("--dim", dim)->required();
    characteristic->add_option("--depth", depth)->required();
    characteristic->add_option("--weight", weight)->required();
    characteristic->add_option("--p", p);
    bool rect = false;
    characteristic->add_flag("--rect", rect, "rectangle (anisotropic) characteristic");
    characteristic->add_option("-o,--out", out);

    auto* bmo = app.add_subcommand("bmo", "BMO norms of a symbol");
    bmo->add_option("--dim", dim)->required();
    bmo->add_option("--depth", depth)->required();
    bmo->add_option("--symbol", symbol)->required();
    bmo->add_option("--variant", variant, "l1 | l2 | rect");
    bmo->add_option("-o,--out", out);

    auto* norm = app.add_subcommand("norm", "weighted operator norm");
    norm->add_option("--dim", dim)->required();
    norm->add_option("--depth", depth)->required();
    norm->add_option("--op", op, "paraproduct | tensor | difference | martingale | square");
    norm->add_option("--symbol", symbol);
    norm->add_option("--weight", weight)->required();
    norm->add_option("--method", method, "dense | power");
    norm->add_option("--tol", tol);
    norm->add_option("--maxit", maxit);
    norm->add_option("--sigma-seed", sigma_seed);
    norm->add_option("--save-matrix", save_matrix, "write the operator in OPM1 format");
    norm->add_option("-o,--out", out);

    auto* suite = app.add_subcommand("verify-suite", "run configured checks, emit a manifest");
    suite->add_option("--config", config)->required()->check(CLI::ExistingFile);
    suite->add_option("-o,--out", out);

    auto* scaling = app.add_subcommand("scaling", "norm vs characteristic over a weight family");
    scaling->add_option("--config", config)->required()->check(CLI::ExistingFile);
    scaling->add_option("-o,--out", out);

    auto* decompose =
        app.add_subcommand("decompose", "product decomposition of two grid functions");
    decompose->add_option("--f", f_path)->required()->check(CLI::ExistingFile);
    decompose->add_option("--g", g_path)->required()->check(CLI::ExistingFile);
    decompose->add_option("--out-prefix", out_prefix);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (basis->parsed()) return cmd_basis_verify(dim, depth, levels, out, unsafe_flag);
        if (characteristic->parsed())
            return cmd_characteristic(dim, depth, weight, p, rect, out, unsafe_flag);
        if (bmo->parsed()) return cmd_bmo(dim, depth, symbol, variant, out, unsafe_flag);
        if (norm->parsed())
            return cmd_norm(dim, depth, op, symbol, weight, method, tol, maxit, sigma_seed, out,
                            save_matrix, unsafe_flag);
        if (suite->parsed()) return cmd_verify_suite(config, out, unsafe_flag);
        if (scaling->parsed()) return cmd_scaling(config, out, unsafe_flag);
        if (decompose->parsed()) return cmd_decompose(f_path, g_path, out_prefix, unsafe_flag);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
