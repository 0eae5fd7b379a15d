// SPDX-License-Identifier: MIT
//
// Exact finite-dimensional realizations of the paraproducts, their adjoints,
// the martingale transform, square functions, the pointwise product
// decomposition, and weighted operator norms. All operator sums run over
// cubes of level 0..depth-1, so outputs live exactly at the grid depth.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>

#include "dpl/haar.hpp"
#include "dpl/weights.hpp"

namespace dpl {

// Total map HaarIndex -> {-1,+1} over all indices with cube level < depth.
class SignPattern {
  public:
    SignPattern(int dim, int depth, int sign);
    static SignPattern constant(int dim, int depth, int sign) { return {dim, depth, sign}; }
    static SignPattern random(int dim, int depth, std::uint64_t seed);

    int dim() const { return indexer_.dim(); }
    int depth() const { return indexer_.depth(); }

    int sign(const HaarIndex& idx) const;
    void set(const HaarIndex& idx, int sign);

  private:
    HaarIndexer indexer_;
    std::vector<std::int8_t> signs_;
};

// pi_b f = sum <f>_{E_{j,Q}} <b, h_{j,Q}> h_{j,Q}.
GridFunction paraproduct(const GridFunction& b, const GridFunction& f);

// pi*_b f = sum <f, h><b, h> chi_E / |E|; adjoint of pi_b in plain L2.
GridFunction paraproduct_adjoint(const GridFunction& b, const GridFunction& f);

enum class TensorRoute { kWilson, kTensor };

// pi^s_b f = sum_Q <f>_Q sum <b, h^s> h^s; by the span equality of W(Q) the
// Wilson-basis route computes the same operator.
GridFunction tensor_paraproduct(const GridFunction& b, const GridFunction& f,
                                TensorRoute route = TensorRoute::kWilson);

// pi^s_b f - pi_b f = sum (<f>_Q - <f>_{E_{j,Q}}) <b, h> h, computed directly.
GridFunction paraproduct_difference(const GridFunction& b, const GridFunction& f);

// Pointwise domination of |pi^s_b f - pi_b f| by the triple sum
// sum |<f,h_{i,Q}>||<b,h_{j,Q}>| chi_E / |E| over E_{i,Q} strictly above
// E_{j,Q}; reports the maximal cellwise ratio (the explicit finite constant).
CheckReport paraproduct_difference_domination(const GridFunction& b, const GridFunction& f);

// T_sigma f = sum sigma_E <f, h> h.
GridFunction martingale_transform(const SignPattern& sigma, const GridFunction& f);

enum class SquareForm { kIncrement, kWilson };

// Increment form: (sum over Q of level 1..L of (<f>_Q - <f>_parent)^2 chi_Q)^{1/2}.
// Wilson form: (sum over Q of level 0..L-1 of |Q|^{-1} sum_j <f,h_{j,Q}>^2 chi_Q)^{1/2}.
// The two have equal L2 norms (per-cube Parseval) but differ pointwise.
GridFunction square_function(const GridFunction& f, SquareForm form);

struct ProductDecomposition {
    GridFunction diagonal;  // (I)   sum <f,h><g,h> chi_E / |E|
    GridFunction upper;     // (II)  sum <f,h><g>_E h
    GridFunction lower;     // (III) sum <g,h><f>_E h
};

// fg = <f><g> + (I) + (II) + (III) exactly on the unit cube; the <f><g> term
// is the finite-domain correction carried by the global averages.
ProductDecomposition product_decomposition(const GridFunction& f, const GridFunction& g);

// Dense matrix acting on cell-value vectors.
struct OperatorMatrix {
    int dim = 1;
    int depth = 0;
    std::string kind;
    std::uint64_t symbol_hash = 0;
    Eigen::MatrixXd mat;
};

// Assembles the matrix of a linear grid-function map by applying it to the
// cell indicator basis.
OperatorMatrix assemble_matrix(int dim, int depth, const std::string& kind,
                               std::uint64_t symbol_hash,
                               const std::function<GridFunction(const GridFunction&)>& apply);

OperatorMatrix paraproduct_matrix(const GridFunction& b);
OperatorMatrix tensor_paraproduct_matrix(const GridFunction& b);
OperatorMatrix paraproduct_difference_matrix(const GridFunction& b);
OperatorMatrix martingale_matrix(const SignPattern& sigma);

std::uint64_t grid_hash(const GridFunction& g);

// L2(w) -> L2(w) operator norm: the top singular value of the similarity
// transform by the diagonal square root of the weight.
double operator_norm_dense(const OperatorMatrix& op, const Weight& w);

struct PowerIterationResult {
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct PowerOptions {
    double tol = 1e-12;  // residual tolerance, relative to the eigenvalue
    int maxit = 20000;
};

// Power iteration on the conjugated normal matrix; non-convergence is
// reported in the result, never silently truncated.
PowerIterationResult operator_norm_power(const OperatorMatrix& op, const Weight& w,
                                         PowerOptions options = {});

// <pi_b(f w^{-1/2}), g w^{1/2}> in the unweighted pairing; its supremum over
// unit f, g equals operator_norm(pi_b, w).
double bilinear_form(const GridFunction& b, const GridFunction& f, const GridFunction& g,
                     const Weight& w);

// sup ||S_d f||_{L2(w)} / ||f||_{L2(w)} for the increment-form square
// function, via the top generalized Rayleigh quotient of its quadratic form.
double square_function_weighted_norm(const Weight& w);

// OPM1 text format: "opm 1" / "dim=<n> depth=<L> kind=<name>" / row-major values.
void write_opm1(std::ostream& os, const OperatorMatrix& op);
OperatorMatrix read_opm1(std::istream& is);
void write_opm1_file(const std::string& path, const OperatorMatrix& op);
OperatorMatrix read_opm1_file(const std::string& path);

}  // namespace dpl
