#pragma once

#include <vector>

#include "garding/quantization.hpp"
#include "garding/weight.hpp"

namespace garding {

// The dual sum defining P is infinite; it stops once the contribution of a
// whole degree shell falls below tail_tol times the largest one seen.
struct FriedrichsOptions {
    double tail_tol = 1e-7;
    double max_degree = 0;  // hard cap on the summed degree; 0 picks a default
};

struct FriedrichsResult {
    std::vector<OperatorMatrix> P;  // one per input symbol
    double reached_degree = 0;
    double last_tail = 0;   // relative size of the last summed shell
    bool capped = false;    // stopped by max_degree rather than the tolerance
    std::size_t duals_summed = 0;
};

// p(x, y, xi) = int w_xi(x z^-1) w_xi(y z^-1) a(z, xi) dz on a local grid around
// the midpoint of x and y; nodes per axis of the grid.
Amplitude friedrichs_amplitude(const Symbol& a, const WeightFunction& w, int nodes = 0);

// p(x, x, xi) in closed mode form: each x-mode of a is damped by the character moment of w^2.
Symbol friedrichs_diagonal_symbol(const Symbol& a, const WeightFunction& w);

// Sections of P for several symbols sharing one pass over the duals.
FriedrichsResult friedrichs_operators(const std::vector<Symbol>& symbols, const WeightFunction& w, double cutoff,
                                      const FriedrichsOptions& opt = {});
OperatorMatrix friedrichs_operator(const Symbol& a, const WeightFunction& w, double cutoff,
                                   const FriedrichsOptions& opt = {});

// <W e_q, e_{xi,cd}> for every section basis function q, rows c*d_xi + d.
Eigen::MatrixXd weight_coupling(const WeightFunction& w, const DualIndex& xi, const BasisLayout& section);

struct PositivityVerdict {
    bool pass = false;
    double lambda_min = 0;
    double norm = 0;
    double tol = 0;
};
PositivityVerdict positivity_check(const OperatorMatrix& P, double tol);

struct ManifestCheck {
    std::vector<double> form;      // (P u, u) from the assembled section
    std::vector<double> manifest;  // the same form written as an integral of squares
    double max_rel_diff = 0;
    bool pass = false;
};
// Uses the same truncation of the dual sum for both sides.
ManifestCheck manifest_form_check(const Symbol& a, const WeightFunction& w, double cutoff, int vectors,
                                  unsigned seed, const FriedrichsOptions& opt, double tol = 1e-6);

}  // namespace garding
