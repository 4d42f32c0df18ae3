#pragma once

#include <optional>
#include <string>
#include <vector>

#include "garding/friedrichs.hpp"

namespace garding {

// Harness cutoffs are degrees: |k| on the torus, the spin l on SU(2).
double cutoff_for_degree(const GroupDescriptor& g, double degree);

// Nonnegative test symbols with their class parameters, four per backend;
// the SU(2) set includes x-dependent matrix-valued members.
std::vector<Symbol> nonnegative_suite(const GroupDescriptor& g);
// a(x) (I + L) with a = |D^{1/2}_{00}|^2 = cos^2(beta/2), order 2 at step 2.
Symbol weighted_laplacian_symbol();
// cos(x) <xi>^2 on the torus: sign-changing control.
Symbol sign_changing_control();

// Scaled form M^-s A M^-s restricted to the interior of a degree cutoff.
struct SweepRow {
    double cutoff = 0;
    int interior_size = 0;
    double lambda_min = 0;
    double seconds = 0;
};

// lambda_min of Herm(M^-s A M^-s) per cutoff, without any precondition.
std::vector<SweepRow> lambda_sweep(const Symbol& a, double s, const std::vector<double>& cutoffs);

// |lambda_{k+1} - lambda_k| <= 0.1 (1 + |lambda_k|) for the top pair.
bool decrements_shrink(const std::vector<SweepRow>& rows);

struct RemainderRow {
    double cutoff = 0;
    double total = 0;     // ||M^-s (A - P) M^-s||
    double diagonal = 0;  // ||M^-s Op(p(x,x,.) - a) M^-s||
};
struct RemainderReport {
    double s = 0;
    std::vector<RemainderRow> rows;
    double total_variation = 0, diagonal_variation = 0;  // (max - min) / max over the top three
    FriedrichsResult friedrichs;                          // at the largest cutoff
    bool pass = false;
};
RemainderReport remainder_bounds(const Symbol& a, const WeightFunction& w, const SymbolClassParams& p,
                                 const std::vector<double>& cutoffs, const FriedrichsOptions& opt = {});
// Fills rep.rows, the variations and the verdict from a P already built at the top cutoff; rep.s must be set.
void remainder_rows(RemainderReport& rep, const Symbol& a, const WeightFunction& w, const std::vector<double>& cutoffs,
                    const OperatorMatrix& P);

struct GardingReport {
    std::string symbol;
    GroupDescriptor group;
    SymbolClassParams params;
    double theta = 0, s = 0;
    std::vector<SweepRow> rows;
    double C_estimate = 0;
    bool rejected = false;  // failed the nonnegativity gate
    std::string rejection;
    NonnegativityScan witness;
    bool stable = false;
    std::optional<bool> positivity, remainder;  // set when those stages ran

    bool pass() const;
    std::string verdict() const;  // PASS, FAIL or REJECTED
};

// Throws ConfigError outside the theorem window; a symbol failing the
// nonnegativity scan comes back rejected with the witness.
GardingReport garding_verify(const Symbol& a, const SymbolClassParams& p, const std::vector<double>& cutoffs);

struct ProbeRow {
    double s = 0;
    std::string label;  // "theorem", "conjectured" or "extra"
    std::vector<SweepRow> rows;
    bool bounded = false, divergent = false;
};
// Data only: no nonnegativity gate, no claim about the conjecture.
std::vector<ProbeRow> sharpness_probe(const Symbol& a, const SymbolClassParams& p, const std::vector<double>& s_list,
                                      const std::vector<double>& cutoffs);

struct ExponentRow {
    std::string route;
    double index = 0;
    bool applicable = false;
    bool proved = true;  // false for the conjectured index
    bool strongest = false;
};
// Sobolev indices from the theorem, the three elliptic-route consequences and the conjecture.
std::vector<ExponentRow> exponent_table(const SymbolClassParams& p);

}  // namespace garding
