#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "garding/harmonic.hpp"

namespace garding {

// One x-basis function: e^{i k.x} on the torus, D^tau_{ab}(x) on SU(2)
// (a, b doubled m-values).
struct XMode {
    DualIndex tau;
    int two_a = 0, two_b = 0;
    bool operator<(const XMode& o) const;
    bool operator==(const XMode& o) const { return tau == o.tau && two_a == o.two_a && two_b == o.two_b; }
};

cd eval_mode(const GroupDescriptor& g, const XMode& mode, const GroupPoint& x);

// Band-limited scalar function sum_r c_r phi_r(x).
struct XFunction {
    GroupDescriptor group;
    std::vector<std::pair<XMode, cd>> terms;

    cd operator()(const GroupPoint& x) const;
    double band() const;  // largest mode degree
    XFunction operator*(cd s) const;
    XFunction operator+(const XFunction& o) const;

    static XFunction constant(const GroupDescriptor& g, cd c);
    // Transform at the given band and verify on a finer rule; throws AliasingError.
    static XFunction from_callable(const GroupDescriptor& g, const std::function<cd(const GroupPoint&)>& f,
                                   double band, double tol = 1e-10);
};

struct ModeTerm {
    XMode mode;
    Eigen::MatrixXcd coef;
};
using ModeExpansion = std::vector<ModeTerm>;  // a(x, xi) = sum phi_mode(x) coef

struct SymbolClassParams {
    double m = 0, rho = 1, delta = 0;
    int kappa = 1;
    double theta() const { return (rho - (2 * kappa - 1) * delta) / kappa; }
    double sobolev_index() const { return 0.5 * (m - theta()); }
    // Throws ConfigError outside 0 <= delta < rho <= 1 (and the theorem window if asked).
    void validate(bool theorem_mode) const;
};

struct SampledTable;

// a(x, xi) = f(x) B(xi); kept alongside the mode form when a symbol is built that way.
struct SymbolFactor {
    XFunction f;
    std::function<Eigen::MatrixXcd(const DualIndex&)> B;
};

class Symbol {
public:
    using ModeFn = std::function<ModeExpansion(const DualIndex&)>;

    GroupDescriptor group;
    SymbolClassParams params;
    std::string name;
    std::string provenance = "closed-form";
    ModeFn modes;
    double x_band = 0;  // bound on the degree of every x-mode
    std::shared_ptr<const SampledTable> samples;  // kept on import for exact re-export
    std::vector<SymbolFactor> factors;             // empty when no product form is known

    Eigen::MatrixXcd value(const GroupPoint& x, const DualIndex& xi) const;
    // Values at many points for one xi (shares the mode expansion).
    std::vector<Eigen::MatrixXcd> values(const std::vector<GroupPoint>& xs, const DualIndex& xi) const;
    bool x_independent() const { return x_band == 0; }

    static Symbol multiplier(const GroupDescriptor& g, std::function<Eigen::MatrixXcd(const DualIndex&)> B,
                             std::string name);
    static Symbol product(const XFunction& f, std::function<Eigen::MatrixXcd(const DualIndex&)> B,
                          std::string name);
    Symbol operator+(const Symbol& o) const;
    Symbol operator*(double c) const;
};

// Sampled symbol values on a quadrature grid, one matrix per (node, dual).
struct SampledTable {
    GroupDescriptor group;
    double degree = 0;
    std::vector<DualIndex> duals;
    std::vector<std::vector<Eigen::MatrixXcd>> values;  // [dual][node]
    SymbolClassParams params;
    std::string name, provenance;
};

SampledTable sample_symbol(const Symbol& a, const QuadratureRule& rule, const std::vector<DualIndex>& duals);
// Rebuilds the mode form by transforming in x; throws AliasingError if the grid
// cannot hold the data, and DomainError when evaluated outside the sampled duals.
Symbol symbol_from_samples(std::shared_ptr<const SampledTable> t);

// ---- sub-Laplacian and weights

struct SubellipticWeight {
    DualIndex xi;
    Eigen::VectorXd nu2;    // ascending when a basis change was needed
    Eigen::MatrixXcd basis;  // columns are eigenvectors; identity when already diagonal
    bool diagonal = true;
    Eigen::MatrixXcd power(double s) const;  // M(xi)^s
};

Eigen::MatrixXcd sublaplacian_matrix(const GroupDescriptor& g, const DualIndex& xi);
SubellipticWeight sublaplacian_symbol(const GroupDescriptor& g, const DualIndex& xi);
Eigen::MatrixXcd weight_power(const GroupDescriptor& g, const DualIndex& xi, double s);
Eigen::MatrixXcd elliptic_power(const DualIndex& xi, double s);

struct WeightComparison {
    double c1 = 0, c2 = 0;  // c1 <xi>^{1/kappa} <= (1+nu^2)^{1/2} <= c2 <xi>
    bool pass = false;
    std::string witness;
};
WeightComparison weight_comparison_check(const GroupDescriptor& g, const std::vector<DualIndex>& duals);

// ---- differences and derivatives

struct DifferenceOperator {
    std::string name;
    XFunction q;
};

// Torus e^{i x_j} - 1, SU(2) D^{1/2}_{ab} - delta_ab.
std::vector<DifferenceOperator> difference_generators(const GroupDescriptor& g);
// Odd first-order monomials: torus i sin x_j; SU(2) Re/Im D^{1/2}_{01}, Im D^{1/2}_{00}.
std::vector<DifferenceOperator> odd_monomials(const GroupDescriptor& g);

Symbol apply_difference(const Symbol& a, const DifferenceOperator& q);
// Applies generator j alpha[j] times, for each j.
Symbol apply_differences(const Symbol& a, const std::vector<DifferenceOperator>& gens, const std::vector<int>& alpha);
// Left-invariant derivative along basis direction j of the algebra.
Symbol x_derivative(const Symbol& a, int j);
Symbol x_derivative_symbol(const Symbol& a, const std::vector<int>& beta);

struct LeibnizReport {
    double residual = 0;
    std::string witness;
};
// Torus first-order Leibniz identity, checked on rule nodes x duals.
LeibnizReport leibniz_check(const Symbol& a1, const Symbol& a2, const std::vector<DualIndex>& duals,
                            const QuadratureRule& rule);
Symbol symbol_product(const Symbol& a1, const Symbol& a2);

// ---- seminorms and class fits

enum class Side { Left, Right };

double seminorm(const Symbol& a, const std::vector<int>& alpha, const std::vector<int>& beta, Side side,
                const SymbolClassParams& p, const std::vector<DualIndex>& duals);

struct ClassFitEntry {
    std::vector<int> alpha, beta;
    double left = 0, right = 0;  // seminorms
    double slope = 0;            // growth exponent against max_i <nu_ii>
    bool vanishes = false;
    bool consistent = false;
};
struct ClassFitReport {
    SymbolClassParams params;
    std::vector<ClassFitEntry> entries;
    double fitted_order = 0;
    bool consistent = false;
};
ClassFitReport class_fit(const Symbol& a, const SymbolClassParams& p, int max_order,
                         const std::vector<DualIndex>& duals, double tol = 0.05);

struct InclusionReport {
    std::vector<double> seminorms_half, seminorms_full;
    double worst_growth = 0;
    bool pass = false;
};
InclusionReport class_inclusion_check(const Symbol& a, double m, const SymbolClassParams& p, int max_order,
                                      const std::vector<DualIndex>& duals);

struct NonnegativityScan {
    bool ok = true;
    double min_eig = 0;
    GroupPoint x;
    DualIndex xi;
};
NonnegativityScan nonnegativity_scan(const Symbol& a, const std::vector<DualIndex>& duals, double tol = 1e-10);

// Grid used to sample a symbol in x (degree >= its band, at least 1).
QuadratureRule symbol_grid(const Symbol& a);

}  // namespace garding
