#pragma once

#include <functional>
#include <string>
#include <vector>

#include "garding/symbol.hpp"

namespace garding {

// Finite section of an operator on the Peter-Weyl basis: M[p, q] = <A e_q, e_p>.
struct OperatorMatrix {
    GroupDescriptor group;
    BasisLayout rows, cols;
    double cutoff = 0;        // <xi> cutoff of the column section
    double quad_degree = 0;   // 0 when assembled without quadrature
    std::string provenance;
    Eigen::MatrixXcd M;

    bool square() const { return rows.duals == cols.duals; }
    Eigen::MatrixXcd hermitian_part() const { return 0.5 * (M + M.adjoint()); }
    // Sub-block on the given duals (rows and columns), which must be present.
    OperatorMatrix restrict_to(const std::vector<DualIndex>& duals) const;
};

// Duals whose neighbourhood of the given degree still lies inside the section.
std::vector<DualIndex> interior_duals(const std::vector<DualIndex>& duals, double cutoff, double margin);
// Largest degree among the duals (|k|_max on the torus, l on SU(2)).
double max_degree(const std::vector<DualIndex>& duals);

OperatorMatrix op_from_symbol(const Symbol& a, double cutoff);
OperatorMatrix op_from_symbol(const Symbol& a, const BasisLayout& rows, const BasisLayout& cols);
// Same matrix by applying the quantization formula on grid samples and projecting;
// throws AliasingError when the rule cannot integrate the products exactly.
OperatorMatrix op_from_symbol_quadrature(const Symbol& a, double cutoff, const QuadratureRule& rule);
// Block-diagonal section of an x-independent multiplier.
OperatorMatrix multiplier_section(const GroupDescriptor& g, const BasisLayout& layout,
                                  const std::function<Eigen::MatrixXcd(const DualIndex&)>& B);

// a(x, xi) = xi(x)^* (A xi)(x), on the duals at least `margin` away from the section edge.
// Evaluation elsewhere throws DomainError.
Symbol symbol_of_operator(const OperatorMatrix& A, double margin);

// p(x, y, xi) either as a sum psi_r(y) a_r(x, xi) or as a pointwise callable.
struct AmplitudeTerm {
    XFunction y_factor;
    Symbol symbol;
};

struct Amplitude {
    using Fn = std::function<Eigen::MatrixXcd(const GroupPoint&, const GroupPoint&, const DualIndex&)>;
    GroupDescriptor group;
    SymbolClassParams params;
    std::string name;
    std::vector<AmplitudeTerm> terms;
    Fn fn;
    double x_band = 0, y_band = 0;
    double xi_reach = 0;  // callable form: degree beyond the section the xi-sum must reach

    Eigen::MatrixXcd value(const GroupPoint& x, const GroupPoint& y, const DualIndex& xi) const;
    bool separable() const { return !fn; }
    static Amplitude from_symbol(const Symbol& a);
};

// Separable amplitudes are assembled exactly as Op(a_r) composed with multiplication
// by psi_r; callable ones through the spatial kernel on the rule.
OperatorMatrix aop_from_amplitude(const Amplitude& p, double cutoff);
OperatorMatrix aop_from_amplitude_kernel(const Amplitude& p, double cutoff, const QuadratureRule& rule);

OperatorMatrix adjoint(const OperatorMatrix& A);
OperatorMatrix compose(const OperatorMatrix& A, const OperatorMatrix& B);

struct ExpansionReport {
    int order = 0;
    std::vector<DualIndex> duals;
    std::vector<double> residual;  // sup_x |sigma_exact - sigma_N| per dual
    double weighted_residual = 0;  // sup of <xi>^{-(m - (rho - delta)(N + 1))} residual
    double fitted_exponent = 0;    // over 4 <= <xi> <= 32
    double residual_at_16 = 0;
};
// Torus only: compares the exact symbol of AOp(p) with the order-N difference expansion.
ExpansionReport expansion_check(const Amplitude& p, int N, double cutoff);

enum class SobolevScale { Elliptic, Subelliptic };
double sobolev_norm(const FourierCoefficients& u, double s, SobolevScale scale);

}  // namespace garding
