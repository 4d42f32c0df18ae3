#pragma once

#include <Eigen/Dense>
#include <vector>

// Spin quantities are passed doubled (two_l = 2l) so half-integers stay exact.
namespace garding {

// Small Wigner d-function d^l_{mn}(beta), three-term recurrence in l.
double wigner_d(int two_l, int two_m, int two_n, double beta);

// Full (2l+1)x(2l+1) matrix, rows and columns in ascending m.
Eigen::MatrixXd wigner_d_matrix(int two_l, double beta);

// d^l_{mn}(beta) for every l in the family of two_lmax (same parity), all m, n.
// Result[k] is the matrix for two_l = parity + 2k.
std::vector<Eigen::MatrixXd> wigner_d_all(int two_lmax, double beta);

// Clebsch-Gordan coefficient <j1 m1 j2 m2 | J M>, Condon-Shortley phase.
double clebsch_gordan(int two_j1, int two_m1, int two_j2, int two_m2, int two_J, int two_M);

// Streams d^l_{m,m+shift}(beta_k) upward in l on a fixed set of angles, for all
// pairs with |shift| <= two_max_shift/2. One instance per parity family.
class WignerStream {
public:
    WignerStream(const std::vector<double>& betas, int parity, int two_max_shift);

    int two_l() const { return two_l_; }
    // Advance to the next l of the family (first call lands on l = parity/2).
    void advance();
    // Values at the current l; rows in ascending m, shift = (n - m).
    // Returns nullptr when the pair is outside the current representation.
    const double* values(int two_m, int two_n) const;

private:
    std::size_t slot(int two_m, int two_n) const;
    void grow(int two_lcap);

    std::vector<double> betas_, cosb_, half_cos_, half_sin_;
    int parity_, two_max_shift_, two_l_ = -1, two_cap_ = -1;
    std::vector<double> cur_, prev_;
};

}  // namespace garding

namespace garding {
// Memoized clebsch_gordan for assembly loops (per thread).
double clebsch_gordan_cached(int two_j1, int two_m1, int two_j2, int two_m2, int two_J, int two_M);
}  // namespace garding
