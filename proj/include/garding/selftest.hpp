#pragma once

#include <random>
#include <string>
#include <vector>

#include "garding/symbol.hpp"

namespace garding {

struct CheckResult {
    std::string name;
    double value = 0;  // the measured error (or constant, for the comparison check)
    double tol = 0;
    bool pass = false;
    double seconds = 0;
    std::string detail;
};

// Degree used by the self-tests when the config does not name one.
double default_selftest_degree(const GroupDescriptor& g);
// Smallest quadrature degree that integrates products of two modes of the given degree exactly.
double gram_quadrature_degree(const GroupDescriptor& g, double degree);

// max |<e_p, e_q> - delta_pq| by quadrature; throws AliasingError when quad_degree is too coarse.
CheckResult peter_weyl_check(const GroupDescriptor& g, double degree, double quad_degree);
// Random coefficients through synthesis and analysis; also Parseval against the grid norm.
std::vector<CheckResult> round_trip_checks(const GroupDescriptor& g, double degree, double quad_degree, unsigned seed);
// -sum_j X_j^2 on each dual's coefficient functions against |k|^2 or l(l+1).
CheckResult laplacian_spectrum_check(const GroupDescriptor& g, double degree);
// SU(2) sub-Laplacian diagonal against l(l+1) - m^2 and against one-parameter-subgroup differences.
CheckResult sublaplacian_check(int two_lmax);
// Torus first-order Leibniz identity on random band-limited pairs.
CheckResult leibniz_random_check(int pairs, unsigned seed);
// c <xi>^{1/kappa} <= (1 + nu^2)^{1/2} <= c' <xi> up to the given degree.
CheckResult weight_comparison_run(const GroupDescriptor& g, double degree);

// Everything above for one group.
std::vector<CheckResult> selftest_suite(const GroupDescriptor& g, double degree, double quad_degree, unsigned seed);

// Smooth torus symbol with x-band <= 3 drawn from rng.
Symbol random_torus_symbol(std::mt19937& rng);

}  // namespace garding
