#pragma once

#include <string>

#include "garding/group.hpp"

namespace garding {

// Radial bump: 1 on [0, r/2], a C-infinity step built from exp(-1/t) on (r/2, r), 0 beyond.
struct BumpProfile {
    double r = 1.5707963267948966;
    std::string id = "exp-step";
    double operator()(double t) const;
};

// Rotation angle of x (SU(2)) or folded Euclidean length (torus): the central norm of log x.
double central_radius(const GroupDescriptor& g, const GroupPoint& x);
// central_radius(x y^{-1})
double central_distance(const GroupDescriptor& g, const GroupPoint& x, const GroupPoint& y);

struct WeightFunction {
    GroupDescriptor group;
    double rho = 1, delta = 0;
    int kappa = 1;
    BumpProfile phi;
    double C0 = 0;  // includes the group volume in exponential coordinates

    double scale(const DualIndex& xi) const;           // <xi>^{(rho + delta) / (2 kappa)}
    double support_radius(const DualIndex& xi) const;  // r / scale
    double radial(double theta, const DualIndex& xi) const;
    double operator()(const GroupPoint& x, const DualIndex& xi) const { return radial(central_radius(group, x), xi); }
    double at_identity(const DualIndex& xi) const { return radial(0.0, xi); }

    // int w_xi^2 conj(chi_tau) over the group (Haar probability measure).
    double character_moment(const DualIndex& xi, const DualIndex& tau) const;
    // ||w_xi||^2 by a radial rule independent of C0's quadrature (Weyl integration on SU(2)).
    double l2_norm_sq(const DualIndex& xi) const;
};

// Throws ConfigError for parameters outside 0 <= delta < rho <= 1 or r beyond the injectivity radius.
WeightFunction build_weight(const GroupDescriptor& g, double rho, double delta, int kappa,
                            const BumpProfile& phi = BumpProfile{});

}  // namespace garding
