#include "garding/weight.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "garding/errors.hpp"

namespace garding {

using std::numbers::pi;

namespace {

double step_half(double t) { return t > 0 ? std::exp(-1.0 / t) : 0.0; }

double sphere_area(int n) {
    // |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2)
    return 2 * std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n);
}

double fold(double v) {
    v = std::fmod(v, 2 * pi);
    if (v > pi) v -= 2 * pi;
    if (v <= -pi) v += 2 * pi;
    return v;
}

// GL nodes mapped to [a, b]
template <class F>
double gl_integrate(F&& f, double a, double b, int n) {
    const auto& [x, w] = gauss_legendre(n);
    double s = 0;
    for (int i = 0; i < n; ++i) s += w[i] * f(0.5 * (a + b) + 0.5 * (b - a) * x[i]);
    return 0.5 * (b - a) * s;
}

}  // namespace

double BumpProfile::operator()(double t) const {
    if (t <= 0.5 * r) return 1.0;
    if (t >= r) return 0.0;
    const double u = (t - 0.5 * r) / (0.5 * r);
    const double a = step_half(1 - u), b = step_half(u);
    return a / (a + b);
}

double central_radius(const GroupDescriptor& g, const GroupPoint& x) {
    if (g.kind == GroupKind::Torus) {
        double s = 0;
        for (double v : x.c) s += fold(v) * fold(v);
        return std::sqrt(s);
    }
    const double c = 0.5 * su2_matrix(x).trace().real();
    return 2 * std::acos(std::clamp(c, -1.0, 1.0));
}

double central_distance(const GroupDescriptor& g, const GroupPoint& x, const GroupPoint& y) {
    return central_radius(g, multiply(g, x, inverse(g, y)));
}

double WeightFunction::scale(const DualIndex& xi) const { return std::pow(xi.weight(), (rho + delta) / (2.0 * kappa)); }

double WeightFunction::support_radius(const DualIndex& xi) const { return phi.r / scale(xi); }

double WeightFunction::radial(double theta, const DualIndex& xi) const {
    const double s = scale(xi);
    const double b = phi(theta * s);
    if (b == 0) return 0.0;
    const int n = group.algebra_dim();
    return C0 * b * std::pow(s, 0.5 * n) / std::sqrt(haar_density_radial(group, theta));
}

double WeightFunction::character_moment(const DualIndex& xi, const DualIndex& tau) const {
    const double R = support_radius(xi);
    const int nodes = 64 + int(4 * tau.degree() * R);
    if (group.kind == GroupKind::SU2) {
        // Weyl: int F = (1/pi) int_0^{2pi} F(theta) sin^2(theta/2) d theta for class functions
        const int d = tau.dim();
        auto f = [&](double th) {
            const double w = radial(th, xi);
            const double chi_s = th < 1e-12 ? d * std::sin(0.5 * th) : std::sin(0.5 * d * th);
            return w * w * chi_s * std::sin(0.5 * th);
        };
        return (gl_integrate(f, 0, 0.5 * R, nodes) + gl_integrate(f, 0.5 * R, R, nodes)) / pi;
    }
    // radial Fourier transform of w^2 at |k|
    const int n = group.n;
    double kk = 0;
    for (int v : tau.k) kk += double(v) * v;
    const double k = std::sqrt(kk);
    auto radial_kernel = [&](double t) -> double {
        const double w = radial(t, xi);
        if (n == 1) return 2 * w * w * std::cos(k * t);
        if (n == 2) return 2 * pi * w * w * std::cyl_bessel_j(0.0, k * t) * t;
        if (n == 3) return 4 * pi * w * w * (k * t < 1e-12 ? 1.0 : std::sin(k * t) / (k * t)) * t * t;
        throw ConfigError("torus dimensions above 3 are not supported by the weight");
    };
    return (gl_integrate(radial_kernel, 0, 0.5 * R, nodes) + gl_integrate(radial_kernel, 0.5 * R, R, nodes)) /
           std::pow(2 * pi, n);
}

double WeightFunction::l2_norm_sq(const DualIndex& xi) const {
    DualIndex triv = group.kind == GroupKind::SU2 ? DualIndex::spin(0)
                                                  : DualIndex::torus(std::vector<int>(group.n, 0));
    return character_moment(xi, triv);
}

WeightFunction build_weight(const GroupDescriptor& g, double rho, double delta, int kappa, const BumpProfile& phi) {
    if (!(rho > 0 && rho <= 1 && delta >= 0 && delta < rho)) throw ConfigError("weight needs 0 <= delta < rho <= 1");
    if (kappa < 1) throw ConfigError("weight needs a positive step");
    if (!(phi.r > 0 && phi.r < pi)) throw ConfigError("bump radius must lie inside the injectivity radius");
    WeightFunction w;
    w.group = g;
    w.rho = rho;
    w.delta = delta;
    w.kappa = kappa;
    w.phi = phi;
    const int n = g.algebra_dim();
    using boost::math::quadrature::gauss_kronrod;
    const double tail = gauss_kronrod<double, 61>::integrate(
        [&](double t) { return phi(t) * phi(t) * std::pow(t, n - 1); }, 0.5 * phi.r, phi.r, 15, 1e-14);
    const double flat = std::pow(0.5 * phi.r, n) / n;
    w.C0 = std::sqrt(g.volume() / (sphere_area(n) * (flat + tail)));
    return w;
}

}  // namespace garding
