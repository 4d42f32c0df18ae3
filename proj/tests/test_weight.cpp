#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "garding/errors.hpp"
#include "garding/symbol.hpp"
#include "garding/weight.hpp"

using namespace garding;
using std::numbers::pi;

namespace {

// Composite Simpson on [a, b].
template <class F>
double simpson(F&& f, double a, double b, int panels) {
    const double h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int i = 1; i < panels; ++i) s += (i % 2 ? 4 : 2) * f(a + i * h);
    return s * h / 3;
}

// Tensor Gauss-Legendre grid on [-R, R]^n in exponential coordinates, Haar density / volume.
template <class F>
double local_integral(const GroupDescriptor& g, double R, int nodes, F&& f) {
    const int n = g.algebra_dim();
    const auto& [x, w] = gauss_legendre(nodes);
    std::vector<int> idx(n, 0);
    double acc = 0;
    while (true) {
        LieAlgebraVector Y;
        double wt = 1;
        for (int k = 0; k < n; ++k) {
            Y.c.push_back(R * x[idx[k]]);
            wt *= R * w[idx[k]];
        }
        acc += wt * haar_density(g, Y) / g.volume() * f(exp_map(g, Y));
        int k = 0;
        while (k < n && ++idx[k] == nodes) idx[k++] = 0;
        if (k == n) break;
    }
    return acc;
}

// Duals whose weight is close to 2, 8 and 32.
std::vector<DualIndex> test_duals(const GroupDescriptor& g) {
    if (g.kind == GroupKind::Torus) return {DualIndex::torus({2}), DualIndex::torus({8}), DualIndex::torus({32})};
    return {DualIndex::spin(3), DualIndex::spin(15), DualIndex::spin(63)};
}

}  // namespace

TEST(Weight, BumpProfileShape) {
    BumpProfile phi;
    EXPECT_EQ(phi(0.0), 1.0);
    EXPECT_EQ(phi(0.5 * phi.r), 1.0);
    EXPECT_EQ(phi(phi.r), 0.0);
    EXPECT_EQ(phi(2 * phi.r), 0.0);
    double prev = 1;
    for (int i = 0; i <= 200; ++i) {
        const double v = phi(phi.r * i / 200.0);
        EXPECT_LE(v, prev + 1e-15);
        prev = v;
    }
    EXPECT_NEAR(phi(0.75 * phi.r), 0.5, 1e-15);  // symmetric step
}

TEST(Weight, NormalizationConstantOracle) {
    BumpProfile phi;
    for (const auto& g : {GroupDescriptor::torus(1), GroupDescriptor::torus(2), GroupDescriptor::su2()}) {
        const int n = g.algebra_dim();
        const double radial = simpson([&](double t) { return phi(t) * phi(t) * std::pow(t, n - 1); }, 0, phi.r, 20000);
        const double sphere = n == 1 ? 2 : (n == 2 ? 2 * pi : 4 * pi);
        const double oracle = std::sqrt(g.volume() / (sphere * radial));
        const auto w = build_weight(g, 1, 0, 1);
        EXPECT_NEAR(w.C0, oracle, 1e-9 * oracle) << g.name();
    }
}

TEST(Weight, ValueAtIdentity) {
    for (const auto& g : {GroupDescriptor::torus(1), GroupDescriptor::su2()}) {
        const int n = g.algebra_dim();
        for (auto [rho, delta, kappa] : {std::tuple{1.0, 0.0, 1}, std::tuple{0.5, 0.25, 1}, std::tuple{1.0, 0.0, 2}}) {
            const auto w = build_weight(g, rho, delta, kappa);
            for (const auto& xi : enumerate_dual(g, 20)) {
                const double expect = w.C0 * std::pow(xi.weight(), n * (rho + delta) / (4.0 * kappa));
                EXPECT_NEAR(w.at_identity(xi), expect, 1e-12 * expect);
                EXPECT_NEAR(w(identity(g), xi), expect, 1e-12 * expect);
            }
        }
    }
}

TEST(Weight, NormalizationTorus) {
    const auto g = GroupDescriptor::torus(1);
    for (auto [rho, delta] : {std::pair{1.0, 0.0}, std::pair{0.5, 0.25}}) {
        const auto w = build_weight(g, rho, delta, 1);
        for (const auto& xi : test_duals(g)) {
            const double R = w.support_radius(xi);
            // refined oracle: fine Simpson over the support, Haar measure dx / 2pi
            const double direct = simpson(
                [&](double x) {
                    const double v = w(GroupPoint{{x}}, xi);
                    return v * v;
                },
                -R, R, 40000) / (2 * pi);
            EXPECT_NEAR(direct, 1.0, 1e-6) << xi.label();
            EXPECT_NEAR(w.l2_norm_sq(xi), 1.0, 1e-6) << xi.label();
        }
    }
}

TEST(Weight, NormalizationSu2) {
    const auto g = GroupDescriptor::su2();
    for (int kappa : {1, 2}) {
        const auto w = build_weight(g, 1, 0, kappa);
        for (const auto& xi : test_duals(g)) {
            const double R = w.support_radius(xi);
            // Cartesian grid in exponential coordinates through the group evaluator
            const double cart = local_integral(g, R, 48, [&](const GroupPoint& x) {
                const double v = w(x, xi);
                return v * v;
            });
            EXPECT_NEAR(cart, 1.0, 1e-4) << xi.label();
            // Weyl integration formula for class functions
            const double weyl = simpson(
                [&](double th) {
                    const double v = w.radial(th, xi);
                    return v * v * std::sin(0.5 * th) * std::sin(0.5 * th);
                },
                0, R, 20000) / pi;
            EXPECT_NEAR(weyl, 1.0, 1e-8) << xi.label();
            EXPECT_NEAR(w.l2_norm_sq(xi), 1.0, 1e-8) << xi.label();
        }
    }
}

TEST(Weight, ParityCentralityAndSupport) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> U(-1, 1);
    for (const auto& g : {GroupDescriptor::torus(1), GroupDescriptor::torus(2), GroupDescriptor::su2()}) {
        const auto w = build_weight(g, 1, 0, g.kind == GroupKind::SU2 ? 2 : 1);
        for (const auto& xi : test_duals(g)) {
            const DualIndex x2 = g.kind == GroupKind::Torus && g.n == 2 ? DualIndex::torus({xi.k[0], 1}) : xi;
            const double R = w.support_radius(x2);
            double worst = 0;
            for (int t = 0; t < 200; ++t) {
                LieAlgebraVector Y, Z;
                for (int k = 0; k < g.algebra_dim(); ++k) {
                    Y.c.push_back(1.2 * R * U(rng));
                    Z.c.push_back(pi * U(rng));
                }
                const GroupPoint x = exp_map(g, Y), y = exp_map(g, Z);
                const double v = w(x, x2);
                worst = std::max(worst, std::abs(v - w(inverse(g, x), x2)));
                worst = std::max(worst, std::abs(v - w(multiply(g, multiply(g, y, x), inverse(g, y)), x2)));
                if (Y.central_norm() >= R * (1 + 1e-12)) EXPECT_EQ(v, 0.0);
                if (Y.central_norm() <= 0.999 * R) EXPECT_GT(v, 0.0);
            }
            EXPECT_LE(worst, 1e-12 * w.at_identity(x2)) << g.name();
            // exactly at and just beyond the radius
            LieAlgebraVector edge;
            edge.c.assign(g.algebra_dim(), 0.0);
            edge.c[0] = R;
            EXPECT_EQ(w(exp_map(g, edge), x2), 0.0);
        }
    }
}

TEST(Weight, OddMonomialsCancel) {
    for (const auto& g : {GroupDescriptor::torus(1), GroupDescriptor::su2()}) {
        const auto w = build_weight(g, 1, 0, g.kind == GroupKind::SU2 ? 2 : 1);
        for (const auto& q : odd_monomials(g))
            for (const auto& xi : test_duals(g)) {
                const double R = w.support_radius(xi);
                double mass = 0;
                auto integrand = [&](const GroupPoint& x, bool absolute) {
                    const double v = w(x, xi);
                    const cd qv = q.q(x);
                    return absolute ? v * v * std::abs(qv) : v * v * qv.real() + v * v * qv.imag();
                };
                const double odd = local_integral(g, R, 24, [&](const GroupPoint& x) { return integrand(x, false); });
                mass = local_integral(g, R, 24, [&](const GroupPoint& x) { return integrand(x, true); });
                EXPECT_GT(mass, 1e-3) << q.name;
                EXPECT_LE(std::abs(odd), 1e-10) << q.name << " " << xi.label();
            }
    }
}

TEST(Weight, CharacterMomentOracle) {
    {
        const auto g = GroupDescriptor::su2();
        const auto w = build_weight(g, 1, 0, 2);
        for (const auto& xi : {DualIndex::spin(2), DualIndex::spin(15)})
            for (int tt : {1, 2, 4}) {
                const DualIndex tau = DualIndex::spin(tt);
                const double brute = local_integral(g, w.support_radius(xi), 40, [&](const GroupPoint& x) {
                    const double v = w(x, xi);
                    return v * v * rep_matrix(g, tau, x).trace().real();
                });
                EXPECT_NEAR(w.character_moment(xi, tau), brute, 1e-5 * std::abs(brute)) << xi.label() << " " << tau.label();
            }
    }
    {
        const auto g = GroupDescriptor::torus(1);
        const auto w = build_weight(g, 1, 0, 1);
        for (int k : {0, 1, 3, 7}) {
            const DualIndex xi = DualIndex::torus({5});
            const double R = w.support_radius(xi);
            const double brute = simpson(
                [&](double x) {
                    const double v = w(GroupPoint{{x}}, xi);
                    return v * v * std::cos(k * x);
                },
                -R, R, 20000) / (2 * pi);
            EXPECT_NEAR(w.character_moment(xi, DualIndex::torus({k})), brute, 1e-9);
        }
    }
}

TEST(Weight, RejectsBadParameters) {
    const auto g = GroupDescriptor::torus(1);
    EXPECT_THROW(build_weight(g, 0.5, 0.5, 1), ConfigError);
    EXPECT_THROW(build_weight(g, 1.2, 0.0, 1), ConfigError);
    EXPECT_THROW(build_weight(g, 1.0, -0.1, 1), ConfigError);
    BumpProfile wide;
    wide.r = 3.5;
    EXPECT_THROW(build_weight(g, 1.0, 0.0, 1, wide), ConfigError);
}
