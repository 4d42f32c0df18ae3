#include <gtest/gtest.h>

#include <random>

#include "garding/harmonic.hpp"

using namespace garding;

namespace {

FourierCoefficients random_coeffs(const GroupDescriptor& g, const std::vector<DualIndex>& duals, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> N(0, 1);
    FourierCoefficients c;
    c.group = g;
    c.duals = duals;
    for (const auto& d : duals) {
        Eigen::MatrixXcd B(d.dim(), d.dim());
        for (int i = 0; i < B.size(); ++i) B.data()[i] = cd(N(rng), N(rng));
        c.blocks.push_back(B);
    }
    return c;
}

}  // namespace

TEST(Transform, Constants) {
    auto g = GroupDescriptor::su2();
    auto R = haar_quadrature(g, 2);
    auto duals = enumerate_dual(g, su2_cutoff(2));
    auto one = sample(R, [](const GroupPoint&) { return cd(1, 0); });
    auto c = forward_transform(R, one, duals);
    EXPECT_NEAR(std::abs(c.blocks[0](0, 0) - 1.0), 0, 1e-14);
    for (std::size_t k = 1; k < duals.size(); ++k) EXPECT_LT(c.blocks[k].norm(), 1e-14);
    EXPECT_NEAR(plancherel_norm(c), 1.0, 1e-14);
    FourierCoefficients z = c;
    for (auto& b : z.blocks) b.setZero();
    EXPECT_EQ(plancherel_norm(z), 0.0);
    auto back = inverse_transform(c, R);
    EXPECT_LT((back - one).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Transform, SingleCoefficient) {
    auto g = GroupDescriptor::su2();
    auto R = haar_quadrature(g, 2);
    auto duals = enumerate_dual(g, su2_cutoff(2));
    auto f = sample(R, [&](const GroupPoint& x) { return rep_matrix(g, DualIndex::spin(1), x)(1, 1); });
    auto c = forward_transform(R, f, duals);
    EXPECT_NEAR(std::abs(c.blocks[1](1, 1)), 0.5, 1e-13);
    EXPECT_LT(std::abs(c.blocks[1](0, 0)) + std::abs(c.blocks[1](0, 1)) + std::abs(c.blocks[1](1, 0)), 1e-13);
    auto t = haar_quadrature(GroupDescriptor::torus(1), 4);
    auto e2 = sample(t, [](const GroupPoint& x) { return std::polar(1.0, 2 * x.c[0]); });
    auto ct = forward_transform(t, e2, enumerate_dual(GroupDescriptor::torus(1), 5));
    for (std::size_t k = 0; k < ct.duals.size(); ++k)
        EXPECT_NEAR(std::abs(ct.blocks[k](0, 0)), ct.duals[k].k[0] == 2 ? 1.0 : 0.0, 1e-14);
}

TEST(Transform, RoundTripAndParseval) {
    {
        auto g = GroupDescriptor::torus(1);
        auto duals = enumerate_dual(g, 32);
        auto R = haar_quadrature(g, 32);
        auto c = random_coeffs(g, duals, 1);
        auto f = inverse_transform(c, R);
        auto c2 = forward_transform(R, f, duals);
        double err = 0;
        for (std::size_t k = 0; k < duals.size(); ++k) err = std::max(err, (c2.blocks[k] - c.blocks[k]).norm());
        EXPECT_LT(err, 1e-12);
        EXPECT_NEAR(plancherel_norm(c), quadrature_l2(R, f), 1e-10 * plancherel_norm(c));
    }
    {
        auto g = GroupDescriptor::su2();
        auto duals = enumerate_dual(g, su2_cutoff(3));
        auto R = haar_quadrature(g, 3);
        auto c = random_coeffs(g, duals, 2);
        auto f = inverse_transform(c, R);
        auto c2 = forward_transform(R, f, duals);
        double err = 0;
        for (std::size_t k = 0; k < duals.size(); ++k) err = std::max(err, (c2.blocks[k] - c.blocks[k]).norm());
        EXPECT_LT(err, 1e-10);
        EXPECT_NEAR(plancherel_norm(c), quadrature_l2(R, f), 1e-10 * plancherel_norm(c));
    }
}

TEST(Transform, RealTorusFunctionIsConjugateSymmetric) {
    auto g = GroupDescriptor::torus(1);
    auto R = haar_quadrature(g, 6);
    auto f = sample(R, [](const GroupPoint& x) { return cd(std::cos(x.c[0]) + 0.3 * std::sin(3 * x.c[0]), 0); });
    auto duals = enumerate_dual(g, 6);
    auto c = forward_transform(R, f, duals);
    for (std::size_t k = 0; k < duals.size(); ++k)
        for (std::size_t k2 = 0; k2 < duals.size(); ++k2)
            if (duals[k2].k[0] == -duals[k].k[0])
                EXPECT_LT(std::abs(c.blocks[k2](0, 0) - std::conj(c.blocks[k](0, 0))), 1e-14);
}

TEST(Transform, PlancherelMonotoneInCutoff) {
    auto g = GroupDescriptor::su2();
    auto R = haar_quadrature(g, 4);
    auto all = enumerate_dual(g, su2_cutoff(4));
    auto c = random_coeffs(g, all, 4);
    auto f = inverse_transform(c, R);
    double prev = 0;
    for (double l = 0; l <= 4; l += 0.5) {
        const double n = plancherel_norm(forward_transform(R, f, enumerate_dual(g, su2_cutoff(l))));
        EXPECT_GE(n, prev - 1e-14);
        prev = n;
    }
}

TEST(Layout, BasisRoundTrip) {
    auto g = GroupDescriptor::su2();
    auto duals = enumerate_dual(g, su2_cutoff(2));
    BasisLayout L(duals);
    auto c = random_coeffs(g, duals, 9);
    auto u = c.to_basis(L);
    EXPECT_NEAR(u.norm(), plancherel_norm(c), 1e-12);
    auto c2 = FourierCoefficients::from_basis(g, L, u);
    for (std::size_t k = 0; k < duals.size(); ++k) EXPECT_LT((c2.blocks[k] - c.blocks[k]).norm(), 1e-15);
}
