#include <gtest/gtest.h>

#include <cmath>

#include "garding/errors.hpp"
#include "garding/garding.hpp"

using namespace garding;

namespace {

const ExponentRow& row(const std::vector<ExponentRow>& t, const std::string& route) {
    for (const auto& r : t)
        if (r.route == route) return r;
    throw std::runtime_error("missing route " + route);
}

int strongest_count(const std::vector<ExponentRow>& t) {
    int n = 0;
    for (const auto& r : t) n += r.strongest;
    return n;
}

Symbol torus_symbol(const std::string& name) {
    for (auto& s : nonnegative_suite(GroupDescriptor::torus(1)))
        if (s.name == name) return s;
    throw std::runtime_error("no suite symbol " + name);
}

}  // namespace

TEST(Exponents, SubellipticTheoremBeatsEllipticRoute) {
    const auto t = exponent_table({1, 1, 0, 2});
    EXPECT_NEAR(row(t, "theorem").index, 0.25, 1e-15);
    EXPECT_TRUE(row(t, "theorem").applicable);
    EXPECT_TRUE(row(t, "theorem").strongest);
    EXPECT_NEAR(row(t, "consequence 1").index, 0.75, 1e-15);
    EXPECT_TRUE(row(t, "consequence 1").applicable);
    EXPECT_FALSE(row(t, "consequence 2").applicable);
    EXPECT_FALSE(row(t, "consequence 3").applicable);
    EXPECT_FALSE(row(t, "conjecture").proved);
    EXPECT_NEAR(row(t, "conjecture").index, 0.0, 1e-15);
    EXPECT_EQ(strongest_count(t), 1);
}

TEST(Exponents, KappaOneRoutesCoincide) {
    for (auto p : {SymbolClassParams{2, 1, 0, 1}, SymbolClassParams{1, 0.5, 0.25, 1}, SymbolClassParams{0.3, 1, 0, 1}}) {
        const auto t = exponent_table(p);
        const double corollary = 0.5 * (p.m - (p.rho - p.delta));
        for (const auto& r : t)
            if (r.applicable) EXPECT_NEAR(r.index, corollary, 1e-15) << r.route;
        EXPECT_TRUE(row(t, "theorem").strongest);
    }
}

TEST(Exponents, SmallOrderCase) {
    // 0 < m <= rho/kappa - delta
    const auto t = exponent_table({0.4, 1, 0, 2});
    EXPECT_NEAR(row(t, "theorem").index, -0.05, 1e-15);
    EXPECT_NEAR(row(t, "consequence 2").index, -0.05, 1e-15);
    EXPECT_TRUE(row(t, "consequence 2").applicable);
    EXPECT_FALSE(row(t, "consequence 1").applicable);
    EXPECT_TRUE(row(t, "theorem").strongest);
    const auto neg = exponent_table({-1, 1, 0, 2});
    EXPECT_TRUE(row(neg, "consequence 3").applicable);
    EXPECT_NEAR(row(neg, "consequence 3").index, -0.5, 1e-15);
    EXPECT_NEAR(row(neg, "theorem").index, -0.75, 1e-15);
}

TEST(Exponents, RejectsOutOfRange) {
    EXPECT_THROW(exponent_table({1, 0.5, 0.5, 1}), ConfigError);
    EXPECT_THROW(exponent_table({1, 1.5, 0, 1}), ConfigError);
}

TEST(Garding, CutoffDegrees) {
    EXPECT_DOUBLE_EQ(cutoff_for_degree(GroupDescriptor::torus(1), 12), std::sqrt(145.0));
    EXPECT_DOUBLE_EQ(cutoff_for_degree(GroupDescriptor::su2(), 3), std::sqrt(13.0));
    EXPECT_THROW(cutoff_for_degree(GroupDescriptor::su2(), -1), ConfigError);
}

TEST(Garding, MultiplierHasZeroConstant) {
    const Symbol a = torus_symbol("<xi>");
    const auto rep = garding_verify(a, a.params, {12, 18, 24, 32});
    EXPECT_EQ(rep.verdict(), "PASS");
    EXPECT_EQ(rep.C_estimate, 0.0);
    for (const auto& r : rep.rows) EXPECT_GE(r.lambda_min, 0.0);
    EXPECT_NEAR(rep.s, 0.0, 1e-15);
}

TEST(Garding, CorollaryModeTorus) {
    for (auto [rho, delta] : {std::pair{1.0, 0.0}, std::pair{0.5, 0.25}})
        for (double m : {1.0, 2.0}) {
            const Symbol a = torus_symbol(m == 1 ? "(1+cos x)/2 <xi>" : "(1+cos x)/2 <xi>^2");
            const SymbolClassParams p{m, rho, delta, 1};
            const auto rep = garding_verify(a, p, {12, 18, 24, 32});
            EXPECT_NEAR(rep.s, 0.5 * (m - (rho - delta)), 1e-15);
            ASSERT_EQ(rep.rows.size(), 4u);
            EXPECT_TRUE(rep.pass()) << m << " " << rho << " " << rep.rows.back().lambda_min;
            EXPECT_GE(rep.C_estimate, 0.0);
            EXPECT_LT(rep.C_estimate, 10.0);
        }
}

TEST(Garding, ScaleConsistency) {
    const Symbol a = torus_symbol("(1+cos x)/2 <xi>^2");
    const auto r1 = garding_verify(a, a.params, {12, 18, 24, 32});
    const auto r3 = garding_verify(a * 3.0, a.params, {12, 18, 24, 32});
    ASSERT_EQ(r1.rows.size(), r3.rows.size());
    for (std::size_t i = 0; i < r1.rows.size(); ++i)
        EXPECT_NEAR(r3.rows[i].lambda_min, 3 * r1.rows[i].lambda_min, 1e-12 * (1 + std::abs(r1.rows[i].lambda_min)));
    EXPECT_NEAR(r3.C_estimate, 3 * r1.C_estimate, 1e-12 * (1 + r1.C_estimate));
    EXPECT_EQ(r1.verdict(), r3.verdict());
}

TEST(Garding, TheoremModeSu2) {
    const Symbol a = weighted_laplacian_symbol();
    const auto rep = garding_verify(a, a.params, {3, 5, 7});
    EXPECT_NEAR(rep.theta, 0.5, 1e-15);
    EXPECT_NEAR(rep.s, 0.75, 1e-15);
    EXPECT_TRUE(rep.pass()) << rep.rows.back().lambda_min;
    EXPECT_THROW(garding_verify(a, {2, 1, 0.4, 2}, {3, 5, 7}), ConfigError);  // delta >= rho / (2 kappa - 1)
}

TEST(Garding, ControlIsRejectedAndDiverges) {
    const Symbol c = sign_changing_control();
    const auto rep = garding_verify(c, c.params, {8, 16, 32});
    EXPECT_TRUE(rep.rejected);
    EXPECT_EQ(rep.verdict(), "REJECTED");
    EXPECT_EQ(rep.rejection, "nonnegativity scan failed");
    EXPECT_LT(rep.witness.min_eig, 0.0);

    const auto probe = sharpness_probe(c, c.params, {0.5}, {8, 16, 32});
    ASSERT_EQ(probe.size(), 1u);  // kappa = 1: theorem and conjectured indices coincide
    EXPECT_EQ(probe[0].label, "theorem");
    EXPECT_TRUE(probe[0].divergent);
    EXPECT_FALSE(probe[0].bounded);
    EXPECT_LE(probe[0].rows.back().lambda_min, 2 * probe[0].rows.front().lambda_min);
}

TEST(Garding, ProbeLabelsSu2) {
    const Symbol a = weighted_laplacian_symbol();
    const auto probe = sharpness_probe(a, a.params, {1.0}, {3, 5, 7});
    ASSERT_EQ(probe.size(), 3u);
    EXPECT_EQ(probe[0].label, "extra");
    EXPECT_EQ(probe[1].label, "theorem");
    EXPECT_EQ(probe[2].label, "conjectured");
    EXPECT_NEAR(probe[2].s, 0.5, 1e-15);
    EXPECT_TRUE(probe[2].bounded);
}

TEST(Remainder, ConstantSymbolDiagonalVanishes) {
    for (const auto& g : {GroupDescriptor::torus(1), GroupDescriptor::su2()}) {
        const bool su2 = g.kind == GroupKind::SU2;
        const Symbol a = nonnegative_suite(g)[0] * 2.0;
        const auto w = build_weight(g, 1, 0, su2 ? 2 : 1);
        const auto rep = remainder_bounds(a, w, a.params, su2 ? std::vector<double>{1, 2, 3} : std::vector<double>{12, 18, 24});
        for (const auto& r : rep.rows) EXPECT_LE(r.diagonal, 1e-6) << g.name();
        EXPECT_TRUE(rep.pass) << g.name() << " " << rep.total_variation;
    }
}

TEST(Remainder, TorusStable) {
    const Symbol a = torus_symbol("(1+cos x)/2 <xi>");
    const auto w = build_weight(a.group, 1, 0, 1);
    const auto rep = remainder_bounds(a, w, a.params, {12, 18, 24});
    EXPECT_TRUE(rep.pass) << rep.total_variation << " " << rep.diagonal_variation;
    EXPECT_NEAR(rep.s, 0.0, 1e-15);
    EXPECT_FALSE(rep.friedrichs.capped);
}
