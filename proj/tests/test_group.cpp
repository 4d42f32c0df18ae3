#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "garding/errors.hpp"
#include "garding/group.hpp"
#include "garding/harmonic.hpp"

using namespace garding;

namespace {

GroupPoint random_su2(std::mt19937& rng) {
    std::uniform_real_distribution<double> U(0, 1);
    return GroupPoint{{2 * M_PI * U(rng), std::acos(1 - 2 * U(rng)), 4 * M_PI * U(rng)}};
}

// Quaternion embedding of exp(-i Y.sigma/2), computed without the library.
Eigen::Vector4d quat(const Eigen::Vector3d& y) {
    const double th = y.norm();
    const double s = th > 0 ? std::sin(th / 2) / th : 0.5;
    return {std::cos(th / 2), s * y[0], s * y[1], s * y[2]};
}

}  // namespace

TEST(Dual, EnumerationExamples) {
    auto t1 = enumerate_dual(GroupDescriptor::torus(1), std::sqrt(2.0));
    ASSERT_EQ(t1.size(), 3u);
    EXPECT_EQ(t1[0].k[0], 0);
    EXPECT_EQ(t1[1].k[0], -1);
    EXPECT_EQ(t1[2].k[0], 1);
    auto s = enumerate_dual(GroupDescriptor::su2(), 2.0);
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s[2].two_l, 2);
    EXPECT_EQ(enumerate_dual(GroupDescriptor::torus(2), std::sqrt(2.0)).size(), 5u);
    int total = 0;
    for (const auto& d : enumerate_dual(GroupDescriptor::su2(), su2_cutoff(7))) total += d.dim() * d.dim();
    EXPECT_EQ(total, 1240);
    EXPECT_THROW(enumerate_dual(GroupDescriptor::torus(1), 0.5), ConfigError);
}

TEST(Dual, Descriptors) {
    auto g = GroupDescriptor::su2();
    EXPECT_EQ(g.step, 2);
    EXPECT_EQ(g.hausdorff_dim, 4);
    auto t = GroupDescriptor::torus(3);
    EXPECT_EQ(t.step, 1);
    EXPECT_EQ(t.hausdorff_dim, 3);
    EXPECT_DOUBLE_EQ(DualIndex::spin(3).lambda(), 1.5 * 2.5);
    EXPECT_DOUBLE_EQ(DualIndex::torus({2, -1}).weight(), std::sqrt(6.0));
}

TEST(Rep, TorusAndIdentity) {
    auto g = GroupDescriptor::torus(1);
    auto M = rep_matrix(g, DualIndex::torus({2}), GroupPoint{{M_PI / 2}});
    EXPECT_NEAR(std::abs(M(0, 0) - cd(-1, 0)), 0, 1e-15);
    auto s = GroupDescriptor::su2();
    for (int tl = 0; tl < 8; ++tl) {
        auto D = rep_matrix(s, DualIndex::spin(tl), identity(s));
        EXPECT_LT((D - Eigen::MatrixXcd::Identity(tl + 1, tl + 1)).norm(), 1e-14);
    }
}

TEST(Rep, UnitaryAndHomomorphism) {
    auto g = GroupDescriptor::su2();
    std::mt19937 rng(3);
    for (int rep = 0; rep < 20; ++rep) {
        auto x = random_su2(rng), y = random_su2(rng);
        auto xy = multiply(g, x, y);
        for (int tl : {1, 2, 5, 10, 15}) {
            auto X = rep_matrix(g, DualIndex::spin(tl), x);
            auto Y = rep_matrix(g, DualIndex::spin(tl), y);
            auto XY = rep_matrix(g, DualIndex::spin(tl), xy);
            const int d = tl + 1;
            EXPECT_LT((X * X.adjoint() - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff(), 1e-12);
            EXPECT_LT((XY - X * Y).cwiseAbs().maxCoeff(), 1e-10);
            if (tl == 1) EXPECT_NEAR(std::abs(X.determinant()), 1.0, 1e-13);
        }
        auto xi = inverse(g, x);
        auto e = multiply(g, x, xi);
        EXPECT_LT((rep_matrix(g, DualIndex::spin(3), e) - Eigen::MatrixXcd::Identity(4, 4)).norm(), 1e-12);
    }
}

TEST(Rep, SpinHalfIsDefiningRepReordered) {
    std::mt19937 rng(11);
    auto x = random_su2(rng);
    auto D = rep_matrix(GroupDescriptor::su2(), DualIndex::spin(1), x);
    auto U = su2_matrix(x);
    // ascending m puts spin down first
    EXPECT_LT(std::abs(D(0, 0) - U(1, 1)), 1e-14);
    EXPECT_LT(std::abs(D(0, 1) - U(1, 0)), 1e-14);
    EXPECT_LT(std::abs(D(1, 0) - U(0, 1)), 1e-14);
}

TEST(ExpLog, RoundTrips) {
    auto t = GroupDescriptor::torus(1);
    auto p = exp_map(t, LieAlgebraVector{{3 * M_PI / 2}});
    EXPECT_NEAR(p.c[0], 3 * M_PI / 2, 1e-15);
    EXPECT_NEAR(log_map(t, p).c[0], -M_PI / 2, 1e-15);
    auto g = GroupDescriptor::su2();
    EXPECT_NEAR(log_map(g, exp_map(g, LieAlgebraVector{{0, 0, 0}})).central_norm(), 0, 1e-15);
    std::mt19937 rng(5);
    std::normal_distribution<double> N(0, 1);
    for (int rep = 0; rep < 50; ++rep) {
        Eigen::Vector3d y(N(rng), N(rng), N(rng));
        y *= (0.01 + 6.0 * (rep / 50.0)) / y.norm();
        LieAlgebraVector Y{{y[0], y[1], y[2]}};
        auto back = log_map(g, exp_map(g, Y));
        for (int i = 0; i < 3; ++i) EXPECT_NEAR(back.c[i], Y.c[i], 1e-12);
    }
    // -I is outside the ball
    EXPECT_THROW(log_map(g, exp_map(g, LieAlgebraVector{{2 * M_PI, 0, 0}})), DomainError);
}

TEST(ExpLog, CentralNormIsAdjointInvariant) {
    auto g = GroupDescriptor::su2();
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int rep = 0; rep < 10; ++rep) {
        LieAlgebraVector Y{{U(rng), U(rng), U(rng)}};
        GroupPoint u{{1.0 + rep, 0.3 * rep, 2.0}};
        auto conj = multiply(g, multiply(g, u, exp_map(g, Y)), inverse(g, u));
        EXPECT_NEAR(log_map(g, conj).central_norm(), Y.central_norm(), 1e-12);
    }
}

TEST(Density, FiniteDifferenceJacobian) {
    auto g = GroupDescriptor::su2();
    auto vol = [](const Eigen::Vector3d& y) {
        const double h = 1e-5;
        Eigen::Matrix<double, 4, 3> J;
        for (int j = 0; j < 3; ++j) {
            Eigen::Vector3d e = Eigen::Vector3d::Zero();
            e[j] = h;
            J.col(j) = (quat(y + e) - quat(y - e)) / (2 * h);
        }
        return std::sqrt((J.transpose() * J).determinant());
    };
    const double v0 = vol(Eigen::Vector3d::Zero());
    EXPECT_NEAR(v0, 0.125, 1e-9);
    for (double th : {0.3, 1.0, 2.2, 4.0, 5.5}) {
        Eigen::Vector3d y(0.3, -0.5, 0.8);
        y *= th / y.norm();
        const double fd = vol(y) / v0;
        LieAlgebraVector Y{{y[0], y[1], y[2]}};
        EXPECT_NEAR(exp_jacobian(g, Y) / fd, 1.0, 1e-6);
        EXPECT_NEAR(haar_density(g, Y) / fd, 1.0, 1e-6);
    }
    EXPECT_DOUBLE_EQ(haar_density(g, LieAlgebraVector{{0, 0, 0}}), 1.0);
    EXPECT_DOUBLE_EQ(exp_jacobian(GroupDescriptor::torus(2), LieAlgebraVector{{1, 2}}), 1.0);
}

TEST(Quadrature, WeightsAndOrthogonality) {
    auto t = haar_quadrature(GroupDescriptor::torus(1), 4);
    EXPECT_GE(t.size(), 9u);
    double s = 0;
    for (double w : t.weights) s += w;
    EXPECT_NEAR(s, 1.0, 1e-14);

    auto g = GroupDescriptor::su2();
    for (double D : {2.0, 3.5, 7.0}) {
        auto R = haar_quadrature(g, D);
        long double ls = 0;
        for (double w : R.weights) ls += w;
        EXPECT_NEAR(double(ls), 1.0, 1e-14);
        auto duals = enumerate_dual(g, su2_cutoff(D));
        BasisLayout L(duals);
        // Gram matrix column by column: synthesize e_q on the grid, analyse by quadrature.
        Eigen::MatrixXcd G(L.size, L.size);
        for (int q = 0; q < L.size; ++q) {
            Eigen::VectorXcd u = Eigen::VectorXcd::Zero(L.size);
            u[q] = 1;
            auto f = inverse_transform(FourierCoefficients::from_basis(g, L, u), R);
            G.col(q) = forward_transform(R, f, duals).to_basis(L);
        }
        EXPECT_LT((G - Eigen::MatrixXcd::Identity(L.size, L.size)).cwiseAbs().maxCoeff(), 1e-12) << D;
    }
}

TEST(Derivative, OneParameterSubgroupOracle) {
    auto g = GroupDescriptor::su2();
    auto R = haar_quadrature(g, 1.5);
    for (int j = 0; j < 3; ++j)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                auto f = sample(R, [&](const GroupPoint& x) { return rep_matrix(g, DualIndex::spin(1), x)(a, b); });
                auto df = left_derivative(R, j, f);
                double err = 0;
                for (std::size_t t = 0; t < R.size(); t += 7) {
                    const double h = 1e-5;
                    LieAlgebraVector Y{{0, 0, 0}};
                    Y.c[j] = h;
                    auto xp = multiply(g, R.nodes[t], exp_map(g, Y));
                    Y.c[j] = -h;
                    auto xm = multiply(g, R.nodes[t], exp_map(g, Y));
                    const cd fd = (rep_matrix(g, DualIndex::spin(1), xp)(a, b) -
                                   rep_matrix(g, DualIndex::spin(1), xm)(a, b)) /
                                  (2 * h);
                    err = std::max(err, std::abs(fd - df[t]));
                }
                EXPECT_LT(err, 1e-8);
            }
    auto t = haar_quadrature(GroupDescriptor::torus(1), 5);
    auto f = sample(t, [](const GroupPoint& x) { return std::polar(1.0, 3 * x.c[0]); });
    auto df = left_derivative(t, 0, f);
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_LT(std::abs(df[i] - cd(0, 3) * f[i]), 1e-12);
    auto c = sample(t, [](const GroupPoint&) { return cd(2, 0); });
    EXPECT_LT(left_derivative(t, 0, c).cwiseAbs().maxCoeff(), 1e-13);
    auto bad = sample(t, [](const GroupPoint& x) { return std::polar(1.0, 9 * x.c[0]); });
    EXPECT_THROW(left_derivative(t, 0, bad), AliasingError);
}

TEST(Spectrum, LaplacianOnCoefficients) {
    auto g = GroupDescriptor::su2();
    auto R = haar_quadrature(g, 3);
    for (int tl : {1, 2, 4, 6}) {
        const double lam = 0.25 * tl * (tl + 2);
        auto f = sample(R, [&](const GroupPoint& x) { return rep_matrix(g, DualIndex::spin(tl), x)(0, tl / 2); });
        Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(R.size());
        for (int j = 0; j < 3; ++j) acc -= left_derivative(R, j, left_derivative(R, j, f));
        EXPECT_LT((acc - lam * f).cwiseAbs().maxCoeff(), 1e-8);
    }
}

TEST(Quadrature, BruteForceGramSmallDegree) {
    auto g = GroupDescriptor::su2();
    auto R = haar_quadrature(g, 2);
    auto duals = enumerate_dual(g, su2_cutoff(2));
    BasisLayout L(duals);
    Eigen::MatrixXcd E(R.size(), L.size);
    for (std::size_t t = 0; t < R.size(); ++t)
        for (std::size_t k = 0; k < duals.size(); ++k) {
            auto M = rep_matrix(g, duals[k], R.nodes[t]);
            const int d = duals[k].dim();
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) E(t, L.index(int(k), i, j)) = std::sqrt(R.weights[t] * d) * M(i, j);
        }
    const Eigen::MatrixXcd G = E.adjoint() * E;
    EXPECT_LT((G - Eigen::MatrixXcd::Identity(L.size, L.size)).cwiseAbs().maxCoeff(), 1e-12);
}
