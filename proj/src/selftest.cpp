#include "garding/selftest.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>

#include "garding/errors.hpp"

namespace garding {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double weight_of(const GroupDescriptor& g, double degree) {
    // enumerate_dual takes <xi>; pad so that boundary shells are kept
    const double w = g.kind == GroupKind::SU2 ? su2_cutoff(degree) : std::sqrt(1.0 + degree * degree);
    return w * (1 + 1e-12);
}

Eigen::MatrixXcd scalar(const DualIndex& xi, cd v) { return Eigen::MatrixXcd::Identity(xi.dim(), xi.dim()) * v; }

// Richardson-extrapolated central difference of xi(exp(t X_j)) at t = 0.
Eigen::MatrixXcd fd_generator(const GroupDescriptor& g, const DualIndex& xi, int j) {
    auto central = [&](double h) {
        LieAlgebraVector Y{std::vector<double>(g.algebra_dim(), 0.0)};
        Y.c[j] = h;
        const Eigen::MatrixXcd p = rep_matrix(g, xi, exp_map(g, Y));
        Y.c[j] = -h;
        const Eigen::MatrixXcd m = rep_matrix(g, xi, exp_map(g, Y));
        return Eigen::MatrixXcd((p - m) / (2 * h));
    };
    const double h = 1e-3;
    return (4.0 * central(h / 2) - central(h)) / 3.0;
}

// sum_s w_s conj(e_p(x_s)) e_q(x_s) over every node.
Eigen::MatrixXcd dense_gram(const QuadratureRule& rule, const BasisLayout& L) {
    const GroupDescriptor& g = rule.group;
    Eigen::MatrixXcd E(rule.size(), L.size);
    for (std::size_t s = 0; s < rule.size(); ++s) {
        const double sw = std::sqrt(rule.weights[s]);
        for (std::size_t k = 0; k < L.duals.size(); ++k) {
            const Eigen::MatrixXcd R = rep_matrix(g, L.duals[k], rule.nodes[s]);
            const int d = L.duals[k].dim();
            const double sd = std::sqrt(double(d));
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) E(s, L.index(int(k), i, j)) = sw * sd * R(i, j);
        }
    }
    return E.adjoint() * E;
}

// Same sum on the Euler tensor grid, carried out axis by axis: the alpha and gamma
// sums of the phases are taken over the rule's own nodes, the beta sum over d^l.
Eigen::MatrixXcd su2_gram(const QuadratureRule& rule, const BasisLayout& L) {
    const int nb = rule.shape[0], na = rule.shape[1], ng = rule.shape[2];
    std::vector<double> alpha(na), gamma(ng);
    for (int a = 0; a < na; ++a) alpha[a] = rule.nodes[std::size_t(a) * ng].c[0];
    for (int c = 0; c < ng; ++c) gamma[c] = rule.nodes[c].c[2];
    const int two_L = L.max_two_l();
    // phase sums indexed by the doubled difference of m values
    auto phase_sum = [&](const std::vector<double>& ang) {
        std::vector<cd> out(4 * two_L + 1);
        for (int t = -2 * two_L; t <= 2 * two_L; ++t) {
            cd acc = 0;
            for (double x : ang) acc += std::polar(1.0, 0.5 * t * x);
            out[t + 2 * two_L] = acc / double(ang.size());
        }
        return out;
    };
    const auto Sa = phase_sum(alpha), Sg = phase_sum(gamma);
    // rows: basis index, columns: beta node
    Eigen::MatrixXd Dv(L.size, nb);
    std::vector<int> tm(L.size), tn(L.size);
    for (int b = 0; b < nb; ++b) {
        const double sw = std::sqrt(rule.beta_w[b]);
        for (std::size_t k = 0; k < L.duals.size(); ++k) {
            const DualIndex& xi = L.duals[k];
            const Eigen::MatrixXcd R = rep_matrix(rule.group, xi, GroupPoint{{0.0, rule.beta[b], 0.0}});
            const int d = xi.dim();
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    const int p = L.index(int(k), i, j);
                    Dv(p, b) = sw * std::sqrt(double(d)) * R(i, j).real();
                    tm[p] = 2 * i - xi.two_l;
                    tn[p] = 2 * j - xi.two_l;
                }
        }
    }
    const Eigen::MatrixXd B = Dv * Dv.transpose();
    Eigen::MatrixXcd G(L.size, L.size);
    for (int q = 0; q < L.size; ++q)
        for (int p = 0; p < L.size; ++p)
            G(p, q) = B(p, q) * Sa[tm[p] - tm[q] + 2 * two_L] * Sg[tn[p] - tn[q] + 2 * two_L];
    return G;
}

CheckResult finish(CheckResult r, Clock::time_point t0) {
    r.pass = std::isfinite(r.value) && r.value <= r.tol;
    r.seconds = seconds_since(t0);
    return r;
}

}  // namespace

double default_selftest_degree(const GroupDescriptor& g) {
    if (g.kind == GroupKind::SU2) return 7;
    return g.n == 1 ? 32 : (g.n == 2 ? 12 : 5);
}

double gram_quadrature_degree(const GroupDescriptor& g, double degree) {
    return g.kind == GroupKind::SU2 ? std::max(1.0, degree) : std::max(1.0, std::ceil(0.5 * degree));
}

CheckResult peter_weyl_check(const GroupDescriptor& g, double degree, double quad_degree) {
    const auto t0 = Clock::now();
    const double need = gram_quadrature_degree(g, degree);
    if (quad_degree < need - 1e-12)
        throw AliasingError(fmt::format("quadrature degree {:g} cannot integrate products of modes up to degree {:g} (needs {:g})",
                                        quad_degree, degree, need));
    const QuadratureRule rule = haar_quadrature(g, quad_degree);
    const BasisLayout L(enumerate_dual(g, weight_of(g, degree)));
    const Eigen::MatrixXcd G = g.kind == GroupKind::SU2 ? su2_gram(rule, L) : dense_gram(rule, L);
    CheckResult r;
    r.name = "peter-weyl orthogonality";
    r.value = (G - Eigen::MatrixXcd::Identity(L.size, L.size)).cwiseAbs().maxCoeff();
    r.tol = 1e-12;
    r.detail = std::to_string(L.size) + " basis functions, " + std::to_string(rule.size()) + " nodes";
    return finish(r, t0);
}

std::vector<CheckResult> round_trip_checks(const GroupDescriptor& g, double degree, double quad_degree, unsigned seed) {
    const auto t0 = Clock::now();
    const double need = gram_quadrature_degree(g, degree);
    if (quad_degree < need - 1e-12)
        throw AliasingError(fmt::format("quadrature degree {:g} cannot resolve modes up to degree {:g}", quad_degree, degree));
    const QuadratureRule rule = haar_quadrature(g, quad_degree);
    const auto duals = enumerate_dual(g, weight_of(g, degree));
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
    const GridFunction f = inverse_transform(c, rule);
    const FourierCoefficients back = forward_transform(rule, f, duals);
    double err = 0, mag = 0;
    for (std::size_t k = 0; k < duals.size(); ++k) {
        err = std::max(err, (back.blocks[k] - c.blocks[k]).cwiseAbs().maxCoeff());
        mag = std::max(mag, c.blocks[k].cwiseAbs().maxCoeff());
    }
    const double secs = seconds_since(t0);
    CheckResult rt;
    rt.name = "fourier round trip";
    rt.value = err / mag;
    rt.tol = 1e-10;
    rt.detail = std::to_string(duals.size()) + " duals";
    rt.pass = rt.value <= rt.tol;
    rt.seconds = secs;
    const double pn = plancherel_norm(c), qn = quadrature_l2(rule, f);
    CheckResult pv;
    pv.name = "parseval";
    pv.value = std::abs(pn - qn) / pn;
    pv.tol = 1e-10;
    pv.pass = pv.value <= pv.tol;
    pv.detail = "relative difference of coefficient and grid norms";
    return {rt, pv};
}

CheckResult laplacian_spectrum_check(const GroupDescriptor& g, double degree) {
    const auto t0 = Clock::now();
    const QuadratureRule rule = haar_quadrature(g, degree);
    const auto duals = enumerate_dual(g, weight_of(g, degree));
    double worst = 0;
    std::string at;
    for (const auto& xi : duals) {
        const int mid = xi.dim() / 2;
        const GridFunction f = sample(rule, [&](const GroupPoint& x) { return rep_matrix(g, xi, x)(0, mid); });
        GridFunction lf = GridFunction::Zero(rule.size());
        for (int j = 0; j < g.algebra_dim(); ++j) lf -= left_derivative(rule, j, left_derivative(rule, j, f));
        const double lam = g.kind == GroupKind::SU2 ? 0.25 * xi.two_l * (xi.two_l + 2) : double(xi.lambda4()) / 4;
        // Rayleigh quotient on the grid
        cd num = 0, den = 0;
        for (std::size_t s = 0; s < rule.size(); ++s) {
            num += rule.weights[s] * std::conj(f[s]) * lf[s];
            den += rule.weights[s] * std::norm(f[s]);
        }
        const double est = (num / den).real();
        const double resid = (lf - lam * f).cwiseAbs().maxCoeff() / f.cwiseAbs().maxCoeff();
        const double e = std::max(std::abs(est - lam), resid) / std::max(1.0, lam);
        if (e > worst) {
            worst = e;
            at = xi.label();
        }
    }
    CheckResult r;
    r.name = "laplacian spectrum";
    r.value = worst;
    r.tol = 1e-8;
    r.detail = std::to_string(duals.size()) + " duals, worst at " + (at.empty() ? std::string("-") : at);
    return finish(r, t0);
}

CheckResult sublaplacian_check(int two_lmax) {
    const auto t0 = Clock::now();
    const auto g = GroupDescriptor::su2();
    double worst = 0;
    for (int tl = 0; tl <= two_lmax; ++tl) {
        const DualIndex xi = DualIndex::spin(tl);
        Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(xi.dim(), xi.dim());
        for (int j : g.fields) {
            const Eigen::MatrixXcd X = fd_generator(g, xi, j);
            L -= X * X;
        }
        const SubellipticWeight w = sublaplacian_symbol(g, xi);
        for (int i = 0; i <= tl; ++i) {
            const double l = 0.5 * tl, m = 0.5 * (2 * i - tl);
            worst = std::max(worst, std::abs(w.nu2[i] - (l * (l + 1) - m * m)));
            worst = std::max(worst, std::abs(L(i, i).real() - w.nu2[i]));
        }
        L.diagonal().setZero();
        worst = std::max(worst, L.cwiseAbs().maxCoeff());
    }
    CheckResult r;
    r.name = "sub-laplacian spectrum";
    r.value = worst;
    r.tol = 1e-8;
    r.detail = fmt::format("l <= {:g}", 0.5 * two_lmax);
    return finish(r, t0);
}

Symbol random_torus_symbol(std::mt19937& rng) {
    const auto g = GroupDescriptor::torus(1);
    std::uniform_real_distribution<double> U(-1, 1);
    Symbol s;
    bool first = true;
    for (int k = -3; k <= 3; ++k) {
        const cd c(U(rng), U(rng));
        const double f = 0.5 * U(rng), ph = 3 * U(rng), p = U(rng);
        const XFunction e{g, {{XMode{DualIndex::torus({k}), 0, 0}, c}}};
        Symbol t = Symbol::product(
            e, [f, ph, p](const DualIndex& xi) { return scalar(xi, std::cos(f * xi.k[0] + ph) + p * xi.weight() / 10); },
            "random");
        s = first ? t : s + t;
        first = false;
    }
    s.name = "random";
    return s;
}

CheckResult leibniz_random_check(int pairs, unsigned seed) {
    const auto t0 = Clock::now();
    std::mt19937 rng(seed);
    const auto g = GroupDescriptor::torus(1);
    const QuadratureRule rule = haar_quadrature(g, 7);
    const auto duals = enumerate_dual(g, 24);
    double worst = 0;
    for (int t = 0; t < pairs; ++t) {
        const Symbol a = random_torus_symbol(rng), b = random_torus_symbol(rng);
        worst = std::max(worst, leibniz_check(a, b, duals, rule).residual);
    }
    CheckResult r;
    r.name = "leibniz (torus)";
    r.value = worst;
    r.tol = 1e-12;
    r.detail = std::to_string(pairs) + " random pairs";
    return finish(r, t0);
}

CheckResult weight_comparison_run(const GroupDescriptor& g, double degree) {
    const auto t0 = Clock::now();
    const WeightComparison w = weight_comparison_check(g, enumerate_dual(g, weight_of(g, degree)));
    CheckResult r;
    r.name = "weight comparison";
    r.value = w.c2;
    r.tol = INFINITY;
    r.detail = fmt::format("c = {:.6g}, c' = {:.6g}", w.c1, w.c2);
    r.seconds = seconds_since(t0);
    r.pass = w.pass && std::isfinite(w.c1) && std::isfinite(w.c2) && w.c1 > 0;
    return r;
}

std::vector<CheckResult> selftest_suite(const GroupDescriptor& g, double degree, double quad_degree, unsigned seed) {
    std::vector<CheckResult> out;
    out.push_back(peter_weyl_check(g, degree, quad_degree));
    for (auto& r : round_trip_checks(g, degree, quad_degree, seed)) out.push_back(r);
    out.push_back(laplacian_spectrum_check(g, degree));
    if (g.kind == GroupKind::SU2) out.push_back(sublaplacian_check(20));
    out.push_back(leibniz_random_check(20, seed));
    out.push_back(weight_comparison_run(g, g.kind == GroupKind::SU2 ? 10 : degree));
    return out;
}

}  // namespace garding
