#include <algorithm>
#include <cmath>
#include <map>

#include "garding/errors.hpp"
#include "garding/symbol.hpp"
#include "garding/wigner.hpp"

namespace garding {

namespace {

using Acc = std::map<XMode, Eigen::MatrixXcd>;

void accumulate(Acc& acc, const XMode& m, const Eigen::MatrixXcd& c) {
    auto it = acc.find(m);
    if (it == acc.end())
        acc.emplace(m, c);
    else
        it->second += c;
}

ModeExpansion flatten(Acc& acc) {
    ModeExpansion ex;
    for (auto& [m, c] : acc)
        if (c.cwiseAbs().maxCoeff() > 0) ex.push_back({m, std::move(c)});
    return ex;
}

XFunction spin_half_entry(int a, int b, cd c) {
    const auto g = GroupDescriptor::su2();
    return XFunction{g, {{XMode{DualIndex::spin(1), 2 * a - 1, 2 * b - 1}, c}}};
}

}  // namespace

std::vector<DifferenceOperator> difference_generators(const GroupDescriptor& g) {
    std::vector<DifferenceOperator> out;
    if (g.kind == GroupKind::Torus) {
        for (int j = 0; j < g.n; ++j) {
            std::vector<int> e(g.n, 0);
            e[j] = 1;
            XFunction q{g, {{XMode{DualIndex::torus(e), 0, 0}, 1.0}}};
            out.push_back({"q" + std::to_string(j + 1), q + XFunction::constant(g, -1.0)});
        }
        return out;
    }
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            XFunction q = spin_half_entry(a, b, 1.0);
            if (a == b) q = q + XFunction::constant(g, -1.0);
            out.push_back({"q" + std::to_string(a) + std::to_string(b), q});
        }
    return out;
}

std::vector<DifferenceOperator> odd_monomials(const GroupDescriptor& g) {
    std::vector<DifferenceOperator> out;
    if (g.kind == GroupKind::Torus) {
        for (int j = 0; j < g.n; ++j) {
            std::vector<int> e(g.n, 0), me(g.n, 0);
            e[j] = 1;
            me[j] = -1;
            // i sin x = (e^{ix} - e^{-ix}) / 2
            XFunction q{g, {{XMode{DualIndex::torus(e), 0, 0}, 0.5}, {XMode{DualIndex::torus(me), 0, 0}, -0.5}}};
            out.push_back({"odd" + std::to_string(j + 1), q});
        }
        return out;
    }
    // D_01 and D_10 change sign under inversion; D_00(x^-1) = conj D_00(x) = D_11(x).
    out.push_back({"re_d01", spin_half_entry(0, 1, 0.5) + spin_half_entry(1, 0, -0.5)});
    out.push_back({"im_d01", spin_half_entry(0, 1, cd(0, -0.5)) + spin_half_entry(1, 0, cd(0, -0.5))});
    out.push_back({"im_d00", spin_half_entry(0, 0, cd(0, -0.5)) + spin_half_entry(1, 1, cd(0, 0.5))});
    return out;
}

Symbol apply_difference(const Symbol& a, const DifferenceOperator& q) {
    Symbol s = a;
    s.name = "D[" + q.name + "](" + a.name + ")";
    s.provenance = "assembled";
    s.samples = nullptr;
    s.factors.clear();
    const GroupDescriptor g = a.group;
    s.modes = [inner = a.modes, q, g](const DualIndex& xi) {
        Acc acc;
        if (g.kind == GroupKind::Torus) {
            for (const auto& [m, c] : q.q.terms) {
                std::vector<int> k = xi.k;
                for (int i = 0; i < g.n; ++i) k[i] -= m.tau.k[i];
                for (const auto& t : inner(DualIndex::torus(k))) accumulate(acc, t.mode, c * t.coef);
            }
            return flatten(acc);
        }
        // Delta a(xi) = sum c (d_eta/d_xi) L a(eta) R with Clebsch-Gordan L, R
        std::map<int, ModeExpansion> cache;
        const int dx = xi.dim();
        for (const auto& [m, c] : q.q.terms) {
            const int tt = m.tau.two_l;
            for (int te = std::abs(xi.two_l - tt); te <= xi.two_l + tt; te += 2) {
                const int de = te + 1;
                Eigen::MatrixXd L = Eigen::MatrixXd::Zero(dx, de), R = Eigen::MatrixXd::Zero(de, dx);
                for (int i = 0; i < dx; ++i)
                    for (int v = 0; v < de; ++v) {
                        const int tmi = 2 * i - xi.two_l, tmv = 2 * v - te;
                        if (tmi == m.two_b + tmv) L(i, v) = clebsch_gordan(tt, m.two_b, te, tmv, xi.two_l, tmi);
                        if (tmi == m.two_a + tmv) R(v, i) = clebsch_gordan(tt, m.two_a, te, tmv, xi.two_l, tmi);
                    }
                if (L.cwiseAbs().maxCoeff() == 0 || R.cwiseAbs().maxCoeff() == 0) continue;
                auto it = cache.find(te);
                if (it == cache.end()) it = cache.emplace(te, inner(DualIndex::spin(te))).first;
                const cd f = c * double(de) / double(dx);
                for (const auto& t : it->second)
                    accumulate(acc, t.mode, f * (L.cast<cd>() * t.coef * R.cast<cd>()));
            }
        }
        return flatten(acc);
    };
    return s;
}

Symbol apply_differences(const Symbol& a, const std::vector<DifferenceOperator>& gens, const std::vector<int>& alpha) {
    Symbol s = a;
    for (std::size_t j = 0; j < alpha.size(); ++j)
        for (int r = 0; r < alpha[j]; ++r) s = apply_difference(s, gens.at(j));
    return s;
}

Symbol x_derivative(const Symbol& a, int j) {
    Symbol s = a;
    s.name = "X" + std::to_string(j + 1) + "(" + a.name + ")";
    s.provenance = "assembled";
    s.samples = nullptr;
    s.factors.clear();
    const GroupDescriptor g = a.group;
    s.modes = [inner = a.modes, g, j](const DualIndex& xi) {
        Acc acc;
        for (const auto& t : inner(xi)) {
            if (g.kind == GroupKind::Torus) {
                const int k = t.mode.tau.k.at(j);
                if (k != 0) accumulate(acc, t.mode, cd(0, k) * t.coef);
                continue;
            }
            const int tl = t.mode.tau.two_l;
            if (tl == 0) continue;
            const Eigen::MatrixXcd X = lie_rep(g, t.mode.tau, j);
            const int b = (t.mode.two_b + tl) / 2;
            for (int c = 0; c <= tl; ++c)
                if (X(c, b) != cd(0)) accumulate(acc, XMode{t.mode.tau, t.mode.two_a, 2 * c - tl}, X(c, b) * t.coef);
        }
        return flatten(acc);
    };
    return s;
}

Symbol x_derivative_symbol(const Symbol& a, const std::vector<int>& beta) {
    Symbol s = a;
    for (std::size_t j = 0; j < beta.size(); ++j)
        for (int r = 0; r < beta[j]; ++r) s = x_derivative(s, int(j));
    return s;
}

Symbol symbol_product(const Symbol& a1, const Symbol& a2) {
    Symbol s = a1;
    s.name = "(" + a1.name + ")(" + a2.name + ")";
    s.provenance = "assembled";
    s.samples = nullptr;
    s.factors.clear();
    s.x_band = a1.x_band + a2.x_band;
    const GroupDescriptor g = a1.group;
    s.modes = [f1 = a1.modes, f2 = a2.modes, g](const DualIndex& xi) {
        Acc acc;
        const auto e1 = f1(xi), e2 = f2(xi);
        for (const auto& t1 : e1)
            for (const auto& t2 : e2) {
                const Eigen::MatrixXcd c = t1.coef * t2.coef;
                if (g.kind == GroupKind::Torus) {
                    std::vector<int> k = t1.mode.tau.k;
                    for (int i = 0; i < g.n; ++i) k[i] += t2.mode.tau.k[i];
                    accumulate(acc, XMode{DualIndex::torus(k), 0, 0}, c);
                    continue;
                }
                const int j1 = t1.mode.tau.two_l, j2 = t2.mode.tau.two_l;
                const int A = t1.mode.two_a + t2.mode.two_a, B = t1.mode.two_b + t2.mode.two_b;
                for (int J = std::abs(j1 - j2); J <= j1 + j2; J += 2) {
                    if (std::abs(A) > J || std::abs(B) > J) continue;
                    const double w = clebsch_gordan(j1, t1.mode.two_a, j2, t2.mode.two_a, J, A) *
                                     clebsch_gordan(j1, t1.mode.two_b, j2, t2.mode.two_b, J, B);
                    if (w != 0) accumulate(acc, XMode{DualIndex::spin(J), A, B}, w * c);
                }
            }
        return flatten(acc);
    };
    return s;
}

LeibnizReport leibniz_check(const Symbol& a1, const Symbol& a2, const std::vector<DualIndex>& duals,
                            const QuadratureRule& rule) {
    if (a1.group.kind != GroupKind::Torus)
        throw ConfigError("the finite Leibniz identity is checked on the torus only");
    LeibnizReport r;
    const auto gens = difference_generators(a1.group);
    const Symbol prod = symbol_product(a1, a2);
    for (const auto& q : gens) {
        const Symbol lhs = apply_difference(prod, q);
        const Symbol d1 = apply_difference(a1, q), d2 = apply_difference(a2, q);
        for (const auto& xi : duals) {
            const auto L = lhs.values(rule.nodes, xi);
            const auto A1 = a1.values(rule.nodes, xi), A2 = a2.values(rule.nodes, xi);
            const auto D1 = d1.values(rule.nodes, xi), D2 = d2.values(rule.nodes, xi);
            for (std::size_t p = 0; p < rule.size(); ++p) {
                const double e = (L[p] - (D1[p] * A2[p] + A1[p] * D2[p] + D1[p] * D2[p])).cwiseAbs().maxCoeff();
                if (e > r.residual) {
                    r.residual = e;
                    r.witness = q.name + " at " + xi.label();
                }
            }
        }
    }
    return r;
}

namespace {

double mode_band(const ModeExpansion& ex) {
    double b = 0;
    for (const auto& t : ex) {
        if (t.mode.tau.kind == GroupKind::SU2)
            b = std::max(b, 0.5 * t.mode.tau.two_l);
        else
            for (int v : t.mode.tau.k) b = std::max(b, double(std::abs(v)));
    }
    return b;
}

const QuadratureRule& cached_grid(const GroupDescriptor& g, double band) {
    static std::map<std::pair<int, int>, QuadratureRule> cache;
    const double deg = std::max(1.0, std::ceil(2 * band) / 2);
    const auto key = std::make_pair(g.kind == GroupKind::Torus ? g.n : -1, int(std::lround(2 * deg)));
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, haar_quadrature(g, deg)).first;
    return it->second;
}

double opnorm(const Eigen::MatrixXcd& M) {
    if (M.size() == 1) return std::abs(M(0, 0));
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    return svd.singularValues()[0];
}

// sup over x of ||W b(x, xi)|| (or ||b W||), evaluated on a grid resolving b(., xi).
double sup_norm(const Symbol& b, const DualIndex& xi, const Eigen::MatrixXcd* W, Side side) {
    const ModeExpansion ex = b.modes(xi);
    if (ex.empty()) return 0.0;
    const QuadratureRule& R = cached_grid(b.group, mode_band(ex));
    double s = 0;
    for (const auto& x : R.nodes) {
        Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(xi.dim(), xi.dim());
        for (const auto& t : ex) v += eval_mode(b.group, t.mode, x) * t.coef;
        if (W) v = side == Side::Left ? Eigen::MatrixXcd(*W * v) : Eigen::MatrixXcd(v * *W);
        s = std::max(s, opnorm(v));
    }
    return s;
}

std::vector<std::pair<std::vector<int>, std::vector<int>>> multi_indices(int ngen, int nder, int max_order) {
    std::vector<std::pair<std::vector<int>, std::vector<int>>> out;
    const int tot = ngen + nder;
    std::vector<int> v(tot, 0);
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == tot) {
            out.emplace_back(std::vector<int>(v.begin(), v.begin() + ngen), std::vector<int>(v.begin() + ngen, v.end()));
            return;
        }
        for (int k = 0; k <= left; ++k) {
            v[pos] = k;
            rec(pos + 1, left - k);
        }
        v[pos] = 0;
    };
    rec(0, max_order);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        int oa = 0, ob = 0;
        for (int x : a.first) oa += x;
        for (int x : a.second) oa += x;
        for (int x : b.first) ob += x;
        for (int x : b.second) ob += x;
        if (oa != ob) return oa < ob;
        return a < b;
    });
    return out;
}

int order_of(const std::vector<int>& v) {
    int s = 0;
    for (int x : v) s += x;
    return s;
}

}  // namespace

QuadratureRule symbol_grid(const Symbol& a) { return haar_quadrature(a.group, std::max(1.0, std::ceil(2 * a.x_band) / 2)); }

double seminorm(const Symbol& a, const std::vector<int>& alpha, const std::vector<int>& beta, Side side,
                const SymbolClassParams& p, const std::vector<DualIndex>& duals) {
    const Symbol b = x_derivative_symbol(apply_differences(a, difference_generators(a.group), alpha), beta);
    const double e = p.rho * order_of(alpha) - p.delta * order_of(beta) - p.m;
    double s = 0;
    for (const auto& xi : duals) {
        const Eigen::MatrixXcd W = weight_power(a.group, xi, e);
        s = std::max(s, sup_norm(b, xi, &W, side));
    }
    return s;
}

ClassFitReport class_fit(const Symbol& a, const SymbolClassParams& p, int max_order,
                         const std::vector<DualIndex>& duals, double tol) {
    ClassFitReport rep;
    rep.params = p;
    const auto gens = difference_generators(a.group);
    const int nder = a.group.algebra_dim();
    rep.consistent = true;
    for (const auto& [alpha, beta] : multi_indices(int(gens.size()), nder, max_order)) {
        ClassFitEntry e;
        e.alpha = alpha;
        e.beta = beta;
        const Symbol b = x_derivative_symbol(apply_differences(a, gens, alpha), beta);
        const double ex = p.rho * order_of(alpha) - p.delta * order_of(beta) - p.m;
        std::vector<double> X, Y;
        for (const auto& xi : duals) {
            const auto w = sublaplacian_symbol(a.group, xi);
            const Eigen::MatrixXcd W = w.power(ex);
            e.left = std::max(e.left, sup_norm(b, xi, &W, Side::Left));
            e.right = std::max(e.right, sup_norm(b, xi, &W, Side::Right));
            if (xi.weight() < 4.0) continue;
            const double raw = sup_norm(b, xi, nullptr, Side::Left);
            if (raw > 1e-13) {
                X.push_back(std::log(std::sqrt(1.0 + w.nu2.maxCoeff())));
                Y.push_back(std::log(raw));
            }
        }
        if (X.size() < 2) {
            e.vanishes = true;
            e.slope = -INFINITY;
            e.consistent = true;
        } else {
            Eigen::MatrixXd A(X.size(), 2);
            Eigen::VectorXd y(Y.size());
            for (std::size_t i = 0; i < X.size(); ++i) {
                A(i, 0) = 1;
                A(i, 1) = X[i];
                y[i] = Y[i];
            }
            e.slope = A.colPivHouseholderQr().solve(y)[1];
            e.consistent = e.slope <= p.m - p.rho * order_of(alpha) + p.delta * order_of(beta) + tol;
        }
        if (order_of(alpha) + order_of(beta) == 0) rep.fitted_order = e.slope;
        rep.consistent = rep.consistent && e.consistent;
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

InclusionReport class_inclusion_check(const Symbol& a, double m, const SymbolClassParams& p, int max_order,
                                      const std::vector<DualIndex>& duals) {
    InclusionReport r;
    SymbolClassParams q = p;
    q.m = m;
    double wmax = 0;
    for (const auto& xi : duals) wmax = std::max(wmax, xi.weight());
    std::vector<DualIndex> half;
    for (const auto& xi : duals)
        if (xi.weight() <= 0.5 * wmax) half.push_back(xi);
    const auto gens = difference_generators(a.group);
    r.pass = true;
    for (const auto& [alpha, beta] : multi_indices(int(gens.size()), a.group.algebra_dim(), max_order)) {
        for (Side side : {Side::Left, Side::Right}) {
            const double h = seminorm(a, alpha, beta, side, q, half);
            const double f = seminorm(a, alpha, beta, side, q, duals);
            r.seminorms_half.push_back(h);
            r.seminorms_full.push_back(f);
            const double g = f / std::max(h, 1e-12);
            if (f > 1e-12) r.worst_growth = std::max(r.worst_growth, g);
            if (!std::isfinite(f) || (f > 1e-12 && g > 1.5)) r.pass = false;
        }
    }
    return r;
}

NonnegativityScan nonnegativity_scan(const Symbol& a, const std::vector<DualIndex>& duals, double tol) {
    NonnegativityScan r;
    r.min_eig = INFINITY;
    for (const auto& xi : duals) {
        const ModeExpansion ex = a.modes(xi);
        const QuadratureRule& R = cached_grid(a.group, std::max(mode_band(ex), a.x_band) + 1);
        for (const auto& x : R.nodes) {
            Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(xi.dim(), xi.dim());
            for (const auto& t : ex) v += eval_mode(a.group, t.mode, x) * t.coef;
            const double scale = 1.0 + v.cwiseAbs().maxCoeff();
            double lo;
            if ((v - v.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
                lo = -(v - v.adjoint()).cwiseAbs().maxCoeff();  // not Hermitian: no matrix order
            } else {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (v + v.adjoint()), Eigen::EigenvaluesOnly);
                lo = es.eigenvalues()[0];
            }
            if (lo < r.min_eig) {
                r.min_eig = lo;
                r.x = x;
                r.xi = xi;
            }
        }
    }
    r.ok = r.min_eig >= -tol;
    return r;
}

}  // namespace garding
