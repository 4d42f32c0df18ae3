#include "garding/quantization.hpp"

#include <fmt/format.h>

#include <cmath>
#include <map>

#include "garding/errors.hpp"
#include "garding/wigner.hpp"

namespace garding {

namespace {

double dual_degree(const DualIndex& xi) {
    if (xi.kind == GroupKind::SU2) return 0.5 * xi.two_l;
    double s = 0;
    for (int v : xi.k) s += double(v) * v;
    return std::sqrt(s);
}

double weight_of_degree(const GroupDescriptor& g, double deg) {
    return g.kind == GroupKind::SU2 ? su2_cutoff(deg) : std::sqrt(1.0 + deg * deg);
}

// Band of x-modes in Euclidean degree (torus modes are box-limited).
double euclid_band(const GroupDescriptor& g, double band) {
    return g.kind == GroupKind::Torus ? std::sqrt(double(g.n)) * band : band;
}

// Highest total band a rule integrates exactly (products of two coefficients).
double exact_band(const QuadratureRule& r) { return r.group.kind == GroupKind::Torus ? 4 * r.degree : 2 * r.degree; }

int torus_index(const BasisLayout& L, const std::vector<int>& k) { return L.find(DualIndex::torus(k)); }

// Adds the section of Op(a) restricted to columns in `cols` and rows in `rows`.
void add_op(const Symbol& a, const BasisLayout& rows, const BasisLayout& cols, Eigen::MatrixXcd& M) {
    const GroupDescriptor& g = a.group;
    for (std::size_t kc = 0; kc < cols.duals.size(); ++kc) {
        const DualIndex& xi = cols.duals[kc];
        const ModeExpansion ex = a.modes(xi);
        if (g.kind == GroupKind::Torus) {
            const int col = cols.offset[kc];
            for (const auto& t : ex) {
                std::vector<int> k = xi.k;
                for (int i = 0; i < g.n; ++i) k[i] += t.mode.tau.k[i];
                const int r = torus_index(rows, k);
                if (r >= 0) M(rows.offset[r], col) += t.coef(0, 0);
            }
            continue;
        }
        const int tx = xi.two_l, d = xi.dim();
        for (const auto& t : ex) {
            const int tt = t.mode.tau.two_l, ta = t.mode.two_a, tb = t.mode.two_b;
            for (int dd = 0; dd < d; ++dd) {
                const int md = 2 * dd - tx, B = tb + md;
                for (int L = std::abs(tx - tt); L <= tx + tt; L += 2) {
                    if (std::abs(B) > L) continue;
                    const int r = rows.find(DualIndex::spin(L));
                    if (r < 0) continue;
                    const double cb = clebsch_gordan_cached(tt, tb, tx, md, L, B);
                    if (cb == 0) continue;
                    const double scale = cb * std::sqrt(double(d) / double(L + 1));
                    for (int c = 0; c < d; ++c) {
                        const int mc = 2 * c - tx, A = ta + mc;
                        if (std::abs(A) > L) continue;
                        const double ca = clebsch_gordan_cached(tt, ta, tx, mc, L, A);
                        if (ca == 0) continue;
                        const int row = rows.index(r, (A + L) / 2, (B + L) / 2);
                        for (int dp = 0; dp < d; ++dp) {
                            const cd v = t.coef(dd, dp);
                            if (v == cd(0)) continue;
                            M(row, cols.index(int(kc), c, dp)) += ca * scale * v;
                        }
                    }
                }
            }
        }
    }
}

Eigen::MatrixXcd basis_on_nodes(const GroupDescriptor& g, const BasisLayout& L, const QuadratureRule& rule) {
    Eigen::MatrixXcd E(rule.size(), L.size);
    for (std::size_t s = 0; s < rule.size(); ++s)
        for (std::size_t k = 0; k < L.duals.size(); ++k) {
            const Eigen::MatrixXcd R = rep_matrix(g, L.duals[k], rule.nodes[s]);
            const int d = L.duals[k].dim();
            const double sq = std::sqrt(double(d));
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) E(s, L.index(int(k), i, j)) = sq * R(i, j);
        }
    return E;
}

cd gen_binomial(int top, int k) {
    double v = 1;
    for (int i = 0; i < k; ++i) v *= double(top - i) / double(i + 1);
    return v;
}

}  // namespace

double max_degree(const std::vector<DualIndex>& duals) {
    double m = 0;
    for (const auto& d : duals) m = std::max(m, dual_degree(d));
    return m;
}

std::vector<DualIndex> interior_duals(const std::vector<DualIndex>& duals, double cutoff, double margin) {
    std::vector<DualIndex> out;
    if (duals.empty()) return out;
    GroupDescriptor g = duals[0].kind == GroupKind::SU2 ? GroupDescriptor::su2()
                                                         : GroupDescriptor::torus(int(duals[0].k.size()));
    const double reach = euclid_band(g, margin);
    for (const auto& xi : duals)
        if (weight_of_degree(g, dual_degree(xi) + reach) <= cutoff * (1 + 1e-12)) out.push_back(xi);
    return out;
}

OperatorMatrix OperatorMatrix::restrict_to(const std::vector<DualIndex>& duals) const {
    BasisLayout L(duals);
    std::vector<int> ri(L.size), ci(L.size);
    for (std::size_t k = 0; k < duals.size(); ++k) {
        const int r = rows.find(duals[k]), c = cols.find(duals[k]);
        if (r < 0 || c < 0) throw DomainError("sub-block dual " + duals[k].label() + " is not in the section");
        const int n = duals[k].dim() * duals[k].dim();
        for (int i = 0; i < n; ++i) {
            ri[L.offset[k] + i] = rows.offset[r] + i;
            ci[L.offset[k] + i] = cols.offset[c] + i;
        }
    }
    OperatorMatrix out = *this;
    out.rows = L;
    out.cols = L;
    out.M = M(ri, ci);
    out.cutoff = 0;
    for (const auto& d : duals) out.cutoff = std::max(out.cutoff, d.weight());
    return out;
}

OperatorMatrix op_from_symbol(const Symbol& a, const BasisLayout& rows, const BasisLayout& cols) {
    OperatorMatrix A;
    A.group = a.group;
    A.rows = rows;
    A.cols = cols;
    for (const auto& d : cols.duals) A.cutoff = std::max(A.cutoff, d.weight());
    A.provenance = "op(" + a.name + ")";
    A.M = Eigen::MatrixXcd::Zero(rows.size, cols.size);
    add_op(a, rows, cols, A.M);
    return A;
}

OperatorMatrix op_from_symbol(const Symbol& a, double cutoff) {
    BasisLayout L(enumerate_dual(a.group, cutoff));
    OperatorMatrix A = op_from_symbol(a, L, L);
    A.cutoff = cutoff;
    return A;
}

OperatorMatrix op_from_symbol_quadrature(const Symbol& a, double cutoff, const QuadratureRule& rule) {
    const GroupDescriptor& g = a.group;
    BasisLayout L(enumerate_dual(g, cutoff));
    const double need = 2 * euclid_band(g, max_degree(L.duals)) + euclid_band(g, a.x_band);
    if (exact_band(rule) < need - 1e-12)
        throw AliasingError(fmt::format("quadrature degree {:g} is too coarse for the section", rule.degree));
    OperatorMatrix A;
    A.group = g;
    A.rows = A.cols = L;
    A.cutoff = cutoff;
    A.quad_degree = rule.degree;
    A.provenance = "op(" + a.name + ") by quadrature";
    A.M = Eigen::MatrixXcd::Zero(L.size, L.size);
    for (std::size_t k = 0; k < L.duals.size(); ++k) {
        const DualIndex& eta = L.duals[k];
        const int d = eta.dim();
        const auto av = a.values(rule.nodes, eta);
        std::vector<Eigen::MatrixXcd> R(rule.size());
        for (std::size_t s = 0; s < rule.size(); ++s) R[s] = rep_matrix(g, eta, rule.nodes[s]) * std::sqrt(double(d));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                GridFunction f(rule.size());
                for (std::size_t s = 0; s < rule.size(); ++s) f[s] = (R[s].row(i) * av[s].col(j))(0, 0);
                A.M.col(L.index(int(k), i, j)) = forward_transform(rule, f, L.duals).to_basis(L);
            }
    }
    return A;
}

OperatorMatrix multiplier_section(const GroupDescriptor& g, const BasisLayout& layout,
                                  const std::function<Eigen::MatrixXcd(const DualIndex&)>& B) {
    OperatorMatrix A;
    A.group = g;
    A.rows = A.cols = layout;
    for (const auto& d : layout.duals) A.cutoff = std::max(A.cutoff, d.weight());
    A.provenance = "multiplier";
    A.M = Eigen::MatrixXcd::Zero(layout.size, layout.size);
    for (std::size_t k = 0; k < layout.duals.size(); ++k) {
        const Eigen::MatrixXcd b = B(layout.duals[k]);
        const int d = layout.duals[k].dim();
        for (int c = 0; c < d; ++c)
            A.M.block(layout.index(int(k), c, 0), layout.index(int(k), c, 0), d, d) = b;
    }
    return A;
}

Symbol symbol_of_operator(const OperatorMatrix& A, double margin) {
    const GroupDescriptor g = A.group;
    auto inner = std::make_shared<std::map<DualIndex, ModeExpansion>>();
    const auto interior = interior_duals(A.cols.duals, A.cutoff, margin);
    for (const auto& xi : interior) {
        const int kc = A.cols.find(xi);
        std::map<XMode, Eigen::MatrixXcd> acc;
        auto add = [&](const XMode& m, int p, int j, cd v) {
            auto it = acc.find(m);
            if (it == acc.end()) it = acc.emplace(m, Eigen::MatrixXcd::Zero(xi.dim(), xi.dim())).first;
            it->second(p, j) += v;
        };
        if (g.kind == GroupKind::Torus) {
            for (std::size_t r = 0; r < A.rows.duals.size(); ++r) {
                const cd v = A.M(A.rows.offset[r], A.cols.offset[kc]);
                if (v == cd(0)) continue;
                std::vector<int> k = A.rows.duals[r].k;
                for (int i = 0; i < g.n; ++i) k[i] -= xi.k[i];
                add(XMode{DualIndex::torus(k), 0, 0}, 0, 0, v);
            }
        } else {
            const int tx = xi.two_l, dx = xi.dim();
            for (std::size_t r = 0; r < A.rows.duals.size(); ++r) {
                const int te = A.rows.duals[r].two_l, de = te + 1;
                const double sc = std::sqrt(double(de) / double(dx));
                for (int i = 0; i < dx; ++i)
                    for (int j = 0; j < dx; ++j) {
                        const int col = A.cols.index(kc, i, j);
                        const int mi = 2 * i - tx;
                        for (int k = 0; k < de; ++k)
                            for (int l = 0; l < de; ++l) {
                                const cd v = A.M(A.rows.index(int(r), k, l), col);
                                if (v == cd(0)) continue;
                                const int mk = 2 * k - te, ml = 2 * l - te;
                                for (int p = 0; p < dx; ++p) {
                                    const int mp = 2 * p - tx;
                                    const double sign = (((mi - mp) / 2) % 2) ? -1.0 : 1.0;
                                    const int M1 = mk - mi, M2 = ml - mp;
                                    for (int L = std::abs(tx - te); L <= tx + te; L += 2) {
                                        if (std::abs(M1) > L || std::abs(M2) > L) continue;
                                        const double c = clebsch_gordan_cached(tx, -mi, te, mk, L, M1) *
                                                         clebsch_gordan_cached(tx, -mp, te, ml, L, M2);
                                        if (c != 0) add(XMode{DualIndex::spin(L), M1, M2}, p, j, sign * sc * c * v);
                                    }
                                }
                            }
                    }
            }
        }
        ModeExpansion ex;
        for (auto& [m, c] : acc)
            if (c.cwiseAbs().maxCoeff() > 0) ex.push_back({m, std::move(c)});
        (*inner)[xi] = std::move(ex);
    }
    Symbol s;
    s.group = g;
    s.name = "sym(" + A.provenance + ")";
    s.provenance = "assembled";
    s.x_band = 2 * max_degree(A.rows.duals);
    s.modes = [inner, margin](const DualIndex& xi) {
        auto it = inner->find(xi);
        if (it == inner->end())
            throw DomainError("symbol requested at " + xi.label() + ", inside the margin " + fmt::format("{:g}", margin) +
                              " of the section edge");
        return it->second;
    };
    return s;
}

Eigen::MatrixXcd Amplitude::value(const GroupPoint& x, const GroupPoint& y, const DualIndex& xi) const {
    if (fn) return fn(x, y, xi);
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(xi.dim(), xi.dim());
    for (const auto& t : terms) v += t.y_factor(y) * t.symbol.value(x, xi);
    return v;
}

Amplitude Amplitude::from_symbol(const Symbol& a) {
    Amplitude p;
    p.group = a.group;
    p.params = a.params;
    p.name = a.name;
    p.terms.push_back({XFunction::constant(a.group, 1.0), a});
    p.x_band = a.x_band;
    return p;
}

OperatorMatrix aop_from_amplitude(const Amplitude& p, double cutoff) {
    if (!p.separable()) throw ConfigError("exact amplitude assembly needs the separable form");
    const GroupDescriptor& g = p.group;
    BasisLayout L(enumerate_dual(g, cutoff));
    OperatorMatrix A;
    A.group = g;
    A.rows = A.cols = L;
    A.cutoff = cutoff;
    A.provenance = "aop(" + p.name + ")";
    A.M = Eigen::MatrixXcd::Zero(L.size, L.size);
    for (const auto& t : p.terms) {
        const double yb = t.y_factor.band();
        BasisLayout mid(enumerate_dual(g, weight_of_degree(g, max_degree(L.duals) + euclid_band(g, yb)) * (1 + 1e-12)));
        const Symbol mult = Symbol::product(
            t.y_factor, [](const DualIndex& xi) { return Eigen::MatrixXcd::Identity(xi.dim(), xi.dim()); }, "psi");
        const OperatorMatrix Y = op_from_symbol(mult, mid, L);
        const OperatorMatrix X = op_from_symbol(t.symbol, L, mid);
        A.M += X.M * Y.M;
    }
    return A;
}

OperatorMatrix aop_from_amplitude_kernel(const Amplitude& p, double cutoff, const QuadratureRule& rule) {
    const GroupDescriptor& g = p.group;
    BasisLayout L(enumerate_dual(g, cutoff));
    const double lmax = max_degree(L.duals);
    const double reach = p.separable() ? euclid_band(g, p.y_band) : p.xi_reach;
    const auto xis = enumerate_dual(g, weight_of_degree(g, lmax + reach) * (1 + 1e-12));
    const double xmax = max_degree(xis);
    const double need = std::max(xmax + euclid_band(g, p.y_band), xmax + euclid_band(g, p.x_band)) + lmax;
    if (exact_band(rule) < need - 1e-12)
        throw AliasingError(fmt::format("quadrature degree {:g} is too coarse for the kernel", rule.degree));
    const std::size_t n = rule.size();
    std::vector<std::vector<Eigen::MatrixXcd>> R(xis.size(), std::vector<Eigen::MatrixXcd>(n));
    for (std::size_t k = 0; k < xis.size(); ++k)
        for (std::size_t s = 0; s < n; ++s) R[k][s] = rep_matrix(g, xis[k], rule.nodes[s]);
    Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t t = 0; t < n; ++t) {
            cd acc = 0;
            for (std::size_t k = 0; k < xis.size(); ++k) {
                const Eigen::MatrixXcd pv = p.value(rule.nodes[s], rule.nodes[t], xis[k]);
                acc += double(xis[k].dim()) * (R[k][t].adjoint() * R[k][s] * pv).trace();
            }
            K(s, t) = acc * rule.weights[s] * rule.weights[t];
        }
    const Eigen::MatrixXcd E = basis_on_nodes(g, L, rule);
    OperatorMatrix A;
    A.group = g;
    A.rows = A.cols = L;
    A.cutoff = cutoff;
    A.quad_degree = rule.degree;
    A.provenance = "aop(" + p.name + ") by kernel";
    A.M = E.adjoint() * K * E;
    return A;
}

OperatorMatrix adjoint(const OperatorMatrix& A) {
    OperatorMatrix B = A;
    std::swap(B.rows, B.cols);
    B.M = A.M.adjoint();
    B.provenance = "adjoint(" + A.provenance + ")";
    return B;
}

OperatorMatrix compose(const OperatorMatrix& A, const OperatorMatrix& B) {
    if (!(A.cols.duals == B.rows.duals)) throw ConfigError("composition of sections with different cutoffs");
    OperatorMatrix C = A;
    C.cols = B.cols;
    C.cutoff = B.cutoff;
    C.M = A.M * B.M;
    C.provenance = A.provenance + " * " + B.provenance;
    return C;
}

ExpansionReport expansion_check(const Amplitude& p, int N, double cutoff) {
    const GroupDescriptor& g = p.group;
    if (g.kind != GroupKind::Torus) throw ConfigError("the amplitude expansion check runs on the torus");
    if (!p.separable()) throw ConfigError("the amplitude expansion check needs the separable form");
    double margin = 0;
    for (const auto& t : p.terms) margin = std::max(margin, t.symbol.x_band + t.y_factor.band());
    const Symbol exact = symbol_of_operator(aop_from_amplitude(p, cutoff), margin);

    // sigma_N = sum_{|alpha| <= N} sum_k psi_k prod_j C(-k_j, alpha_j) e^{ikx} Delta^alpha a(x, xi)
    const auto gens = difference_generators(g);
    std::vector<std::vector<int>> alphas;
    std::vector<int> al(g.n, 0);
    std::function<void(int, int)> rec = [&](int j, int left) {
        if (j == g.n) {
            alphas.push_back(al);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            al[j] = v;
            rec(j + 1, left - v);
        }
        al[j] = 0;
    };
    rec(0, N);
    std::vector<Symbol> parts;
    for (const auto& t : p.terms)
        for (const auto& a : alphas) {
            XFunction f{g, {}};
            for (const auto& [m, c] : t.y_factor.terms) {
                cd w = c;
                for (int j = 0; j < g.n; ++j) w *= gen_binomial(-m.tau.k[j], a[j]);
                if (w != cd(0)) f.terms.emplace_back(m, w);
            }
            if (f.terms.empty()) continue;
            const Symbol fs = Symbol::product(
                f, [](const DualIndex& xi) { return Eigen::MatrixXcd::Identity(xi.dim(), xi.dim()); }, "y");
            parts.push_back(symbol_product(fs, apply_differences(t.symbol, gens, a)));
        }

    ExpansionReport r;
    r.order = N;
    BasisLayout L(enumerate_dual(g, cutoff));
    r.duals = interior_duals(L.duals, cutoff, margin);
    const QuadratureRule grid = haar_quadrature(g, std::max(1.0, 2 * margin + 1));
    const double ex = p.params.m - (p.params.rho - p.params.delta) * (N + 1);
    std::vector<double> X, Y;
    double best16 = 1e300;
    for (const auto& xi : r.duals) {
        auto se = exact.values(grid.nodes, xi);
        double res = 0;
        std::vector<Eigen::MatrixXcd> sn(grid.size(), Eigen::MatrixXcd::Zero(xi.dim(), xi.dim()));
        for (const auto& s : parts) {
            auto v = s.values(grid.nodes, xi);
            for (std::size_t q = 0; q < grid.size(); ++q) sn[q] += v[q];
        }
        for (std::size_t q = 0; q < grid.size(); ++q) res = std::max(res, (se[q] - sn[q]).norm());
        r.residual.push_back(res);
        const double w = xi.weight();
        r.weighted_residual = std::max(r.weighted_residual, std::pow(w, -ex) * res);
        if (w >= 4 - 1e-12 && w <= 32 + 1e-12 && res > 0) {
            X.push_back(std::log(w));
            Y.push_back(std::log(res));
        }
        const double gap = std::abs(w - 16);
        if (gap < best16 - 1e-9) {
            best16 = gap;
            r.residual_at_16 = res;
        } else if (std::abs(gap - best16) <= 1e-9) {
            r.residual_at_16 = std::max(r.residual_at_16, res);
        }
    }
    if (X.size() >= 2) {
        Eigen::MatrixXd A(X.size(), 2);
        Eigen::VectorXd y(X.size());
        for (std::size_t i = 0; i < X.size(); ++i) {
            A(i, 0) = 1;
            A(i, 1) = X[i];
            y[i] = Y[i];
        }
        r.fitted_exponent = A.colPivHouseholderQr().solve(y)[1];
    }
    return r;
}

double sobolev_norm(const FourierCoefficients& u, double s, SobolevScale scale) {
    double acc = 0;
    for (std::size_t k = 0; k < u.duals.size(); ++k) {
        const DualIndex& xi = u.duals[k];
        const Eigen::MatrixXcd B =
            scale == SobolevScale::Elliptic ? elliptic_power(xi, s) : weight_power(u.group, xi, s);
        acc += xi.dim() * (B * u.blocks[k]).squaredNorm();
    }
    return std::sqrt(acc);
}

}  // namespace garding
