#include "garding/symbol.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "garding/errors.hpp"
#include "garding/wigner.hpp"

namespace garding {

namespace {

double mode_degree(const DualIndex& tau) {
    if (tau.kind == GroupKind::SU2) return 0.5 * tau.two_l;
    int m = 0;
    for (int v : tau.k) m = std::max(m, std::abs(v));
    return m;
}

XMode mode_of(const DualIndex& tau, int i, int j) {
    if (tau.kind == GroupKind::Torus) return XMode{tau, 0, 0};
    return XMode{tau, 2 * i - tau.two_l, 2 * j - tau.two_l};
}

}  // namespace

bool XMode::operator<(const XMode& o) const {
    if (!(tau == o.tau)) return tau < o.tau;
    if (two_a != o.two_a) return two_a < o.two_a;
    return two_b < o.two_b;
}

cd eval_mode(const GroupDescriptor& g, const XMode& mode, const GroupPoint& x) {
    if (g.kind == GroupKind::Torus) {
        double ph = 0;
        for (int i = 0; i < g.n; ++i) ph += mode.tau.k[i] * x.c[i];
        return std::polar(1.0, ph);
    }
    const double d = wigner_d(mode.tau.two_l, mode.two_a, mode.two_b, x.c[1]);
    return std::polar(d, -0.5 * mode.two_a * x.c[0] - 0.5 * mode.two_b * x.c[2]);
}

cd XFunction::operator()(const GroupPoint& x) const {
    cd s = 0;
    for (const auto& [m, c] : terms) s += c * eval_mode(group, m, x);
    return s;
}

double XFunction::band() const {
    double b = 0;
    for (const auto& t : terms) b = std::max(b, mode_degree(t.first.tau));
    return b;
}

XFunction XFunction::operator*(cd s) const {
    XFunction r = *this;
    for (auto& t : r.terms) t.second *= s;
    return r;
}

XFunction XFunction::operator+(const XFunction& o) const {
    std::map<XMode, cd> acc;
    for (const auto& t : terms) acc[t.first] += t.second;
    for (const auto& t : o.terms) acc[t.first] += t.second;
    XFunction r{group, {}};
    for (const auto& [m, c] : acc)
        if (c != cd(0)) r.terms.emplace_back(m, c);
    return r;
}

XFunction XFunction::constant(const GroupDescriptor& g, cd c) {
    DualIndex triv = g.kind == GroupKind::Torus ? DualIndex::torus(std::vector<int>(g.n, 0)) : DualIndex::spin(0);
    return XFunction{g, {{XMode{triv, 0, 0}, c}}};
}

XFunction XFunction::from_callable(const GroupDescriptor& g, const std::function<cd(const GroupPoint&)>& f,
                                   double band, double tol) {
    const QuadratureRule rule = haar_quadrature(g, std::max(0.5, band));
    const auto duals = resolved_duals(rule);
    const auto c = forward_transform(rule, sample(rule, f), duals);
    XFunction out{g, {}};
    double scale = 0;
    for (const auto& b : c.blocks) scale = std::max(scale, b.cwiseAbs().maxCoeff());
    for (std::size_t k = 0; k < duals.size(); ++k) {
        const int d = duals[k].dim();
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                const cd v = double(d) * c.blocks[k](b, a);
                if (std::abs(v) > 1e-15 * std::max(scale, 1e-300)) out.terms.emplace_back(mode_of(duals[k], a, b), v);
            }
    }
    const QuadratureRule fine = haar_quadrature(g, std::max(0.5, band) + 1.5);
    double err = 0, fmax = 0;
    for (std::size_t t = 0; t < fine.size(); ++t) {
        const cd v = f(fine.nodes[t]);
        fmax = std::max(fmax, std::abs(v));
        err = std::max(err, std::abs(v - out(fine.nodes[t])));
    }
    if (err > tol * std::max(1.0, fmax))
        throw AliasingError(fmt::format("function is not band-limited at degree {:g}", band));
    return out;
}

void SymbolClassParams::validate(bool theorem_mode) const {
    if (!(rho > 0 && rho <= 1)) throw ConfigError("rho must lie in (0, 1]");
    if (!(delta >= 0 && delta < 1)) throw ConfigError("delta must lie in [0, 1)");
    if (kappa < 1) throw ConfigError("kappa must be a positive integer");
    if (!(delta < rho)) throw ConfigError("class parameters need delta < rho");
    if (theorem_mode && !(delta < rho / (2 * kappa - 1)))
        throw ConfigError("theorem mode needs delta < rho / (2 kappa - 1)");
}

Eigen::MatrixXcd Symbol::value(const GroupPoint& x, const DualIndex& xi) const {
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(xi.dim(), xi.dim());
    for (const auto& t : modes(xi)) v += eval_mode(group, t.mode, x) * t.coef;
    return v;
}

std::vector<Eigen::MatrixXcd> Symbol::values(const std::vector<GroupPoint>& xs, const DualIndex& xi) const {
    const ModeExpansion ex = modes(xi);
    std::vector<Eigen::MatrixXcd> out(xs.size(), Eigen::MatrixXcd::Zero(xi.dim(), xi.dim()));
    for (const auto& t : ex)
        for (std::size_t p = 0; p < xs.size(); ++p) out[p] += eval_mode(group, t.mode, xs[p]) * t.coef;
    return out;
}

Symbol Symbol::multiplier(const GroupDescriptor& g, std::function<Eigen::MatrixXcd(const DualIndex&)> B,
                          std::string name) {
    return product(XFunction::constant(g, 1.0), std::move(B), std::move(name));
}

Symbol Symbol::product(const XFunction& f, std::function<Eigen::MatrixXcd(const DualIndex&)> B, std::string name) {
    Symbol s;
    s.group = f.group;
    s.name = std::move(name);
    s.x_band = f.band();
    s.factors.push_back({f, B});
    s.modes = [f, B = std::move(B)](const DualIndex& xi) {
        const Eigen::MatrixXcd b = B(xi);
        ModeExpansion ex;
        for (const auto& [m, c] : f.terms) ex.push_back({m, c * b});
        return ex;
    };
    return s;
}

Symbol Symbol::operator+(const Symbol& o) const {
    Symbol s = *this;
    s.name = name + " + " + o.name;
    s.x_band = std::max(x_band, o.x_band);
    s.samples = nullptr;
    if (factors.empty() || o.factors.empty())
        s.factors.clear();
    else
        s.factors.insert(s.factors.end(), o.factors.begin(), o.factors.end());
    s.modes = [a = modes, b = o.modes](const DualIndex& xi) {
        ModeExpansion ex = a(xi);
        for (auto& t : b(xi)) ex.push_back(std::move(t));
        return ex;
    };
    return s;
}

Symbol Symbol::operator*(double c) const {
    Symbol s = *this;
    s.samples = nullptr;
    for (auto& f : s.factors) f.f = f.f * c;
    s.modes = [a = modes, c](const DualIndex& xi) {
        ModeExpansion ex = a(xi);
        for (auto& t : ex) t.coef *= c;
        return ex;
    };
    return s;
}

SampledTable sample_symbol(const Symbol& a, const QuadratureRule& rule, const std::vector<DualIndex>& duals) {
    SampledTable t;
    t.group = a.group;
    t.degree = rule.degree;
    t.duals = duals;
    t.params = a.params;
    t.name = a.name;
    t.provenance = a.provenance;
    for (const auto& xi : duals) t.values.push_back(a.values(rule.nodes, xi));
    return t;
}

Symbol symbol_from_samples(std::shared_ptr<const SampledTable> t) {
    const QuadratureRule rule = haar_quadrature(t->group, t->degree);
    const auto xduals = resolved_duals(rule);
    auto table = std::make_shared<std::map<DualIndex, ModeExpansion>>();
    double band = 0;
    for (std::size_t k = 0; k < t->duals.size(); ++k) {
        const DualIndex& xi = t->duals[k];
        const int d = xi.dim();
        if (t->values[k].size() != rule.size()) throw ConfigError("symbol samples do not match the grid");
        std::map<XMode, Eigen::MatrixXcd> acc;
        for (int r = 0; r < d; ++r)
            for (int s = 0; s < d; ++s) {
                GridFunction f(rule.size());
                for (std::size_t p = 0; p < rule.size(); ++p) f[p] = t->values[k][p](r, s);
                const auto c = forward_transform(rule, f, xduals);
                for (std::size_t q = 0; q < xduals.size(); ++q) {
                    const int e = xduals[q].dim();
                    for (int a = 0; a < e; ++a)
                        for (int b = 0; b < e; ++b) {
                            const cd v = double(e) * c.blocks[q](b, a);
                            if (std::abs(v) < 1e-15) continue;
                            const XMode m = mode_of(xduals[q], a, b);
                            auto it = acc.find(m);
                            if (it == acc.end()) it = acc.emplace(m, Eigen::MatrixXcd::Zero(d, d)).first;
                            it->second(r, s) += v;
                            band = std::max(band, mode_degree(m.tau));
                        }
                }
            }
        ModeExpansion ex;
        for (auto& [m, c] : acc) ex.push_back({m, std::move(c)});
        (*table)[xi] = std::move(ex);
    }
    Symbol s;
    s.group = t->group;
    s.params = t->params;
    s.name = t->name;
    s.provenance = t->provenance.empty() ? "assembled" : t->provenance;
    s.x_band = band;
    s.samples = t;
    s.modes = [table](const DualIndex& xi) {
        auto it = table->find(xi);
        if (it == table->end()) throw DomainError("symbol evaluated outside its sampled duals at " + xi.label());
        return it->second;
    };
    // the grid must reproduce the samples
    for (std::size_t k = 0; k < t->duals.size(); ++k) {
        const auto back = s.values(rule.nodes, t->duals[k]);
        for (std::size_t p = 0; p < rule.size(); ++p)
            if ((back[p] - t->values[k][p]).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + t->values[k][p].norm()))
                throw AliasingError("symbol samples are not band-limited on their grid");
    }
    return s;
}

Eigen::MatrixXcd sublaplacian_matrix(const GroupDescriptor& g, const DualIndex& xi) {
    Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(xi.dim(), xi.dim());
    for (int j : g.fields) L -= lie_rep_square(g, xi, j);
    return L;
}

SubellipticWeight sublaplacian_symbol(const GroupDescriptor& g, const DualIndex& xi) {
    const Eigen::MatrixXcd L = sublaplacian_matrix(g, xi);
    const double scale = std::max(1.0, L.cwiseAbs().maxCoeff());
    if ((L - L.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw VerificationError("sub-Laplacian symbol is not Hermitian at " + xi.label());
    SubellipticWeight w;
    w.xi = xi;
    const int d = xi.dim();
    Eigen::MatrixXcd off = L;
    off.diagonal().setZero();
    if (off.cwiseAbs().maxCoeff() <= 1e-12 * scale) {
        w.nu2 = L.diagonal().real();
        w.basis = Eigen::MatrixXcd::Identity(d, d);
        w.diagonal = true;
        return w;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(L);
    w.nu2 = es.eigenvalues();
    w.basis = es.eigenvectors();
    for (int c = 0; c < d; ++c) {
        int p = 0;
        while (p < d && std::abs(w.basis(p, c)) < 1e-12) ++p;
        if (p < d) w.basis.col(c) *= std::conj(w.basis(p, c)) / std::abs(w.basis(p, c));
    }
    w.diagonal = false;
    return w;
}

Eigen::MatrixXcd SubellipticWeight::power(double s) const {
    Eigen::VectorXd e(nu2.size());
    for (int i = 0; i < nu2.size(); ++i) e[i] = std::pow(1.0 + std::max(0.0, nu2[i]), 0.5 * s);
    if (diagonal) return e.cast<cd>().asDiagonal();
    return basis * e.cast<cd>().asDiagonal() * basis.adjoint();
}

Eigen::MatrixXcd weight_power(const GroupDescriptor& g, const DualIndex& xi, double s) {
    return sublaplacian_symbol(g, xi).power(s);
}

Eigen::MatrixXcd elliptic_power(const DualIndex& xi, double s) {
    return Eigen::MatrixXcd::Identity(xi.dim(), xi.dim()) * std::pow(xi.weight(), s);
}

WeightComparison weight_comparison_check(const GroupDescriptor& g, const std::vector<DualIndex>& duals) {
    WeightComparison r;
    r.c1 = INFINITY;
    r.c2 = 0;
    for (const auto& xi : duals) {
        const auto w = sublaplacian_symbol(g, xi);
        for (int i = 0; i < w.nu2.size(); ++i) {
            const double nu = std::sqrt(1.0 + w.nu2[i]);
            const double lo = nu / std::pow(xi.weight(), 1.0 / g.step);
            const double hi = nu / xi.weight();
            if (lo < r.c1) {
                r.c1 = lo;
                r.witness = xi.label() + " i=" + std::to_string(i);
            }
            r.c2 = std::max(r.c2, hi);
        }
    }
    r.pass = std::isfinite(r.c1) && r.c1 > 0 && std::isfinite(r.c2);
    return r;
}

}  // namespace garding
