#include "garding/garding.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>

#include "garding/errors.hpp"

namespace garding {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Eigen::MatrixXcd eye(const DualIndex& xi) { return Eigen::MatrixXcd::Identity(xi.dim(), xi.dim()); }

XFunction torus_cos_half(const GroupDescriptor& g) {
    // (1 + cos x) / 2
    return XFunction{g,
                     {{XMode{DualIndex::torus({-1}), 0, 0}, 0.25},
                      {XMode{DualIndex::torus({0}), 0, 0}, 0.5},
                      {XMode{DualIndex::torus({1}), 0, 0}, 0.25}}};
}

// cos^2(beta/2) = |D^{1/2}_{00}|^2 = (1 + D^1_{00}) / 2, and sin^2(beta/2) = (1 - D^1_{00}) / 2
XFunction su2_half(double sign) {
    const auto g = GroupDescriptor::su2();
    return XFunction{g, {{XMode{DualIndex::spin(0), 0, 0}, 0.5}, {XMode{DualIndex::spin(2), 0, 0}, 0.5 * sign}}};
}

Symbol with_params(Symbol s, double m, double rho, double delta, int kappa) {
    s.params = SymbolClassParams{m, rho, delta, kappa};
    return s;
}

double variation_top3(const std::vector<double>& v) {
    if (v.empty()) return 0;
    const std::size_t k = std::min<std::size_t>(3, v.size());
    const auto b = v.end() - k;
    const double hi = *std::max_element(b, v.end()), lo = *std::min_element(b, v.end());
    // norms at roundoff level count as stable
    if (hi < 1e-8) return 0;
    return (hi - lo) / hi;
}

OperatorMatrix scaled(const OperatorMatrix& A, const std::vector<DualIndex>& interior, double s) {
    OperatorMatrix T = A.restrict_to(interior);
    const GroupDescriptor g = A.group;
    const OperatorMatrix Ms =
        multiplier_section(g, T.rows, [&](const DualIndex& xi) { return weight_power(g, xi, -s); });
    T.M = Ms.M * T.M * Ms.M;
    return T;
}

double lambda_min_herm(const Eigen::MatrixXcd& M) {
    if (M.size() == 0) return 0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (M + M.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues()[0];
}

double op_norm(const Eigen::MatrixXcd& M) { return M.size() == 0 ? 0.0 : M.operatorNorm(); }

}  // namespace

double cutoff_for_degree(const GroupDescriptor& g, double degree) {
    if (degree < 0) throw ConfigError("cutoff degrees must be nonnegative");
    return g.kind == GroupKind::SU2 ? su2_cutoff(degree) : std::sqrt(1.0 + degree * degree);
}

std::vector<Symbol> nonnegative_suite(const GroupDescriptor& g) {
    std::vector<Symbol> out;
    if (g.kind == GroupKind::Torus) {
        out.push_back(with_params(Symbol::multiplier(g, eye, "one"), 0, 1, 0, 1));
        out.push_back(with_params(
            Symbol::multiplier(g, [](const DualIndex& xi) { return elliptic_power(xi, 1); }, "<xi>"), 1, 1, 0, 1));
        if (g.n == 1) {
            out.push_back(with_params(Symbol::product(torus_cos_half(g), [](const DualIndex& xi) { return elliptic_power(xi, 1); },
                                                      "(1+cos x)/2 <xi>"),
                                      1, 1, 0, 1));
            out.push_back(with_params(Symbol::product(torus_cos_half(g), [](const DualIndex& xi) { return elliptic_power(xi, 2); },
                                                      "(1+cos x)/2 <xi>^2"),
                                      2, 1, 0, 1));
        }
        return out;
    }
    out.push_back(with_params(Symbol::multiplier(g, eye, "I"), 0, 1, 0, 2));
    out.push_back(with_params(
        Symbol::multiplier(g, [g](const DualIndex& xi) { return weight_power(g, xi, 1); }, "M"), 1, 1, 0, 2));
    out.push_back(with_params(
        Symbol::product(su2_half(1), [g](const DualIndex& xi) { return weight_power(g, xi, 2); }, "cos^2(b/2) M^2"),
        2, 1, 0, 2));
    auto jsq = [g](int j) {
        return [g, j](const DualIndex& xi) -> Eigen::MatrixXcd { return -lie_rep_square(g, xi, j); };
    };
    const auto jx = jsq(0), jy = jsq(1);
    Symbol mixed = Symbol::product(su2_half(1), [jx](const DualIndex& xi) { return (eye(xi) + jx(xi)).eval(); }, "c1") +
                   Symbol::product(su2_half(-1), jy, "c2");
    mixed.name = "cos^2(b/2)(I+Jx^2) + sin^2(b/2)Jy^2";
    out.push_back(with_params(mixed, 2, 1, 0, 2));
    return out;
}

Symbol weighted_laplacian_symbol() {
    const auto g = GroupDescriptor::su2();
    Symbol s = Symbol::product(su2_half(1), [g](const DualIndex& xi) { return weight_power(g, xi, 2); },
                               "|D00|^2 (I+L)");
    s.params = SymbolClassParams{2, 1, 0, 2};
    return s;
}

Symbol sign_changing_control() {
    const auto g = GroupDescriptor::torus(1);
    const XFunction c{g, {{XMode{DualIndex::torus({-1}), 0, 0}, 0.5}, {XMode{DualIndex::torus({1}), 0, 0}, 0.5}}};
    Symbol s = Symbol::product(c, [](const DualIndex& xi) { return elliptic_power(xi, 2); }, "cos x <xi>^2");
    s.params = SymbolClassParams{2, 1, 0, 1};
    return s;
}

std::vector<SweepRow> lambda_sweep(const Symbol& a, double s, const std::vector<double>& cutoffs) {
    if (cutoffs.empty()) throw ConfigError("empty cutoff list");
    const GroupDescriptor& g = a.group;
    const double top = *std::max_element(cutoffs.begin(), cutoffs.end());
    const auto t0 = Clock::now();
    const OperatorMatrix A = op_from_symbol(a, cutoff_for_degree(g, top));
    const double build = seconds_since(t0);
    std::vector<SweepRow> rows;
    for (double c : cutoffs) {
        const auto t1 = Clock::now();
        const double wc = cutoff_for_degree(g, c);
        const auto inner = interior_duals(enumerate_dual(g, wc), wc, a.x_band);
        const OperatorMatrix T = scaled(A, inner, s);
        SweepRow r;
        r.cutoff = c;
        r.interior_size = T.rows.size;
        r.lambda_min = lambda_min_herm(T.M);
        r.seconds = seconds_since(t1) + (c == top ? build : 0.0);
        rows.push_back(r);
    }
    return rows;
}

bool decrements_shrink(const std::vector<SweepRow>& rows) {
    if (rows.size() < 2) return false;
    const double a = rows[rows.size() - 2].lambda_min, b = rows.back().lambda_min;
    return std::isfinite(a) && std::isfinite(b) && std::abs(b - a) <= 0.1 * (1 + std::abs(a));
}

RemainderReport remainder_bounds(const Symbol& a, const WeightFunction& w, const SymbolClassParams& p,
                                 const std::vector<double>& cutoffs, const FriedrichsOptions& opt) {
    p.validate(true);
    if (cutoffs.empty()) throw ConfigError("empty cutoff list");
    const GroupDescriptor& g = a.group;
    RemainderReport rep;
    rep.s = p.sobolev_index();
    const double top = *std::max_element(cutoffs.begin(), cutoffs.end());
    rep.friedrichs = friedrichs_operators({a}, w, cutoff_for_degree(g, top), opt);
    remainder_rows(rep, a, w, cutoffs, rep.friedrichs.P.front());
    return rep;
}

void remainder_rows(RemainderReport& rep, const Symbol& a, const WeightFunction& w, const std::vector<double>& cutoffs,
                    const OperatorMatrix& P) {
    const GroupDescriptor& g = a.group;
    const double wtop = cutoff_for_degree(g, *std::max_element(cutoffs.begin(), cutoffs.end()));
    if (std::abs(P.cutoff - wtop) > 1e-12 * wtop) throw ConfigError("P does not match the top cutoff");
    rep.rows.clear();
    const OperatorMatrix A = op_from_symbol(a, wtop);
    const OperatorMatrix D = op_from_symbol(friedrichs_diagonal_symbol(a, w) + a * -1.0, wtop);
    OperatorMatrix AP = A;
    AP.M = A.M - P.M;
    std::vector<double> tot, dia;
    for (double c : cutoffs) {
        const double wc = cutoff_for_degree(g, c);
        const auto inner = interior_duals(enumerate_dual(g, wc), wc, a.x_band);
        RemainderRow r;
        r.cutoff = c;
        r.total = op_norm(scaled(AP, inner, rep.s).M);
        r.diagonal = op_norm(scaled(D, inner, rep.s).M);
        tot.push_back(r.total);
        dia.push_back(r.diagonal);
        rep.rows.push_back(r);
    }
    rep.total_variation = variation_top3(tot);
    rep.diagonal_variation = variation_top3(dia);
    rep.pass = rep.rows.size() >= 3 && rep.total_variation <= 0.25 && rep.diagonal_variation <= 0.25;
}

bool GardingReport::pass() const {
    if (rejected || !stable) return false;
    if (positivity && !*positivity) return false;
    if (remainder && !*remainder) return false;
    return true;
}

std::string GardingReport::verdict() const { return rejected ? "REJECTED" : (pass() ? "PASS" : "FAIL"); }

GardingReport garding_verify(const Symbol& a, const SymbolClassParams& p, const std::vector<double>& cutoffs) {
    p.validate(true);
    if (cutoffs.empty()) throw ConfigError("empty cutoff list");
    GardingReport rep;
    rep.symbol = a.name;
    rep.group = a.group;
    rep.params = p;
    rep.theta = p.theta();
    rep.s = p.sobolev_index();
    const double top = *std::max_element(cutoffs.begin(), cutoffs.end());
    rep.witness = nonnegativity_scan(a, enumerate_dual(a.group, cutoff_for_degree(a.group, top)), 1e-10);
    if (!rep.witness.ok) {
        rep.rejected = true;
        rep.rejection = "nonnegativity scan failed";
        return rep;
    }
    rep.rows = lambda_sweep(a, rep.s, cutoffs);
    double lo = 0;
    for (const auto& r : rep.rows) lo = std::min(lo, r.lambda_min);
    rep.C_estimate = lo < 0 ? -lo : 0.0;
    rep.stable = decrements_shrink(rep.rows);
    return rep;
}

std::vector<ProbeRow> sharpness_probe(const Symbol& a, const SymbolClassParams& p, const std::vector<double>& s_list,
                                      const std::vector<double>& cutoffs) {
    p.validate(false);
    const double s_thm = p.sobolev_index();
    const double s_conj = 0.5 * (p.m - (p.rho - p.delta));
    std::vector<double> ss = s_list;
    for (double v : {s_thm, s_conj})
        if (std::none_of(ss.begin(), ss.end(), [v](double t) { return std::abs(t - v) < 1e-12; })) ss.push_back(v);
    std::vector<ProbeRow> out;
    for (double s : ss) {
        ProbeRow r;
        r.s = s;
        r.label = std::abs(s - s_thm) < 1e-12 ? "theorem" : (std::abs(s - s_conj) < 1e-12 ? "conjectured" : "extra");
        r.rows = lambda_sweep(a, s, cutoffs);
        const double first = std::abs(r.rows.front().lambda_min), last = std::abs(r.rows.back().lambda_min);
        r.divergent = r.rows.back().lambda_min < 0 && last >= 2 * first && last > 1e-12;
        r.bounded = !r.divergent && decrements_shrink(r.rows);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<ExponentRow> exponent_table(const SymbolClassParams& p) {
    p.validate(false);
    const double m = p.m, k = p.kappa, gap = p.rho / k - p.delta;
    const bool window = p.delta < p.rho / k;
    std::vector<ExponentRow> t;
    t.push_back({"theorem", p.sobolev_index(), p.delta < p.rho / (2 * k - 1), true, false});
    t.push_back({"consequence 1", 0.5 * (k * m - gap), window && m > gap && gap > 0, true, false});
    t.push_back({"consequence 2", 0.5 * (m - gap), window && m > 0 && m <= gap, true, false});
    t.push_back({"consequence 3", 0.5 * (m / k - gap), window && m <= 0, true, false});
    t.push_back({"conjecture", 0.5 * (m - (p.rho - p.delta)), true, false, false});
    // smallest proved index wins; ties go to the theorem, listed first
    int best = -1;
    for (int i = 0; i < int(t.size()); ++i)
        if (t[i].applicable && t[i].proved && (best < 0 || t[i].index < t[best].index - 1e-12)) best = i;
    if (best >= 0) t[best].strongest = true;
    return t;
}

}  // namespace garding
