// End-to-end acceptance run: one line per criterion, nonzero exit if any fails.
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "garding/config.hpp"
#include "garding/errors.hpp"
#include "garding/garding.hpp"
#include "garding/runner.hpp"
#include "garding/selftest.hpp"
#include "garding/serialize.hpp"

using namespace garding;
using std::numbers::pi;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + what;
        }
    }
    void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

struct Criterion {
    int id;
    std::string name;
    double budget;  // seconds; 0 = none
    std::function<void(Outcome&)> run;
};

template <class F>
double simpson(F&& f, double a, double b, int panels) {
    const double h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int i = 1; i < panels; ++i) s += (i % 2 ? 4 : 2) * f(a + i * h);
    return s * h / 3;
}

// Gauss-Legendre box of half-width R in exponential coordinates, Haar probability measure.
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

std::string sci(double v) { return fmt::format("{:.2e}", v); }

void check_results(Outcome& o, const std::vector<CheckResult>& rs, const std::string& tag) {
    for (const auto& r : rs) {
        o.require(r.pass && r.value <= r.tol, tag + " " + r.name + " " + sci(r.value));
        o.note(tag + " " + r.name + " " + sci(r.value));
    }
}

// 1. Peter-Weyl orthogonality, round trip and Parseval on T^1 (|k| <= 32) and SU(2) (l <= 7).
void check_harmonic(Outcome& o) {
    for (const auto& [g, degree] : {std::pair{GroupDescriptor::torus(1), 32.0}, std::pair{GroupDescriptor::su2(), 7.0}}) {
        const double q = gram_quadrature_degree(g, degree);
        std::vector<CheckResult> rs{peter_weyl_check(g, degree, q)};
        for (auto& r : round_trip_checks(g, degree, q, 7)) rs.push_back(r);
        o.require(rs[0].tol <= 1e-12 && rs[1].tol <= 1e-10 && rs[2].tol <= 1e-10, "tolerances");
        check_results(o, rs, g.name());
    }
}

// 2. Laplacian spectra and the SU(2) sub-Laplacian diagonal.
void check_spectra(Outcome& o) {
    check_results(o, {laplacian_spectrum_check(GroupDescriptor::torus(1), 32)}, "torus(1)");
    check_results(o, {laplacian_spectrum_check(GroupDescriptor::su2(), 7)}, "su2");
    check_results(o, {sublaplacian_check(14)}, "su2");
    // closed form l(l+1) - m^2 for the two-field sub-Laplacian
    const auto g = GroupDescriptor::su2();
    double worst = 0;
    for (int tl = 0; tl <= 14; ++tl) {
        const SubellipticWeight w = sublaplacian_symbol(g, DualIndex::spin(tl));
        std::vector<double> got(w.nu2.data(), w.nu2.data() + w.nu2.size()), want;
        const double l = 0.5 * tl;
        for (int i = 0; i <= tl; ++i) {
            const double m = 0.5 * (2 * i - tl);
            want.push_back(l * (l + 1) - m * m);
        }
        std::sort(got.begin(), got.end());
        std::sort(want.begin(), want.end());
        for (std::size_t i = 0; i < want.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
    }
    o.require(worst <= 1e-8, "closed-form sub-Laplacian " + sci(worst));
    o.note("closed-form sub-Laplacian " + sci(worst));
}

// 3. <xi>^{1/2} <= c (1 + nu^2)^{1/2} <= c' <xi> for l <= 10.
void check_comparison(Outcome& o) {
    const auto g = GroupDescriptor::su2();
    const CheckResult r = weight_comparison_run(g, 10);
    o.require(r.pass, "library check");
    // oracle constants from the closed-form spectrum
    double lo = INFINITY, hi = 0;
    for (int tl = 0; tl <= 20; ++tl) {
        const double l = 0.5 * tl, br = std::sqrt(1 + l * (l + 1));
        for (int i = 0; i <= tl; ++i) {
            const double m = 0.5 * (2 * i - tl), mu = std::sqrt(1 + l * (l + 1) - m * m);
            lo = std::min(lo, mu / std::sqrt(br));
            hi = std::max(hi, mu / br);
        }
    }
    const WeightComparison w = weight_comparison_check(g, enumerate_dual(g, su2_cutoff(10)));
    o.require(std::isfinite(w.c1) && std::isfinite(w.c2) && w.c1 > 0, "finite constants");
    o.require(std::abs(w.c1 - lo) <= 1e-12 && std::abs(w.c2 - hi) <= 1e-12,
              fmt::format("oracle constants {} {} vs {} {}", w.c1, w.c2, lo, hi));
    o.note(fmt::format("c = {:.6f}, c' = {:.6f}", w.c1, w.c2));
}

// 4. First-order Leibniz identity on 20 random pairs.
void check_leibniz(Outcome& o) {
    const CheckResult r = leibniz_random_check(20, 2024);
    o.require(r.pass && r.value <= 1e-12, "residual " + sci(r.value));
    o.note("residual " + sci(r.value));
}

// 5. ||w_xi|| = 1 for <xi> near 2, 8, 32, parity, centrality and support.
void check_weight_normalization(Outcome& o) {
    const auto t = GroupDescriptor::torus(1);
    double worst_t = 0, worst_s = 0, worst_inv = 0;
    for (auto [rho, delta] : {std::pair{1.0, 0.0}, std::pair{0.5, 0.25}}) {
        const auto w = build_weight(t, rho, delta, 1);
        for (int k : {2, 8, 32}) {
            const DualIndex xi = DualIndex::torus({k});
            const double R = w.support_radius(xi);
            const double direct = simpson(
                [&](double x) {
                    const double v = w(GroupPoint{{x}}, xi);
                    return v * v;
                },
                -R, R, 40000) / (2 * pi);
            worst_t = std::max(worst_t, std::abs(direct - 1));
        }
    }
    const auto g = GroupDescriptor::su2();
    for (int kappa : {1, 2}) {
        const auto w = build_weight(g, 1, 0, kappa);
        for (int tl : {3, 15, 63}) {
            const DualIndex xi = DualIndex::spin(tl);
            const double cart = local_integral(g, w.support_radius(xi), 40, [&](const GroupPoint& x) {
                const double v = w(x, xi);
                return v * v;
            });
            worst_s = std::max(worst_s, std::abs(cart - 1));
        }
    }
    o.require(worst_t <= 1e-6, "torus normalization " + sci(worst_t));
    o.require(worst_s <= 1e-4, "su2 normalization " + sci(worst_s));

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> U(-1, 1);
    bool support_ok = true;
    for (const auto& grp : {t, GroupDescriptor::torus(2), g}) {
        const auto w = build_weight(grp, 1, 0, grp.kind == GroupKind::SU2 ? 2 : 1);
        const std::vector<DualIndex> duals =
            grp.kind == GroupKind::SU2 ? std::vector{DualIndex::spin(3), DualIndex::spin(15), DualIndex::spin(63)}
            : grp.n == 1 ? std::vector{DualIndex::torus({2}), DualIndex::torus({8}), DualIndex::torus({32})}
                         : std::vector{DualIndex::torus({2, 1}), DualIndex::torus({8, 1}), DualIndex::torus({32, 1})};
        for (const auto& xi : duals) {
            const double R = w.support_radius(xi), top = w.at_identity(xi);
            for (int s = 0; s < 200; ++s) {
                LieAlgebraVector Y, Z;
                for (int k = 0; k < grp.algebra_dim(); ++k) {
                    Y.c.push_back(1.2 * R * U(rng));
                    Z.c.push_back(pi * U(rng));
                }
                const GroupPoint x = exp_map(grp, Y), y = exp_map(grp, Z);
                const double v = w(x, xi);
                worst_inv = std::max(worst_inv, std::abs(v - w(inverse(grp, x), xi)) / top);
                worst_inv = std::max(worst_inv, std::abs(v - w(multiply(grp, multiply(grp, y, x), inverse(grp, y)), xi)) / top);
                if (Y.central_norm() >= R * (1 + 1e-12) && v != 0.0) support_ok = false;
            }
        }
    }
    o.require(worst_inv <= 1e-12, "parity/centrality " + sci(worst_inv));
    o.require(support_ok, "support radius");
    o.note(fmt::format("normalization torus {} su2 {}, invariants {}", sci(worst_t), sci(worst_s), sci(worst_inv)));
}

struct Backend {
    GroupDescriptor g;
    std::vector<double> cutoffs;  // remainder sweep
    double positivity_degree;
    double manifest_degree, manifest_cap;
};

const std::vector<Backend>& backends() {
    static const std::vector<Backend> b = {{GroupDescriptor::torus(1), {12, 18, 24, 32}, 32, 9, 200},
                                           {GroupDescriptor::su2(), {3, 5, 7}, 5, 2, 10}};
    return b;
}

WeightFunction suite_weight(const GroupDescriptor& g) { return build_weight(g, 1, 0, g.kind == GroupKind::SU2 ? 2 : 1); }

// 6. Positivity of P and the manifest quadratic form, for every suite symbol.
void check_positivity(Outcome& o) {
    for (const auto& b : backends()) {
        const auto suite = nonnegative_suite(b.g);
        const auto w = suite_weight(b.g);
        o.require(suite.size() >= 4, b.g.name() + " suite size");
        const double wc = cutoff_for_degree(b.g, b.positivity_degree);
        const FriedrichsResult fr = friedrichs_operators(suite, w, wc);
        FriedrichsOptions mopt;
        mopt.max_degree = b.manifest_cap;
        for (std::size_t i = 0; i < suite.size(); ++i) {
            const auto inner = interior_duals(fr.P[i].cols.duals, wc, suite[i].x_band);
            const PositivityVerdict v = positivity_check(fr.P[i].restrict_to(inner), 1e-6);
            o.require(v.pass, b.g.name() + " " + suite[i].name + " lambda_min " + sci(v.lambda_min));
            const ManifestCheck m =
                manifest_form_check(suite[i], w, cutoff_for_degree(b.g, b.manifest_degree), 5, 17, mopt, 1e-6);
            o.require(m.pass && m.max_rel_diff <= 1e-6, b.g.name() + " " + suite[i].name + " form " + sci(m.max_rel_diff));
            bool nonneg = true;
            for (double f : m.manifest) nonneg = nonneg && f >= 0;
            o.require(nonneg, b.g.name() + " " + suite[i].name + " manifest form negative");
        }
        o.note(fmt::format("{}: {} symbols", b.g.name(), suite.size()));
    }
}

// 7. ||M^-s (A - P) M^-s|| stable within 25% over the top three cutoffs.
void check_remainder(Outcome& o) {
    for (const auto& b : backends()) {
        const auto suite = nonnegative_suite(b.g);
        const auto w = suite_weight(b.g);
        const FriedrichsResult fr = friedrichs_operators(suite, w, cutoff_for_degree(b.g, b.cutoffs.back()));
        double worst = 0;
        for (std::size_t i = 0; i < suite.size(); ++i) {
            RemainderReport rep;
            rep.s = suite[i].params.sobolev_index();
            remainder_rows(rep, suite[i], w, b.cutoffs, fr.P[i]);
            o.require(rep.pass, fmt::format("{} {} variation {} / {}", b.g.name(), suite[i].name, sci(rep.total_variation),
                                            sci(rep.diagonal_variation)));
            worst = std::max({worst, rep.total_variation, rep.diagonal_variation});
        }
        o.note(b.g.name() + " worst variation " + sci(worst));
    }
}

std::string sweep_text(const std::vector<SweepRow>& rows) {
    std::string s;
    for (const auto& r : rows) s += (s.empty() ? "" : " ") + fmt::format("{:.4f}", r.lambda_min);
    return s;
}

// 8. Elliptic mode on T^1 for (rho, delta) in {(1, 0), (1/2, 1/4)} and m in {1, 2}.
void check_corollary(Outcome& o) {
    const auto g = GroupDescriptor::torus(1);
    for (auto [rho, delta] : {std::pair{1.0, 0.0}, std::pair{0.5, 0.25}})
        for (int m : {1, 2}) {
            const XFunction c{g,
                              {{XMode{DualIndex::torus({-1}), 0, 0}, 0.25},
                               {XMode{DualIndex::torus({0}), 0, 0}, 0.5},
                               {XMode{DualIndex::torus({1}), 0, 0}, 0.25}}};
            const Symbol a = Symbol::product(c, [m](const DualIndex& xi) { return elliptic_power(xi, m); }, "a");
            const GardingReport r = garding_verify(a, SymbolClassParams{double(m), rho, delta, 1}, {12, 18, 24, 32});
            o.require(!r.rejected && r.stable, fmt::format("({},{}) m={} sweep {}", rho, delta, m, sweep_text(r.rows)));
            o.note(fmt::format("({},{}) m={} C {:.4f}", rho, delta, m, r.C_estimate));
        }
}

// 9. Subelliptic mode on SU(2) at theta = 1/2 over l in {3, 5, 7}.
void check_theorem(Outcome& o) {
    const auto g = GroupDescriptor::su2();
    auto suite = nonnegative_suite(g);
    suite.push_back(weighted_laplacian_symbol());
    for (const auto& a : suite) {
        o.require(std::abs(a.params.theta() - 0.5) < 1e-15, a.name + " theta");
        const GardingReport r = garding_verify(a, a.params, {3, 5, 7});
        o.require(!r.rejected && r.stable, a.name + " sweep " + sweep_text(r.rows));
    }
    o.note(fmt::format("{} symbols including {}", suite.size(), suite.back().name));
}

// 10. cos x <xi>^2: lambda_min grows at least twofold from cutoff 8 to 32 and the gate rejects it.
void check_control(Outcome& o) {
    const Symbol a = sign_changing_control();
    const auto rows = lambda_sweep(a, 0.5, {8, 32});
    const double ratio = rows[1].lambda_min / rows[0].lambda_min;
    o.require(rows[0].lambda_min < 0 && ratio >= 2, "ratio " + fmt::format("{:.3f}", ratio));
    const GardingReport r = garding_verify(a, a.params, {8, 12, 18, 24, 32});
    o.require(r.rejected && r.witness.min_eig < 0, "gate");
    o.note(fmt::format("lambda_min {:.4f} -> {:.4f}, ratio {:.3f}, gate witness {:.3g}", rows[0].lambda_min,
                       rows[1].lambda_min, ratio, r.witness.min_eig));
}

// 11. Order-N difference expansion of e^{i(y - x)} <xi>^m: one order of decay per term.
void check_expansion(Outcome& o) {
    const auto t = GroupDescriptor::torus(1);
    const double m = 1.5;
    Amplitude p;
    p.group = t;
    p.params = {m, 1, 0, 1};
    p.name = "e^{i(y-x)}<xi>^m";
    p.terms.push_back({XFunction{t, {{XMode{DualIndex::torus({1}), 0, 0}, 1.0}}},
                       Symbol::product(XFunction{t, {{XMode{DualIndex::torus({-1}), 0, 0}, 1.0}}},
                                       [m](const DualIndex& xi) { return elliptic_power(xi, m); }, "a")});
    const ExpansionReport r0 = expansion_check(p, 0, 40), r1 = expansion_check(p, 1, 40);
    // closed form: the exact symbol is <xi + 1>^m
    auto br = [m](double k) { return std::pow(1 + k * k, m / 2); };
    double oracle = 0;
    for (std::size_t i = 0; i < r1.duals.size(); ++i) {
        const double k = r1.duals[i].k[0];
        oracle = std::max(oracle, std::abs(r0.residual[i] - std::abs(br(k + 1) - br(k))));
        oracle = std::max(oracle, std::abs(r1.residual[i] - std::abs(br(k + 1) - 2 * br(k) + br(k - 1))));
    }
    const double ratio = r0.residual_at_16 / r1.residual_at_16, gain = r0.fitted_exponent - r1.fitted_exponent;
    o.require(oracle <= 1e-9, "closed form " + sci(oracle));
    o.require(ratio >= 8, fmt::format("ratio {:.3f}", ratio));
    o.require(std::abs(gain - 1.0) <= 0.25, fmt::format("exponent gain {:.3f}", gain));
    o.note(fmt::format("ratio at 16 {:.3f}, exponents {:.3f} -> {:.3f}", ratio, r0.fitted_exponent, r1.fitted_exponent));
}

// 12. Two garding runs with one config give identical report files.
void check_determinism(Outcome& o) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / fmt::format("garding-acceptance-{}", ::getpid());
    fs::create_directories(dir);
    const fs::path cfg = dir / "run.ini";
    const fs::path out = dir / "out";
    std::ofstream(cfg) << "[experiment]\ngroup = torus1\nsymbol = cos-elliptic\n[sweep]\ncutoffs = 8, 12, 16\n"
                          "[output]\ndir = " << out.string() << "\n";
    std::map<std::string, std::string> first;
    for (int run = 0; run < 2; ++run) {
        std::ostringstream log;
        const int code = run_command("garding", cfg.string(), {}, log);
        o.require(code == kExitOk, fmt::format("run {} exit {}", run, code));
        for (const char* f : {"garding.json", "garding.csv"}) {
            const std::string body = read_file((out / f).string());
            if (run == 0)
                first[f] = body;
            else
                o.require(body == first[f], std::string(f) + " differs");
        }
    }
    o.note(fmt::format("{} + {} bytes identical", first["garding.json"].size(), first["garding.csv"].size()));
    fs::remove_all(dir);
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "harmonic analysis", 10, check_harmonic},
        {2, "spectra", 10, check_spectra},
        {3, "eigenvalue comparison", 1, check_comparison},
        {4, "leibniz rule", 5, check_leibniz},
        {5, "weight normalization", 10, check_weight_normalization},
        {6, "friedrichs positivity", 120, check_positivity},
        {7, "remainder boundedness", 180, check_remainder},
        {8, "corollary mode", 60, check_corollary},
        {9, "theorem mode", 300, check_theorem},
        {10, "negative control", 30, check_control},
        {11, "amplitude expansion", 30, check_expansion},
        {12, "determinism", 0, check_determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        const auto t0 = Clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        if (c.budget > 0) o.require(secs < c.budget, fmt::format("runtime over {} s", c.budget));
        failed += !o.pass;
        fmt::print("{} criterion {:>2} {:<22} {:8.2f}s  {}\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail);
        std::fflush(stdout);
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
    return failed ? 1 : 0;
}
