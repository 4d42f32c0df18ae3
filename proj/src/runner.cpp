#include "garding/runner.hpp"

#include <chrono>
#include <filesystem>

#include "garding/errors.hpp"
#include "garding/serialize.hpp"

namespace garding {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Eigen::MatrixXcd eye(const DualIndex& xi) { return Eigen::MatrixXcd::Identity(xi.dim(), xi.dim()); }

// c0 + c1 cos x_1 on any torus
XFunction torus_cosine(const GroupDescriptor& g, double c0, double c1) {
    std::vector<int> zero(g.n, 0), plus = zero, minus = zero;
    plus[0] = 1;
    minus[0] = -1;
    XFunction f{g, {}};
    f.terms.push_back({XMode{DualIndex::torus(minus), 0, 0}, 0.5 * c1});
    if (c0 != 0) f.terms.push_back({XMode{DualIndex::torus(zero), 0, 0}, c0});
    f.terms.push_back({XMode{DualIndex::torus(plus), 0, 0}, 0.5 * c1});
    return f;
}

Symbol builtin_symbol(const ExperimentConfig& c, const GroupDescriptor& g) {
    const double e = c.order < 0 ? c.params.m : c.order;
    const std::string& s = c.symbol;
    if (g.kind == GroupKind::Torus) {
        auto ell = [e](const DualIndex& xi) { return elliptic_power(xi, e); };
        if (s == "one") return Symbol::multiplier(g, eye, "one");
        if (s == "elliptic") return Symbol::multiplier(g, ell, "<xi>^" + format_double(e));
        if (s == "cos-elliptic") return Symbol::product(torus_cosine(g, 0.5, 0.5), ell, "(1+cos x)/2 <xi>^" + format_double(e));
        if (s == "control") return Symbol::product(torus_cosine(g, 0, 1), ell, "cos x <xi>^" + format_double(e));
        if (s == "random") {
            if (g.n != 1) throw ConfigError("the random family lives on torus1");
            std::mt19937 rng(c.seed);
            return random_torus_symbol(rng);
        }
    } else {
        auto sub = [g, e](const DualIndex& xi) { return weight_power(g, xi, e); };
        const XFunction half{g, {{XMode{DualIndex::spin(0), 0, 0}, 0.5}, {XMode{DualIndex::spin(2), 0, 0}, 0.5}}};
        if (s == "identity") return Symbol::multiplier(g, eye, "I");
        if (s == "subelliptic") return Symbol::multiplier(g, sub, "M^" + format_double(e));
        if (s == "cos2-subelliptic") return Symbol::product(half, sub, "cos^2(b/2) M^" + format_double(e));
        if (s == "weighted-laplacian") return weighted_laplacian_symbol();
        if (s == "mixed") return nonnegative_suite(g)[3];
    }
    throw ConfigError("unknown symbol family '" + s + "' on " + g.name());
}

double manifest_degree(const ExperimentConfig& c, const GroupDescriptor& g) {
    if (c.manifest_cutoff > 0) return c.manifest_cutoff;
    return g.kind == GroupKind::SU2 ? 2 : 9;
}

FriedrichsOptions sweep_options(const ExperimentConfig& c) {
    FriedrichsOptions o;
    o.tail_tol = c.tail_tol;
    o.max_degree = c.max_degree;
    return o;
}

FriedrichsOptions manifest_options(const ExperimentConfig& c, const GroupDescriptor& g) {
    FriedrichsOptions o = sweep_options(c);
    o.max_degree = c.manifest_max_degree > 0 ? c.manifest_max_degree : (g.kind == GroupKind::SU2 ? 10 : 200);
    return o;
}

// Report files for one command; timings go to a sidecar so the reports stay reproducible.
class Output {
public:
    Output(const ExperimentConfig& c, std::string command) : c_(c), command_(std::move(command)) {}

    Json header() const {
        return Json{{"command", command_}, {"version", GARDING_VERSION}, {"config_hash", c_.hash()}, {"config", c_.canonical()}};
    }
    void json(const std::string& name, const Json& body, RunResult& r) {
        if (!c_.json) return;
        Json j = header();
        for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
        write(name, j.dump(2) + "\n", r);
    }
    void csv(const std::string& name, const std::string& text, RunResult& r) {
        if (c_.csv) write(name, text, r);
    }
    void stage(const std::string& name, double seconds, RunResult& r, const std::string& line) {
        timing_[name] = seconds;
        r.summary += line + "\n";
    }
    void finish(RunResult& r) {
        Json t = Json{{"command", command_}, {"config_hash", c_.hash()}, {"seconds", timing_}};
        write("timing.json", t.dump(2) + "\n", r);
    }

private:
    void write(const std::string& name, const std::string& text, RunResult& r) {
        const std::string path = (std::filesystem::path(c_.out_dir) / name).string();
        write_atomic(path, text);
        r.files.push_back(path);
    }
    const ExperimentConfig& c_;
    std::string command_;
    Json timing_ = Json::object();
};

std::string pass_word(bool b) { return b ? "PASS" : "FAIL"; }

}  // namespace

Symbol make_symbol(const ExperimentConfig& c) {
    const GroupDescriptor g = c.group_descriptor();
    Symbol a = c.symbol_file.empty() ? builtin_symbol(c, g) : load_symbol(c.symbol_file);
    if (!(a.group == g)) throw ConfigError("symbol lives on " + a.group.name() + ", config names " + g.name());
    a.params = c.params;
    return a;
}

WeightFunction make_weight(const ExperimentConfig& c) {
    BumpProfile phi;
    phi.r = c.radius;
    return build_weight(c.group_descriptor(), c.params.rho, c.params.delta, c.params.kappa, phi);
}

RunResult cmd_selftest(const ExperimentConfig& c) {
    RunResult r;
    Output out(c, "selftest");
    const GroupDescriptor g = c.group_descriptor();
    const double degree = c.selftest_degree > 0 ? c.selftest_degree : default_selftest_degree(g);
    const double quad = c.quad_degree > 0 ? c.quad_degree : gram_quadrature_degree(g, degree);
    const auto t0 = Clock::now();
    const auto checks = selftest_suite(g, degree, quad, c.seed);
    bool ok = true;
    Json arr = Json::array();
    std::string csv = "# schema garding-selftest-v1\nname,value,tol,pass\n";
    for (const auto& k : checks) {
        ok = ok && k.pass;
        arr.push_back(to_json(k));
        csv += k.name + "," + format_double(k.value) + "," + format_double(k.tol) + "," + pass_word(k.pass) + "\n";
        out.stage(k.name, k.seconds, r, pass_word(k.pass) + "  " + k.name + "  " + format_double(k.value) + "  (" + k.detail + ")");
    }
    out.stage("total", seconds_since(t0), r, "");
    out.json("selftest.json",
             Json{{"group", to_json(g)}, {"degree", degree}, {"quad_degree", quad}, {"checks", arr}, {"pass", ok}}, r);
    out.csv("selftest.csv", csv, r);
    out.finish(r);
    r.exit_code = ok ? kExitOk : kExitVerification;
    return r;
}

RunResult cmd_garding(const ExperimentConfig& c) {
    RunResult r;
    Output out(c, "garding");
    const Symbol a = make_symbol(c);
    const SymbolClassParams& p = c.params;
    p.validate(true);
    const GroupDescriptor g = a.group;

    auto t0 = Clock::now();
    GardingReport rep = garding_verify(a, p, c.cutoffs);
    out.stage("garding_verify", seconds_since(t0), r,
              "sweep: " + rep.verdict() + (rep.rejected ? " (" + rep.rejection + ")" : ""));

    Json body;
    if (!rep.rejected) {
        const WeightFunction w = make_weight(c);
        t0 = Clock::now();
        const RemainderReport rem = remainder_bounds(a, w, p, c.cutoffs, sweep_options(c));
        out.stage("remainder_bounds", seconds_since(t0), r, "remainder: " + pass_word(rem.pass));
        rep.remainder = rem.pass;

        t0 = Clock::now();
        const OperatorMatrix& P = rem.friedrichs.P.front();
        const double top = cutoff_for_degree(g, c.cutoffs.back());
        const OperatorMatrix Pin = P.restrict_to(interior_duals(P.cols.duals, top, a.x_band));
        const PositivityVerdict pos = positivity_check(Pin, c.positivity_tol);
        const ManifestCheck man = manifest_form_check(a, w, cutoff_for_degree(g, manifest_degree(c, g)), c.manifest_vectors,
                                                      c.seed, manifest_options(c, g));
        out.stage("positivity", seconds_since(t0), r,
                  "positivity: " + pass_word(pos.pass) + ", form cross-check: " + pass_word(man.pass));
        rep.positivity = pos.pass && man.pass;
        body["positivity"] = to_json(pos);
        body["manifest_check"] = to_json(man);
        body["remainder"] = to_json(rem);
    }

    t0 = Clock::now();
    const auto probe = sharpness_probe(a, p, c.probe_s, c.cutoffs);
    Json pj = Json::array();
    for (const auto& row : probe) pj.push_back(to_json(row));
    out.stage("sharpness_probe", seconds_since(t0), r, "probe: " + std::to_string(probe.size()) + " indices");

    Json j;
    j["report"] = to_json(rep);
    for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
    j["sharpness_probe"] = std::move(pj);
    j["exponent_table"] = to_json(exponent_table(p));
    out.json("garding.json", j, r);
    out.csv("garding.csv", report_csv(rep), r);
    out.finish(r);
    r.summary += "verdict: " + rep.verdict() + "\n";
    r.exit_code = rep.pass() ? kExitOk : kExitVerification;
    return r;
}

RunResult cmd_symbol_class(const ExperimentConfig& c) {
    RunResult r;
    Output out(c, "symbol-class");
    const Symbol a = make_symbol(c);
    const GroupDescriptor g = a.group;
    const double top = cutoff_for_degree(g, c.cutoffs.back());
    const auto duals = enumerate_dual(g, top * (1 + 1e-12));

    auto t0 = Clock::now();
    const ClassFitReport fit = class_fit(a, c.params, c.max_order, duals);
    out.stage("class_fit", seconds_since(t0), r,
              "class fit: " + pass_word(fit.consistent) + ", fitted order " + format_double(fit.fitted_order));
    t0 = Clock::now();
    const InclusionReport inc = class_inclusion_check(a, c.params.m, c.params, c.max_order, duals);
    out.stage("class_inclusion", seconds_since(t0), r, "inclusion: " + pass_word(inc.pass));
    const auto table = exponent_table(c.params);
    for (const auto& row : table)
        if (row.strongest) r.summary += "strongest proved index: " + row.route + " " + format_double(row.index) + "\n";

    out.json("symbol_class.json",
             Json{{"symbol", a.name},
                  {"group", to_json(g)},
                  {"class_fit", to_json(fit)},
                  {"inclusion", to_json(inc)},
                  {"exponent_table", to_json(table)}},
             r);
    if (c.json && c.symbol_file.empty()) {
        const std::string path = (std::filesystem::path(c.out_dir) / "symbol.json").string();
        save_symbol(path, a, std::max(1.0, symbol_grid(a).degree), top * (1 + 1e-12));
        r.files.push_back(path);
    }
    out.finish(r);
    r.exit_code = fit.consistent && inc.pass ? kExitOk : kExitVerification;
    return r;
}

RunResult cmd_friedrichs(const ExperimentConfig& c) {
    RunResult r;
    Output out(c, "friedrichs");
    const Symbol a = make_symbol(c);
    const GroupDescriptor g = a.group;
    const WeightFunction w = make_weight(c);
    const double top = cutoff_for_degree(g, c.cutoffs.back());

    auto t0 = Clock::now();
    const FriedrichsResult fr = friedrichs_operators({a}, w, top, sweep_options(c));
    const OperatorMatrix& P = fr.P.front();
    out.stage("assembly", seconds_since(t0), r,
              "P: " + std::to_string(P.rows.size) + " basis functions, dual sum to degree " + format_double(fr.reached_degree) +
                  (fr.capped ? " (capped)" : ""));
    t0 = Clock::now();
    const OperatorMatrix Pin = P.restrict_to(interior_duals(P.cols.duals, top, a.x_band));
    const PositivityVerdict pos = positivity_check(Pin, c.positivity_tol);
    const ManifestCheck man = manifest_form_check(a, w, cutoff_for_degree(g, manifest_degree(c, g)), c.manifest_vectors, c.seed,
                                                  manifest_options(c, g));
    out.stage("positivity", seconds_since(t0), r,
              "positivity: " + pass_word(pos.pass) + " (lambda_min " + format_double(pos.lambda_min) +
                  "), form cross-check: " + pass_word(man.pass));

    out.json("friedrichs.json",
             Json{{"symbol", a.name},
                  {"group", to_json(g)},
                  {"params", to_json(c.params)},
                  {"weight", Json{{"radius", w.phi.r}, {"profile", w.phi.id}, {"C0", w.C0}}},
                  {"dual_sum", Json{{"reached_degree", fr.reached_degree},
                                    {"last_tail", fr.last_tail},
                                    {"capped", fr.capped},
                                    {"duals", fr.duals_summed}}},
                  {"interior_size", Pin.rows.size},
                  {"positivity", to_json(pos)},
                  {"manifest_check", to_json(man)},
                  {"operator", to_json(P, c.export_matrix)}},
             r);
    out.finish(r);
    r.exit_code = pos.pass && man.pass ? kExitOk : kExitVerification;
    return r;
}

int run_command(const std::string& command, const std::string& config_path, const RunOverrides& ov, std::ostream& log) {
    ExperimentConfig c;
    bool have_config = false;
    auto record = [&](const std::string& kind, const std::string& msg, int code) {
        log << "error (" << kind << "): " << msg << "\n";
        const std::string dir = ov.out_dir ? *ov.out_dir : (have_config ? c.out_dir : std::string());
        if (!dir.empty()) {
            try {
                Json j{{"command", command}, {"version", GARDING_VERSION}};
                if (have_config) j["config_hash"] = c.hash();
                j["error"] = Json{{"kind", kind}, {"message", msg}, {"exit_code", code}};
                write_atomic((std::filesystem::path(dir) / "error.json").string(), j.dump(2) + "\n");
            } catch (const std::exception&) {
                // the diagnostic on the log is all that is left
            }
        }
        return code;
    };
    try {
        c = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
        if (ov.out_dir) c.out_dir = *ov.out_dir;
        if (ov.cutoffs) c.cutoffs = *ov.cutoffs;
        if (ov.seed) c.seed = *ov.seed;
        if (ov.json_only || ov.csv_only) {
            c.json = ov.json_only;
            c.csv = ov.csv_only;
        }
        c.validate();
        have_config = true;
        RunResult r;
        if (command == "selftest")
            r = cmd_selftest(c);
        else if (command == "garding")
            r = cmd_garding(c);
        else if (command == "symbol-class")
            r = cmd_symbol_class(c);
        else if (command == "friedrichs")
            r = cmd_friedrichs(c);
        else
            throw ConfigError("unknown command '" + command + "'");
        log << r.summary;
        for (const auto& f : r.files) log << "wrote " << f << "\n";
        return r.exit_code;
    } catch (const ConfigError& e) {
        return record("configuration", e.what(), kExitConfig);
    } catch (const AliasingError& e) {
        return record("resolution", e.what(), kExitResolution);
    } catch (const DomainError& e) {
        return record("resolution", e.what(), kExitResolution);
    } catch (const VerificationError& e) {
        return record("verification", e.what(), kExitVerification);
    } catch (const std::exception& e) {
        return record("runtime", e.what(), kExitOther);
    }
}

}  // namespace garding
