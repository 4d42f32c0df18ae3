#include "garding/serialize.hpp"

#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "garding/errors.hpp"

namespace garding {

namespace fs = std::filesystem;

namespace {

Json complex_pair(cd v) { return Json::array({v.real(), v.imag()}); }

cd pair_value(const Json& j) {
    if (!j.is_array() || j.size() != 2) throw ConfigError("expected a [re, im] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

Json duals_json(const std::vector<DualIndex>& duals) {
    Json a = Json::array();
    for (const auto& d : duals) a.push_back(to_json(d));
    return a;
}

std::vector<DualIndex> duals_from(const Json& j) {
    std::vector<DualIndex> out;
    for (const auto& e : j) out.push_back(dual_from_json(e));
    return out;
}

Json point_json(const GroupPoint& x) { return Json(x.c); }

// null for non-finite values keeps the output valid JSON
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

Json to_json(const GroupDescriptor& g) {
    Json j;
    j["kind"] = g.kind == GroupKind::SU2 ? "su2" : "torus";
    if (g.kind == GroupKind::Torus) j["n"] = g.n;
    return j;
}

GroupDescriptor group_from_json(const Json& j) {
    const std::string k = j.at("kind").get<std::string>();
    if (k == "su2") return GroupDescriptor::su2();
    if (k == "torus") return GroupDescriptor::torus(j.at("n").get<int>());
    throw ConfigError("unknown group kind '" + k + "'");
}

Json to_json(const DualIndex& xi) {
    Json j;
    if (xi.kind == GroupKind::SU2)
        j["two_l"] = xi.two_l;
    else
        j["k"] = xi.k;
    return j;
}

DualIndex dual_from_json(const Json& j) {
    if (j.contains("two_l")) return DualIndex::spin(j["two_l"].get<int>());
    return DualIndex::torus(j.at("k").get<std::vector<int>>());
}

Json to_json(const SymbolClassParams& p) {
    return Json{{"m", p.m}, {"rho", p.rho}, {"delta", p.delta}, {"kappa", p.kappa}};
}

SymbolClassParams params_from_json(const Json& j) {
    return SymbolClassParams{j.at("m").get<double>(), j.at("rho").get<double>(), j.at("delta").get<double>(),
                             j.at("kappa").get<int>()};
}

Json to_json(const SampledTable& t) {
    Json j;
    j["format"] = "garding-symbol-v1";
    j["name"] = t.name;
    j["provenance"] = t.provenance;
    j["group"] = to_json(t.group);
    j["params"] = to_json(t.params);
    j["grid"] = Json{{"degree", t.degree}, {"nodes", t.values.empty() ? 0 : t.values.front().size()}};
    Json entries = Json::array();
    for (std::size_t k = 0; k < t.duals.size(); ++k) {
        Json e;
        e["xi"] = to_json(t.duals[k]);
        Json vals = Json::array();
        for (const auto& M : t.values[k]) {
            Json m = Json::array();
            for (int r = 0; r < M.rows(); ++r)
                for (int c = 0; c < M.cols(); ++c) m.push_back(complex_pair(M(r, c)));
            vals.push_back(std::move(m));
        }
        e["values"] = std::move(vals);
        entries.push_back(std::move(e));
    }
    j["entries"] = std::move(entries);
    return j;
}

SampledTable sampled_table_from_json(const Json& j) {
    try {
        if (j.value("format", "") != "garding-symbol-v1") throw ConfigError("not a symbol file");
        SampledTable t;
        t.name = j.at("name").get<std::string>();
        t.provenance = j.at("provenance").get<std::string>();
        t.group = group_from_json(j.at("group"));
        t.params = params_from_json(j.at("params"));
        t.degree = j.at("grid").at("degree").get<double>();
        const std::size_t nodes = j.at("grid").at("nodes").get<std::size_t>();
        for (const auto& e : j.at("entries")) {
            const DualIndex xi = dual_from_json(e.at("xi"));
            const int d = xi.dim();
            std::vector<Eigen::MatrixXcd> vals;
            for (const auto& m : e.at("values")) {
                if (m.size() != std::size_t(d * d)) throw ConfigError("symbol block of the wrong size at " + xi.label());
                Eigen::MatrixXcd M(d, d);
                for (int r = 0; r < d; ++r)
                    for (int c = 0; c < d; ++c) M(r, c) = pair_value(m[r * d + c]);
                vals.push_back(std::move(M));
            }
            if (vals.size() != nodes) throw ConfigError("symbol entry " + xi.label() + " has the wrong node count");
            t.duals.push_back(xi);
            t.values.push_back(std::move(vals));
        }
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed symbol file: ") + e.what());
    }
}

void save_symbol(const std::string& path, const Symbol& a, double grid_degree, double cutoff) {
    const QuadratureRule rule = haar_quadrature(a.group, grid_degree);
    SampledTable t = sample_symbol(a, rule, enumerate_dual(a.group, cutoff));
    write_atomic(path, to_json(t).dump(1) + "\n");
}

Symbol load_symbol(const std::string& path) {
    Json j;
    try {
        j = Json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cannot parse symbol file " + path + ": " + e.what());
    }
    return symbol_from_samples(std::make_shared<const SampledTable>(sampled_table_from_json(j)));
}

Json to_json(const OperatorMatrix& A, bool with_entries) {
    Json j;
    j["format"] = "garding-operator-v1";
    j["group"] = to_json(A.group);
    j["cutoff"] = A.cutoff;
    j["quad_degree"] = A.quad_degree;
    j["provenance"] = A.provenance;
    j["rows"] = duals_json(A.rows.duals);
    j["cols"] = duals_json(A.cols.duals);
    j["shape"] = {A.M.rows(), A.M.cols()};
    if (with_entries) {
        Json e = Json::array();
        for (int r = 0; r < A.M.rows(); ++r)
            for (int c = 0; c < A.M.cols(); ++c) e.push_back(complex_pair(A.M(r, c)));
        j["entries"] = std::move(e);
    }
    return j;
}

OperatorMatrix operator_from_json(const Json& j) {
    try {
        OperatorMatrix A;
        A.group = group_from_json(j.at("group"));
        A.cutoff = j.at("cutoff").get<double>();
        A.quad_degree = j.at("quad_degree").get<double>();
        A.provenance = j.at("provenance").get<std::string>();
        A.rows = BasisLayout(duals_from(j.at("rows")));
        A.cols = BasisLayout(duals_from(j.at("cols")));
        const auto& e = j.at("entries");
        if (e.size() != std::size_t(A.rows.size) * std::size_t(A.cols.size)) throw ConfigError("operator entry count mismatch");
        A.M.resize(A.rows.size, A.cols.size);
        std::size_t t = 0;
        for (int r = 0; r < A.rows.size; ++r)
            for (int c = 0; c < A.cols.size; ++c) A.M(r, c) = pair_value(e[t++]);
        return A;
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError(std::string("malformed operator file: ") + ex.what());
    }
}

Json to_json(const SweepRow& r) {
    return Json{{"cutoff", r.cutoff}, {"interior_size", r.interior_size}, {"lambda_min", number(r.lambda_min)}};
}

Json to_json(const NonnegativityScan& s) {
    Json j{{"ok", s.ok}, {"min_eigenvalue", number(s.min_eig)}};
    if (!s.ok) {
        j["x"] = point_json(s.x);
        j["xi"] = to_json(s.xi);
    }
    return j;
}

Json to_json(const GardingReport& r) {
    Json j;
    j["symbol"] = r.symbol;
    j["group"] = to_json(r.group);
    j["params"] = to_json(r.params);
    j["theta"] = r.theta;
    j["s"] = r.s;
    Json rows = Json::array();
    for (const auto& row : r.rows) rows.push_back(to_json(row));
    j["rows"] = std::move(rows);
    j["C_estimate"] = number(r.C_estimate);
    j["stable"] = r.stable;
    j["positivity"] = r.positivity ? Json(*r.positivity) : Json(nullptr);
    j["remainder"] = r.remainder ? Json(*r.remainder) : Json(nullptr);
    j["nonnegativity"] = to_json(r.witness);
    if (r.rejected) j["rejection"] = r.rejection;
    j["verdict"] = r.verdict();
    return j;
}

Json to_json(const RemainderReport& r) {
    Json rows = Json::array();
    for (const auto& row : r.rows)
        rows.push_back(Json{{"cutoff", row.cutoff}, {"total", number(row.total)}, {"diagonal", number(row.diagonal)}});
    return Json{{"s", r.s},
                {"rows", std::move(rows)},
                {"total_variation", number(r.total_variation)},
                {"diagonal_variation", number(r.diagonal_variation)},
                {"dual_sum", Json{{"reached_degree", r.friedrichs.reached_degree},
                                  {"last_tail", number(r.friedrichs.last_tail)},
                                  {"capped", r.friedrichs.capped},
                                  {"duals", r.friedrichs.duals_summed}}},
                {"pass", r.pass}};
}

Json to_json(const PositivityVerdict& v) {
    return Json{{"lambda_min", number(v.lambda_min)}, {"norm", number(v.norm)}, {"tol", v.tol}, {"pass", v.pass}};
}

Json to_json(const ManifestCheck& m) {
    Json form = Json::array(), man = Json::array();
    for (double f : m.form) form.push_back(number(f));
    for (double f : m.manifest) man.push_back(number(f));
    return Json{{"form", std::move(form)},
                {"manifest", std::move(man)},
                {"max_rel_diff", number(m.max_rel_diff)},
                {"pass", m.pass}};
}

Json to_json(const ProbeRow& r) {
    Json rows = Json::array();
    for (const auto& row : r.rows) rows.push_back(to_json(row));
    return Json{{"s", r.s}, {"label", r.label}, {"rows", std::move(rows)}, {"bounded", r.bounded}, {"divergent", r.divergent}};
}

Json to_json(const std::vector<ExponentRow>& t) {
    Json a = Json::array();
    for (const auto& r : t)
        a.push_back(Json{{"route", r.route},
                         {"index", r.index},
                         {"applicable", r.applicable},
                         {"proved", r.proved},
                         {"strongest", r.strongest}});
    return a;
}

Json to_json(const ClassFitReport& r) {
    Json entries = Json::array();
    for (const auto& e : r.entries)
        entries.push_back(Json{{"alpha", e.alpha},
                               {"beta", e.beta},
                               {"left", number(e.left)},
                               {"right", number(e.right)},
                               {"slope", number(e.slope)},
                               {"vanishes", e.vanishes},
                               {"consistent", e.consistent}});
    return Json{{"params", to_json(r.params)},
                {"fitted_order", number(r.fitted_order)},
                {"consistent", r.consistent},
                {"entries", std::move(entries)}};
}

Json to_json(const InclusionReport& r) {
    Json h = Json::array(), f = Json::array();
    for (double v : r.seminorms_half) h.push_back(number(v));
    for (double v : r.seminorms_full) f.push_back(number(v));
    return Json{{"seminorms_half", std::move(h)},
                {"seminorms_full", std::move(f)},
                {"worst_growth", number(r.worst_growth)},
                {"pass", r.pass}};
}

Json to_json(const CheckResult& r) {
    return Json{{"name", r.name}, {"value", number(r.value)}, {"tol", number(r.tol)}, {"pass", r.pass}, {"detail", r.detail}};
}

std::string report_csv(const GardingReport& r) {
    std::string out = fmt::format("# schema {}\n", kCsvSchema);
    out += "cutoff,lambda_min,s,theta,C_estimate,verdict\n";
    const std::string verdict = r.verdict();
    for (const auto& row : r.rows)
        out += fmt::format("{},{},{},{},{},{}\n", format_double(row.cutoff), format_double(row.lambda_min), format_double(r.s),
                           format_double(r.theta), format_double(r.C_estimate), verdict);
    return out;
}

void write_atomic(const std::string& path, const std::string& content) {
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + tmp.string());
        f << content;
        f.flush();
        if (!f) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace garding
