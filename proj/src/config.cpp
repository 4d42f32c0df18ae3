#include "garding/config.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <regex>
#include <sstream>

#include "garding/errors.hpp"
#include "garding/serialize.hpp"

namespace garding {

namespace {

struct Key {
    std::string section, name, help;
    std::function<std::string(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, const std::string&)> set;
};

double to_double(const std::string& v) {
    std::size_t used = 0;
    double d = 0;
    try {
        d = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size()) throw ConfigError("'" + v + "' is not a number");
    return d;
}

long to_long(const std::string& v) {
    const double d = to_double(v);
    if (d != std::floor(d)) throw ConfigError("'" + v + "' is not an integer");
    return long(d);
}

bool to_bool(const std::string& v) {
    const std::string s = boost::to_lower_copy(v);
    if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
    if (s == "false" || s == "no" || s == "0" || s == "off") return false;
    throw ConfigError("'" + v + "' is not a boolean");
}

std::string list_text(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_double(v[i]);
    return out;
}

std::string num(double v) { return format_double(v); }
std::string flag(bool b) { return b ? "true" : "false"; }

const std::vector<Key>& keys() {
    using C = ExperimentConfig;
    using S = const std::string&;
    static const std::vector<Key> k = {
        {"experiment", "group", "torus1, torus2, torus3 or su2", [](const C& c) { return c.group; },
         [](C& c, S v) { c.group = v; }},
        {"experiment", "symbol",
         "built-in family: one, elliptic, cos-elliptic, control, random (torus); identity, subelliptic, "
         "cos2-subelliptic, weighted-laplacian, mixed (su2)",
         [](const C& c) { return c.symbol; }, [](C& c, S v) { c.symbol = v; }},
        {"experiment", "symbol_file", "sampled symbol written by the symbol-class command; overrides symbol",
         [](const C& c) { return c.symbol_file; }, [](C& c, S v) { c.symbol_file = v; }},
        {"experiment", "order", "exponent of the family; negative uses m", [](const C& c) { return num(c.order); },
         [](C& c, S v) { c.order = to_double(v); }},
        {"experiment", "seed", "seed for random symbols and test vectors", [](const C& c) { return std::to_string(c.seed); },
         [](C& c, S v) {
             const long s = to_long(v);
             if (s < 0) throw ConfigError("seed must be nonnegative");
             c.seed = unsigned(s);
         }},
        {"class", "m", "order", [](const C& c) { return num(c.params.m); }, [](C& c, S v) { c.params.m = to_double(v); }},
        {"class", "rho", "type rho", [](const C& c) { return num(c.params.rho); },
         [](C& c, S v) { c.params.rho = to_double(v); }},
        {"class", "delta", "type delta", [](const C& c) { return num(c.params.delta); },
         [](C& c, S v) { c.params.delta = to_double(v); }},
        {"class", "kappa", "step of the sub-Laplacian (1 on the torus, 2 on su2)",
         [](const C& c) { return std::to_string(c.params.kappa); }, [](C& c, S v) { c.params.kappa = int(to_long(v)); }},
        {"sweep", "cutoffs", "degree cutoffs: |k| on the torus, l on su2", [](const C& c) { return list_text(c.cutoffs); },
         [](C& c, S v) { c.cutoffs = parse_list(v); }},
        {"sweep", "probe_s", "extra Sobolev indices for the sharpness probe", [](const C& c) { return list_text(c.probe_s); },
         [](C& c, S v) { c.probe_s = parse_list(v); }},
        {"sweep", "quad_degree", "self-test quadrature degree; 0 picks the smallest exact one",
         [](const C& c) { return num(c.quad_degree); }, [](C& c, S v) { c.quad_degree = to_double(v); }},
        {"sweep", "selftest_degree", "degree cutoff of the self-tests; 0 picks a default",
         [](const C& c) { return num(c.selftest_degree); }, [](C& c, S v) { c.selftest_degree = to_double(v); }},
        {"sweep", "max_order", "largest |alpha| + |beta| in class fits", [](const C& c) { return std::to_string(c.max_order); },
         [](C& c, S v) { c.max_order = int(to_long(v)); }},
        {"weight", "radius", "support radius r of the bump", [](const C& c) { return num(c.radius); },
         [](C& c, S v) { c.radius = to_double(v); }},
        {"weight", "profile", "bump profile id (exp-step)", [](const C& c) { return c.profile; },
         [](C& c, S v) { c.profile = v; }},
        {"friedrichs", "tail_tol", "relative size of the last summed degree shell", [](const C& c) { return num(c.tail_tol); },
         [](C& c, S v) { c.tail_tol = to_double(v); }},
        {"friedrichs", "max_degree", "cap on the summed degree; 0 picks a per-group default",
         [](const C& c) { return num(c.max_degree); }, [](C& c, S v) { c.max_degree = to_double(v); }},
        {"friedrichs", "positivity_tol", "slack relative to max(1, ||P||)", [](const C& c) { return num(c.positivity_tol); },
         [](C& c, S v) { c.positivity_tol = to_double(v); }},
        {"friedrichs", "manifest_vectors", "random vectors for the quadratic-form cross-check",
         [](const C& c) { return std::to_string(c.manifest_vectors); },
         [](C& c, S v) { c.manifest_vectors = int(to_long(v)); }},
        {"friedrichs", "manifest_cutoff", "degree cutoff of the cross-check; 0 picks 9 (torus) or 2 (su2)",
         [](const C& c) { return num(c.manifest_cutoff); }, [](C& c, S v) { c.manifest_cutoff = to_double(v); }},
        {"friedrichs", "manifest_max_degree", "dual-sum cap of the cross-check; 0 picks 200 (torus) or 10 (su2)",
         [](const C& c) { return num(c.manifest_max_degree); }, [](C& c, S v) { c.manifest_max_degree = to_double(v); }},
        {"friedrichs", "export_matrix", "write the entries of P", [](const C& c) { return flag(c.export_matrix); },
         [](C& c, S v) { c.export_matrix = to_bool(v); }},
        {"output", "dir", "output directory", [](const C& c) { return c.out_dir; }, [](C& c, S v) { c.out_dir = v; }},
        {"output", "json", "write JSON reports", [](const C& c) { return flag(c.json); }, [](C& c, S v) { c.json = to_bool(v); }},
        {"output", "csv", "write CSV rows", [](const C& c) { return flag(c.csv); }, [](C& c, S v) { c.csv = to_bool(v); }},
    };
    return k;
}

}  // namespace

std::vector<double> parse_list(const std::string& text) {
    std::vector<std::string> parts;
    boost::split(parts, text, boost::is_any_of(","));
    std::vector<double> out;
    for (auto& p : parts) {
        boost::trim(p);
        if (p.empty()) continue;
        out.push_back(to_double(p));
    }
    return out;
}

GroupDescriptor ExperimentConfig::group_descriptor() const {
    if (group == "su2") return GroupDescriptor::su2();
    if (group == "torus1") return GroupDescriptor::torus(1);
    if (group == "torus2") return GroupDescriptor::torus(2);
    if (group == "torus3") return GroupDescriptor::torus(3);
    throw ConfigError("unknown group '" + group + "'");
}

void ExperimentConfig::validate() const {
    group_descriptor();
    params.validate(false);
    if (cutoffs.empty()) throw ConfigError("cutoffs must not be empty");
    for (double c : cutoffs)
        if (!(c >= 0)) throw ConfigError("cutoffs must be nonnegative");
    if (!std::is_sorted(cutoffs.begin(), cutoffs.end())) throw ConfigError("cutoffs must be increasing");
    if (quad_degree < 0 || selftest_degree < 0) throw ConfigError("degrees must be nonnegative");
    if (max_order < 0) throw ConfigError("max_order must be nonnegative");
    if (!(radius > 0)) throw ConfigError("radius must be positive");
    if (profile != BumpProfile{}.id) throw ConfigError("unknown bump profile '" + profile + "'");
    if (!(tail_tol >= 0) || max_degree < 0) throw ConfigError("bad dual-sum truncation");
    if (!(positivity_tol >= 0)) throw ConfigError("positivity_tol must be nonnegative");
    if (manifest_vectors < 1) throw ConfigError("manifest_vectors must be positive");
    if (manifest_cutoff < 0 || manifest_max_degree < 0) throw ConfigError("manifest settings must be nonnegative");
    if (out_dir.empty()) throw ConfigError("output dir must not be empty");
}

std::string ExperimentConfig::canonical() const {
    std::string out;
    for (const auto& k : keys()) out += k.section + "." + k.name + " = " + k.get(*this) + "\n";
    return out;
}

std::string ExperimentConfig::hash() const { return sha256_hex(canonical()); }

ExperimentConfig parse_config(const std::string& text) {
    namespace pt = boost::property_tree;
    // inline comments: ';' or '#' after whitespace
    static const std::regex trailing(R"([ \t]+[;#].*$)");
    std::string cleaned;
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) cleaned += std::regex_replace(line, trailing, "") + "\n";
    pt::ptree tree;
    try {
        std::istringstream in(cleaned);
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(fmt::format("config parse error at line {}: {}", e.line(), e.message()));
    }
    std::map<std::string, const Key*> index;
    for (const auto& k : keys()) index[k.section + "." + k.name] = &k;
    ExperimentConfig c;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) throw ConfigError("key '" + section + "' outside any section");
        for (const auto& [name, value] : body) {
            const auto it = index.find(section + "." + name);
            if (it == index.end()) throw ConfigError("unknown config key [" + section + "] " + name);
            std::string v = value.get_value<std::string>();
            boost::trim(v);
            try {
                it->second->set(c, v);
            } catch (const ConfigError& e) {
                throw ConfigError("[" + section + "] " + name + ": " + e.what());
            }
        }
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

std::string reference_config() {
    const ExperimentConfig d;
    std::string out = "# garding configuration reference; every key shown with its default\n";
    std::string section;
    for (const auto& k : keys()) {
        if (k.section != section) {
            section = k.section;
            out += "\n[" + section + "]\n";
        }
        out += "# " + k.help + "\n" + k.name + " = " + k.get(d) + "\n";
    }
    return out;
}

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    std::string hex;
    for (unsigned i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
    return hex;
}

}  // namespace garding
