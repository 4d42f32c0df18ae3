#pragma once

#include <string>
#include <vector>

#include "garding/friedrichs.hpp"

namespace garding {

struct ExperimentConfig {
    // [experiment]
    std::string group = "torus1";
    std::string symbol = "cos-elliptic";  // built-in family, ignored when symbol_file is set
    std::string symbol_file;
    double order = -1;  // exponent of the family; negative means "use m"
    unsigned seed = 1;
    // [class]
    SymbolClassParams params{2, 1, 0, 1};
    // [sweep]
    std::vector<double> cutoffs{12, 18, 24, 32};  // degrees: |k| on the torus, l on SU(2)
    std::vector<double> probe_s;
    double quad_degree = 0;      // 0 picks the smallest exact degree
    double selftest_degree = 0;  // 0 picks a per-group default
    int max_order = 2;           // class fits
    // [weight]
    double radius = 1.5707963267948966;
    std::string profile = "exp-step";
    // [friedrichs]
    double tail_tol = 1e-7;
    double max_degree = 0;
    double positivity_tol = 1e-6;
    int manifest_vectors = 5;
    double manifest_cutoff = 0;      // degree; 0 picks a small default
    double manifest_max_degree = 0;  // 0 picks a small default
    bool export_matrix = false;
    // [output]
    std::string out_dir = "out";
    bool json = true;
    bool csv = true;

    GroupDescriptor group_descriptor() const;
    // Throws ConfigError on out-of-range values.
    void validate() const;
    // section.key = value lines for every field in a fixed order; hashed into reports.
    std::string canonical() const;
    std::string hash() const;  // SHA-256 of canonical(), hex
};

// Parses the INI-style text; unknown sections or keys are errors.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
// Every key with its default and a one-line description, in config syntax.
std::string reference_config();

std::string sha256_hex(const std::string& data);
std::vector<double> parse_list(const std::string& text);

}  // namespace garding
