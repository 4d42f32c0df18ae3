#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "garding/config.hpp"

namespace garding {

enum ExitCode : int {
    kExitOk = 0,
    kExitOther = 1,  // I/O and anything unclassified
    kExitVerification = 2,
    kExitConfig = 3,
    kExitResolution = 4,
};

struct RunOverrides {
    std::optional<std::string> out_dir;
    std::optional<std::vector<double>> cutoffs;
    std::optional<unsigned> seed;
    bool json_only = false, csv_only = false;
};

struct RunResult {
    int exit_code = kExitOk;
    std::vector<std::string> files;  // written, in order
    std::string summary;             // one line per stage
};

// The symbol named by the config (built-in family or sampled file), with the config's class parameters.
Symbol make_symbol(const ExperimentConfig& c);
WeightFunction make_weight(const ExperimentConfig& c);

RunResult cmd_selftest(const ExperimentConfig& c);
RunResult cmd_garding(const ExperimentConfig& c);
RunResult cmd_symbol_class(const ExperimentConfig& c);
RunResult cmd_friedrichs(const ExperimentConfig& c);

// Loads the config, applies overrides and runs; failures become an error.json
// record in the output directory and the matching exit code.
int run_command(const std::string& command, const std::string& config_path, const RunOverrides& ov, std::ostream& log);

}  // namespace garding
