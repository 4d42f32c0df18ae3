#include <CLI11.hpp>
#include <iostream>

#include "garding/config.hpp"
#include "garding/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Sharp Garding experiments on compact Lie groups"};
    app.require_subcommand(0, 1);

    std::string config_path, out_dir, cutoffs;
    long seed = -1;
    bool json = false, csv = false, print_defaults = false;
    app.add_flag("--print-defaults", print_defaults, "print every config key with its default and exit");

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"selftest", "harmonic-analysis and symbol-calculus self-tests"},
        {"garding", "Friedrichs construction, remainder bounds, Garding sweep and sharpness probe"},
        {"symbol-class", "class fit, class inclusion and exponent table"},
        {"friedrichs", "positivity of the Friedrichs part"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "config file (INI); defaults when omitted");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--cutoffs", cutoffs, "comma-separated degree cutoffs");
        sub->add_option("--seed", seed, "seed")->check(CLI::NonNegativeNumber);
        sub->add_flag("--json", json, "write JSON only (with --csv: both)");
        sub->add_flag("--csv", csv, "write CSV only (with --json: both)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : garding::kExitConfig;
    }
    if (print_defaults) {
        std::cout << garding::reference_config();
        return 0;
    }
    if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return garding::kExitConfig;
    }

    garding::RunOverrides ov;
    if (!out_dir.empty()) ov.out_dir = out_dir;
    if (seed >= 0) ov.seed = unsigned(seed);
    ov.json_only = json;
    ov.csv_only = csv;
    if (!cutoffs.empty()) {
        try {
            ov.cutoffs = garding::parse_list(cutoffs);
        } catch (const std::exception& e) {
            std::cerr << "error (configuration): --cutoffs: " << e.what() << "\n";
            return garding::kExitConfig;
        }
    }
    return garding::run_command(app.get_subcommands().front()->get_name(), config_path, ov, std::cout);
}
