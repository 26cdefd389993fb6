#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "cliff/checks.hpp"

// Exit codes: 0 all checks passed, 1 at least one check failed,
// 2 config/schema violation (including unusable command lines).

int main(int argc, char** argv) {
#ifdef _OPENMP
    if (const char* t = std::getenv("CLIFF_THREADS")) {
        const int v = std::atoi(t);
        if (v > 0) omp_set_num_threads(v);
    }
#endif

    CLI::App app{"verification CLI for graded Clifford modules and their trace identities"};
    app.require_subcommand(1);

    std::string cfg_path, csv_path, mass_path;
    int n_max = 4;

    CLI::App* cmd_run = app.add_subcommand("run", "run the checks listed in a json config");
    cmd_run->add_option("config", cfg_path, "path to the config file")->required();
    cmd_run->add_option("--csv", csv_path, "also write the fitted-coefficient table as csv");

    CLI::App* cmd_list = app.add_subcommand("list-checks", "print check ids and default tolerances");

    CLI::App* cmd_coef =
        app.add_subcommand("coefficients", "closed-form coefficient table for even dimensions");
    cmd_coef->add_option("--n-max", n_max, "largest dimension to tabulate (default 4)");

    CLI::App* cmd_lambda =
        app.add_subcommand("lambda", "vacuum-energy report for a json mass file");
    cmd_lambda->add_option("file", mass_path, "path to the mass file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cmd_run->parsed()) {
            cliff::RunConfig cfg = cliff::parse_config_file(cfg_path);
            cliff::RunReport rep = cliff::run_checks(cfg);
            std::cout << cliff::report_to_json(rep);
            if (!csv_path.empty()) {
                std::ofstream os(csv_path);
                if (!os) throw cliff::ConfigError("cannot write csv to " + csv_path);
                os << cliff::report_to_csv(rep);
            }
            return rep.all_passed ? 0 : 1;
        }
        if (cmd_list->parsed()) {
            for (const std::string& id : cliff::all_check_ids())
                std::cout << id << "  (default tolerance " << cliff::default_tolerance(id)
                          << ")\n";
            return 0;
        }
        if (cmd_coef->parsed()) {
            std::cout << cliff::coefficient_table_csv(n_max);
            return 0;
        }
        if (cmd_lambda->parsed()) {
            std::ifstream in(mass_path);
            if (!in) throw cliff::ConfigError("cannot open " + mass_path);
            std::stringstream ss;
            ss << in.rdbuf();
            std::cout << cliff::lambda_report_text(ss.str());
            return 0;
        }
    } catch (const cliff::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
