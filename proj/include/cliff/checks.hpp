#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cliff/lagrangians.hpp"

// The check registry behind the verification CLI. Each check is a named,
// self-seeding scenario: given a config it draws its own RNG stream from
// (master seed, check id), builds the module tower it needs, and reports
// named residuals against scaled tolerances. Results are deterministic for a
// fixed (config, seed) at any thread count.

namespace cliff {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// generation-space mass inputs; lifted into module towers by the checks that
// use them (dirac/majorana act on the nu sector, charged on the e sector)
struct MassInputs {
    int nu_gens = 1;
    int e_gens = 1;
    Matrix dirac{1};
    Matrix majorana{1};
    Matrix charged{1};
    bool defaulted = true;
};

struct RunConfig {
    std::string name = "default";
    Signature sig{3, 1};
    int eps = 1;
    int twist = 2;       // generic fiber twist (balanced grading)
    int band = 1;        // K
    int capacity = -1;   // -1 = 4K+2
    std::uint64_t seed = 0xC11FF0D5u;
    std::vector<std::string> checks;  // empty = trivially passing run
    std::map<std::string, double> tolerances;
    MassInputs masses;
    int j_branch = 1;        // real-structure branch
    bool hermitian = false;  // Hermitian mu_YM branch (pairs with eps = -1)
};

// throws ConfigError on schema violations (missing/ill-typed fields, odd n,
// capacity < 4K+2, unknown check ids, non-square masses)
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

struct CoefRow {
    std::string term;
    std::string paper;  // exact rational, e.g. "9/4" (sign folded in)
    double fitted = 0.0;
    double residual = 0.0;
};

struct CheckResult {
    std::string id;
    bool passed = false;
    double residual = 0.0;  // worst sub-residual rescaled to the check tolerance
    double tolerance = 0.0; // configured tolerance (pass iff residual < tolerance)
    double seconds = 0.0;
    std::vector<std::pair<std::string, double>> details;
    std::vector<CoefRow> coefficients;
    std::string note;
};

struct RunReport {
    std::string name;
    std::uint64_t seed = 0;
    Signature sig{0, 0};
    int eps = 1;
    bool all_passed = true;
    std::vector<CheckResult> results;
};

const std::vector<std::string>& all_check_ids();
double default_tolerance(const std::string& id);

CheckResult run_check(const std::string& id, const RunConfig& cfg);
RunReport run_checks(const RunConfig& cfg);

std::string report_to_json(const RunReport& r);
// coefficient table of the run: term, paper-coefficient, fitted, residual
std::string report_to_csv(const RunReport& r);
// closed-form coefficient table (exact rationals) for even n up to n_max
std::string coefficient_table_csv(int n_max);
// vacuum-energy report for a mass file (json text); throws ConfigError
std::string lambda_report_text(const std::string& json_text);

// --- serialization utilities -------------------------------------------------

// module descriptor (dims, flags, matrices as row-major re/im pairs)
std::string module_descriptor_json(const Module& m);
// operator spec alongside its module descriptor
std::string dirac_op_json(const DiracOp& d);
// field literal: {"n":..,"K":..,"dim":..,"modes":[{"k":[..],"value":[[re,im],..]}]}
EndoField endo_field_from_json_text(const std::string& text);
std::string endo_field_to_json(const EndoField& f);

}  // namespace cliff
