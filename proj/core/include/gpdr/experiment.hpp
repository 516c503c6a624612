#pragma once

#include "gpdr/engine.hpp"
#include "gpdr/rules.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace gpdr {

// The full factor grid: P in {10,20} x CV in {0.4,0.6,0.8} x PN in {0,0.15}
// x PW in {0,0.15}, nested in that order; ids are 1-based.
std::vector<ClinicConfig> clinic_grid();

struct ResultRow {
  int clinic_id = 0;
  std::string method;
  double mean_tc = 0.0;
  double std_tc = 0.0;       // across runs (evaluation CI is reported separately)
  double mean_dim_gap = 0.0;
  double mean_size = 0.0;
  int runs = 0;
};

struct SuiteConfig {
  EngineConfig engine;
  std::vector<ClinicConfig> clinics;  // defaults to clinic_grid()
  std::vector<int> clinic_ids;        // 1-based selection; empty = all
  std::vector<std::string> methods;   // rule names and/or "GPDR"/"GP"
  int runs = 1;
  std::uint64_t seed_base = 1;
  std::string out_dir = "results";
  RuleParams rule_params;
};

// Reads the JSON config; every key is optional. Unknown keys are rejected.
SuiteConfig load_suite_config(const std::string& path);
SuiteConfig parse_suite_config(const std::string& json_text);

std::uint64_t cell_seed(std::uint64_t seed_base, int clinic_index0, int run);

TestEvaluation evaluate_rule_on_test(RuleName rule, const ClinicConfig& clinic,
                                     std::uint64_t seed, int replications,
                                     const RuleParams& params = {}, int workers = 0);
TestEvaluation evaluate_individual_on_test(const Individual& ind, const ClinicConfig& clinic,
                                           std::uint64_t seed, int replications,
                                           int workers = 0);

// Runs every (clinic, method[, run]) cell and writes results.csv,
// best_rules.txt and per-cell archive/stats files into out_dir. Evolution
// cells whose archive file already exists are skipped, so interrupted suites
// resume per cell; aggregate files are rebuilt from cell files every time.
// All writes go through a temp file + rename.
void run_suite(const SuiteConfig& config, std::ostream* log = nullptr);

// Re-evaluates each best rule's schedule on its clinic and emits
// "clinic,run,is_dome,interval..." lines.
void dome_report(std::istream& best_rules, const std::vector<ClinicConfig>& clinics,
                 std::ostream& out);

struct CellResult {
  int clinic_id = 0;
  int run = 0;
  double test_tc = 0.0;
  double dim_gap = 0.0;
  int size = 0;
  Individual best;
};

CellResult parse_cell_file(const std::string& path);

}  // namespace gpdr
