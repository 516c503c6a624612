#include "gpdr/experiment.hpp"
#include "gpdr/repair.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

std::vector<int> parse_clinic_selection(const std::string& arg, std::size_t grid_size) {
  std::vector<int> ids;
  if (arg == "all") {
    for (std::size_t i = 1; i <= grid_size; ++i) ids.push_back(static_cast<int>(i));
    return ids;
  }
  std::size_t pos = 0;
  while (pos < arg.size()) {
    const std::size_t comma = arg.find(',', pos);
    const std::string tok = arg.substr(pos, comma == std::string::npos ? arg.size() - pos
                                                                       : comma - pos);
    ids.push_back(std::stoi(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return ids;
}

int cmd_evolve(const std::string& clinic_arg, int runs, std::uint64_t seed,
               const std::string& config_path, const std::string& out_dir, bool no_repair,
               bool runs_set, bool seed_set, bool out_set) {
  gpdr::SuiteConfig cfg;
  if (!config_path.empty()) cfg = gpdr::load_suite_config(config_path);
  const std::size_t grid_size = cfg.clinics.empty() ? gpdr::clinic_grid().size()
                                                    : cfg.clinics.size();
  cfg.clinic_ids = parse_clinic_selection(clinic_arg, grid_size);
  cfg.methods = {no_repair ? "GP" : "GPDR"};
  if (runs_set || cfg.runs <= 0) cfg.runs = runs;
  if (seed_set) cfg.seed_base = seed;
  if (out_set || cfg.out_dir.empty()) cfg.out_dir = out_dir;
  gpdr::run_suite(cfg, &std::cout);
  return 0;
}

int cmd_baselines(const std::string& clinic_arg, std::uint64_t seed, int reps,
                  const std::string& config_path, const std::string& out_dir,
                  std::vector<std::string> rules, bool seed_set, bool out_set) {
  gpdr::SuiteConfig cfg;
  if (!config_path.empty()) cfg = gpdr::load_suite_config(config_path);
  const std::size_t grid_size = cfg.clinics.empty() ? gpdr::clinic_grid().size()
                                                    : cfg.clinics.size();
  cfg.clinic_ids = parse_clinic_selection(clinic_arg, grid_size);
  if (rules.empty())
    for (gpdr::RuleName r : gpdr::manual_rules()) rules.emplace_back(gpdr::rule_name(r));
  cfg.methods = std::move(rules);
  cfg.runs = 1;
  if (seed_set) cfg.seed_base = seed;
  if (reps > 0) cfg.engine.test_replications = reps;
  if (out_set || cfg.out_dir.empty()) cfg.out_dir = out_dir;
  gpdr::run_suite(cfg, &std::cout);
  return 0;
}

int cmd_repair_tree(const std::string& expr, int target, std::uint64_t seed) {
  const gpdr::ExprTree tree = gpdr::parse_tree(expr);
  const gpdr::DimExp target_dim(target);
  const auto before = gpdr::tree_dim_gap(tree, target_dim);
  std::cout << "tree:       " << gpdr::to_prefix(tree) << "\n";
  std::cout << "target dim: " << target_dim.str() << "\n";
  std::cout << "root dim:   " << before.root_dim.str() << ", gap " << before.gap.str() << "\n";

  const gpdr::RepairProblem problem = gpdr::build_problem(tree, target_dim);
  const auto solution = gpdr::solve_repair(problem);
  if (!solution) {
    std::cout << "no feasible retyping: every class assignment misses the target; "
                 "population repair would mutate this tree\n";
    return 0;
  }
  std::cout << "objective:  " << solution->objective.str() << " (" << solution->changed_count
            << " node(s) changed)\n";
  for (const auto& a : solution->assignment) {
    if (!a.changed) continue;
    const auto& node = problem.nodes[a.node];
    std::cout << "  node " << a.node << " (depth " << node.depth << "): ";
    if (a.is_terminal)
      std::cout << "terminal dim " << node.terminal_dim.str() << " -> " << a.dim.str() << "\n";
    else
      std::cout << "class " << node.func_class << " -> " << a.func_class << "\n";
  }
  gpdr::Rng rng(seed);
  const gpdr::ExprTree repaired = gpdr::apply_solution(tree, *solution, nullptr, rng);
  const auto after = gpdr::tree_dim_gap(repaired, target_dim);
  std::cout << "repaired:   " << gpdr::to_prefix(repaired) << "\n";
  std::cout << "final dim:  " << after.root_dim.str() << ", gap " << after.gap.str() << "\n";
  return 0;
}

int cmd_dome_report(const std::string& input, const std::string& out_path,
                    const std::string& config_path) {
  std::vector<gpdr::ClinicConfig> clinics;
  if (!config_path.empty()) clinics = gpdr::load_suite_config(config_path).clinics;
  if (clinics.empty()) clinics = gpdr::clinic_grid();

  std::ifstream in(input);
  if (!in) {
    std::cerr << "cannot open " << input << "\n";
    return 1;
  }
  if (out_path.empty()) {
    gpdr::dome_report(in, clinics, std::cout);
  } else {
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) {
      std::cerr << "cannot open " << out_path << "\n";
      return 1;
    }
    gpdr::dome_report(in, clinics, out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dimension-aware genetic programming for appointment scheduling"};
  app.require_subcommand(1);

  std::string clinic_arg = "all";
  int runs = 1;
  std::uint64_t seed = 1;
  std::string config_path, out_dir = "results";
  bool no_repair = false;
  int reps = 0;
  std::vector<std::string> rules;
  std::string expr, input, out_path;
  int target_dim = 0;

  auto* evolve = app.add_subcommand("evolve", "run the evolutionary engine per clinic");
  evolve->add_option("--clinic", clinic_arg, "clinic id, comma list, or 'all'");
  auto* evolve_runs = evolve->add_option("--runs", runs, "independent runs per clinic");
  auto* evolve_seed = evolve->add_option("--seed", seed, "seed base");
  evolve->add_option("--config", config_path, "JSON configuration file");
  auto* evolve_out = evolve->add_option("--out", out_dir, "output directory");
  evolve->add_flag("--no-repair", no_repair, "standard GP: skip dimension repair");

  auto* baselines = app.add_subcommand("baselines", "evaluate the named rules per clinic");
  baselines->add_option("--clinic", clinic_arg, "clinic id, comma list, or 'all'");
  auto* base_seed = baselines->add_option("--seed", seed, "seed base");
  baselines->add_option("--reps", reps, "test replications (default 15000)");
  baselines->add_option("--rule", rules, "rule name (repeatable; default: all manual rules)");
  baselines->add_option("--config", config_path, "JSON configuration file");
  auto* base_out = baselines->add_option("--out", out_dir, "output directory");

  auto* repair = app.add_subcommand("repair-tree", "retype one tree to a target dimension");
  repair->add_option("--expr", expr, "prefix-form tree, e.g. \"(add (mul i M) V)\"")
      ->required();
  repair->add_option("--target-dim", target_dim, "target unit exponent (0 or 1)")
      ->required()
      ->check(CLI::IsMember({0, 1}));
  repair->add_option("--seed", seed, "seed for replacement sampling");

  auto* dome = app.add_subcommand("dome-report", "interval profiles for a best-rules file");
  dome->add_option("--input", input, "best_rules.txt path")->required();
  dome->add_option("--out", out_path, "output CSV (default: stdout)");
  dome->add_option("--config", config_path, "JSON configuration file (clinic table)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (evolve->parsed())
      return cmd_evolve(clinic_arg, runs, seed, config_path, out_dir, no_repair,
                        evolve_runs->count() > 0, evolve_seed->count() > 0,
                        evolve_out->count() > 0);
    if (baselines->parsed())
      return cmd_baselines(clinic_arg, seed, reps, config_path, out_dir, rules,
                           base_seed->count() > 0, base_out->count() > 0);
    if (repair->parsed()) return cmd_repair_tree(expr, target_dim, seed);
    if (dome->parsed()) return cmd_dome_report(input, out_path, config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
