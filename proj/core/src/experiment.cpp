#include "gpdr/experiment.hpp"

#include "gpdr/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gpdr {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<ClinicConfig> clinic_grid() {
  std::vector<ClinicConfig> grid;
  for (int patients : {10, 20})
    for (double cv : {0.4, 0.6, 0.8})
      for (double pn : {0.0, 0.15})
        for (double pw : {0.0, 0.15})
          grid.push_back(ClinicConfig::make(patients, cv, pn, pw));
  return grid;
}

std::uint64_t cell_seed(std::uint64_t seed_base, int clinic_index0, int run) {
  return derive_seed(seed_base, stream::run_cell, static_cast<std::uint64_t>(clinic_index0),
                     static_cast<std::uint64_t>(run));
}

TestEvaluation evaluate_rule_on_test(RuleName rule, const ClinicConfig& clinic,
                                     std::uint64_t seed, int replications,
                                     const RuleParams& params, int workers) {
  return evaluate_schedule_on_test(rule_schedule(rule, clinic, params), clinic, seed,
                                   replications, workers);
}

TestEvaluation evaluate_individual_on_test(const Individual& ind, const ClinicConfig& clinic,
                                           std::uint64_t seed, int replications, int workers) {
  return evaluate_schedule_on_test(compute_schedule(ind, clinic), clinic, seed, replications,
                                   workers);
}

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << content;
    if (!f) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

bool is_evolution_method(const std::string& m) { return m == "GPDR" || m == "GP"; }

ClinicConfig parse_clinic(const json& j) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "P" && key != "CV" && key != "PN" && key != "PW" && key != "L" && key != "CR")
      throw std::runtime_error("unknown clinic key '" + key + "'");
  }
  return ClinicConfig::make(j.at("P").get<int>(), j.at("CV").get<double>(),
                            j.at("PN").get<double>(), j.at("PW").get<double>(),
                            j.value("L", 210.0), j.value("CR", 0.1));
}

}  // namespace

SuiteConfig parse_suite_config(const std::string& text) {
  json j = json::parse(text);
  SuiteConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "pop_size") cfg.engine.pop_size = value.get<int>();
    else if (key == "generations") cfg.engine.generations = value.get<int>();
    else if (key == "tournament_size") cfg.engine.tournament_size = value.get<int>();
    else if (key == "p_crossover") cfg.engine.p_crossover = value.get<double>();
    else if (key == "p_mutation") cfg.engine.p_mutation = value.get<double>();
    else if (key == "train_replications") cfg.engine.train_replications = value.get<int>();
    else if (key == "test_replications") cfg.engine.test_replications = value.get<int>();
    else if (key == "runs") cfg.runs = value.get<int>();
    else if (key == "seed") cfg.seed_base = value.get<std::uint64_t>();
    else if (key == "out_dir") cfg.out_dir = value.get<std::string>();
    else if (key == "methods") cfg.methods = value.get<std::vector<std::string>>();
    else if (key == "clinic_ids") cfg.clinic_ids = value.get<std::vector<int>>();
    else if (key == "clinics") {
      for (const auto& c : value) cfg.clinics.push_back(parse_clinic(c));
    }
    else if (key == "offset_k") cfg.rule_params.offset_k = value.get<int>();
    else if (key == "dome_k1") cfg.rule_params.dome_k1 = value.get<int>();
    else if (key == "dome_k2") cfg.rule_params.dome_k2 = value.get<int>();
    else throw std::runtime_error("unknown config key '" + key + "'");
  }
  return cfg;
}

SuiteConfig load_suite_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_suite_config(ss.str());
}

namespace {

std::string cell_file_name(int clinic_id, int run) {
  return "archive_" + std::to_string(clinic_id) + "_" + std::to_string(run) + ".txt";
}

void write_cell_files(const fs::path& out_dir, int clinic_id, int run, std::uint64_t seed,
                      const RunResult& rr, const TestEvaluation& te) {
  std::string body;
  body += "# clinic=" + std::to_string(clinic_id) + " run=" + std::to_string(run) +
          " seed=" + std::to_string(seed) + "\n";
  const ArchiveEntry& b = rr.best;
  body += "best\t" + fmt("%.17g", te.mean_tc) + "\t" +
          fmt("%.17g", individual_dim_gap(b.ind).to_double()) + "\t" +
          std::to_string(b.size) + "\t" + to_string(b.ind) + "\n";
  for (const auto& e : rr.archive)
    body += "entry\t" + fmt("%.17g", e.fitness) + "\t" + std::to_string(e.size) + "\t" +
            fmt("%.17g", individual_dim_gap(e.ind).to_double()) + "\t" + to_string(e.ind) + "\n";
  write_atomic(out_dir / cell_file_name(clinic_id, run), body);

  std::string stats;
  stats += "generation,best_fitness,mean_fitness,mean_size,mean_dim_gap,archive_size,"
           "repair_solver_calls,repair_mutations,repair_fallbacks\n";
  for (const auto& g : rr.stats)
    stats += std::to_string(g.generation) + "," + fmt("%.17g", g.best_fitness) + "," +
             fmt("%.17g", g.mean_fitness) + "," + fmt("%.4f", g.mean_size) + "," +
             fmt("%.17g", g.mean_dim_gap) + "," + std::to_string(g.archive_size) + "," +
             std::to_string(g.repair_solver_calls) + "," + std::to_string(g.repair_mutations) +
             "," + std::to_string(g.repair_fallbacks) + "\n";
  write_atomic(out_dir / ("stats_" + std::to_string(clinic_id) + "_" + std::to_string(run) +
                          ".csv"),
               stats);
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

}  // namespace

CellResult parse_cell_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open cell file " + path);
  CellResult cell;
  std::string line;
  if (!std::getline(f, line) ||
      std::sscanf(line.c_str(), "# clinic=%d run=%d", &cell.clinic_id, &cell.run) != 2)
    throw std::runtime_error("bad cell header in " + path);
  if (!std::getline(f, line)) throw std::runtime_error("missing best line in " + path);
  const auto fields = split_tabs(line);
  if (fields.size() != 5 || fields[0] != "best")
    throw std::runtime_error("bad best line in " + path);
  cell.test_tc = std::stod(fields[1]);
  cell.dim_gap = std::stod(fields[2]);
  cell.size = std::stoi(fields[3]);
  cell.best = parse_individual(fields[4]);
  return cell;
}

void run_suite(const SuiteConfig& cfg, std::ostream* log) {
  cfg.engine.validate();
  if (cfg.runs <= 0) throw std::invalid_argument("runs must be positive");
  if (cfg.methods.empty()) throw std::invalid_argument("no methods selected");
  int evolution_methods = 0;
  for (const auto& m : cfg.methods) {
    if (is_evolution_method(m)) {
      ++evolution_methods;
    } else if (!rule_from_name(m)) {
      throw std::invalid_argument("unknown method '" + m + "'");
    }
  }
  if (evolution_methods > 1)
    throw std::invalid_argument("at most one evolution method per suite");

  const std::vector<ClinicConfig> clinics = cfg.clinics.empty() ? clinic_grid() : cfg.clinics;
  std::vector<int> ids = cfg.clinic_ids;
  if (ids.empty())
    for (std::size_t i = 1; i <= clinics.size(); ++i) ids.push_back(static_cast<int>(i));
  for (int id : ids)
    if (id < 1 || id > static_cast<int>(clinics.size()))
      throw std::invalid_argument("clinic id out of range: " + std::to_string(id));

  const fs::path out_dir(cfg.out_dir);
  fs::create_directories(out_dir);

  // evolution cells first (resumable; each cell is skipped if its file exists)
  for (int id : ids) {
    const ClinicConfig& clinic = clinics[static_cast<std::size_t>(id - 1)];
    for (const auto& method : cfg.methods) {
      if (!is_evolution_method(method)) continue;
      for (int r = 0; r < cfg.runs; ++r) {
        const fs::path cell_path = out_dir / cell_file_name(id, r);
        if (fs::exists(cell_path)) {
          if (log) *log << "cell clinic=" << id << " run=" << r << " exists, skipping\n";
          continue;
        }
        const std::uint64_t seed = cell_seed(cfg.seed_base, id - 1, r);
        EngineConfig ec = cfg.engine;
        ec.master_seed = seed;
        ec.repair_enabled = (method == "GPDR");
        const RunResult rr = run(ec, clinic);
        const TestEvaluation te = evaluate_individual_on_test(
            rr.best.ind, clinic, seed, ec.test_replications, ec.workers);
        write_cell_files(out_dir, id, r, seed, rr, te);
        if (log)
          *log << "cell clinic=" << id << " run=" << r << " test_tc=" << te.mean_tc
               << " size=" << rr.best.size << "\n";
      }
    }
  }

  // aggregate rows are rebuilt from scratch on every invocation
  std::vector<ResultRow> rows;
  std::vector<CellResult> best_cells;
  for (int id : ids) {
    const ClinicConfig& clinic = clinics[static_cast<std::size_t>(id - 1)];
    for (const auto& method : cfg.methods) {
      ResultRow row;
      row.clinic_id = id;
      row.method = method;
      if (is_evolution_method(method)) {
        std::vector<CellResult> cells;
        for (int r = 0; r < cfg.runs; ++r)
          cells.push_back(parse_cell_file((out_dir / cell_file_name(id, r)).string()));
        double tc_sum = 0.0, gap_sum = 0.0, size_sum = 0.0;
        for (const auto& c : cells) {
          tc_sum += c.test_tc;
          gap_sum += c.dim_gap;
          size_sum += c.size;
        }
        row.runs = cfg.runs;
        row.mean_tc = tc_sum / cfg.runs;
        row.mean_dim_gap = gap_sum / cfg.runs;
        row.mean_size = size_sum / cfg.runs;
        if (cfg.runs > 1) {
          double ss = 0.0;
          for (const auto& c : cells) ss += (c.test_tc - row.mean_tc) * (c.test_tc - row.mean_tc);
          row.std_tc = std::sqrt(ss / (cfg.runs - 1));
        }
        best_cells.insert(best_cells.end(), cells.begin(), cells.end());
      } else {
        const RuleName rule = *rule_from_name(method);
        const std::uint64_t seed = cell_seed(cfg.seed_base, id - 1, 0);
        const TestEvaluation te = evaluate_rule_on_test(
            rule, clinic, seed, cfg.engine.test_replications, cfg.rule_params,
            cfg.engine.workers);
        row.runs = 1;
        row.mean_tc = te.mean_tc;
      }
      rows.push_back(std::move(row));
    }
  }

  std::string csv = "clinic,method,mean_tc,std_tc,mean_dim_gap,mean_size,runs\n";
  for (const auto& r : rows)
    csv += std::to_string(r.clinic_id) + "," + r.method + "," + fmt("%.4f", r.mean_tc) + "," +
           fmt("%.4f", r.std_tc) + "," + fmt("%.6g", r.mean_dim_gap) + "," +
           fmt("%.2f", r.mean_size) + "," + std::to_string(r.runs) + "\n";
  write_atomic(out_dir / "results.csv", csv);

  if (evolution_methods > 0) {
    std::string best = "# clinic\trun\ttest_tc\tdim_gap\tsize\trule\n";
    for (const auto& c : best_cells)
      best += std::to_string(c.clinic_id) + "\t" + std::to_string(c.run) + "\t" +
              fmt("%.17g", c.test_tc) + "\t" + fmt("%.17g", c.dim_gap) + "\t" +
              std::to_string(c.size) + "\t" + to_string(c.best) + "\n";
    write_atomic(out_dir / "best_rules.txt", best);
  }

  if (log) {
    *log << "clinic,method,mean_tc,std_tc,runs\n";
    for (const auto& r : rows)
      *log << r.clinic_id << "," << r.method << "," << fmt("%.4f", r.mean_tc) << ","
           << fmt("%.4f", r.std_tc) << "," << r.runs << "\n";
  }
}

void dome_report(std::istream& best_rules, const std::vector<ClinicConfig>& clinics,
                 std::ostream& out) {
  out << "clinic,run,is_dome,intervals\n";
  std::string line;
  int line_no = 0;
  while (std::getline(best_rules, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    try {
      const auto fields = split_tabs(line);
      if (fields.size() != 6) throw std::runtime_error("expected 6 tab-separated fields");
      const int clinic_id = std::stoi(fields[0]);
      if (clinic_id < 1 || clinic_id > static_cast<int>(clinics.size()))
        throw std::runtime_error("clinic id out of range: " + std::to_string(clinic_id));
      const Individual ind = parse_individual(fields[5]);
      const auto schedule =
          compute_schedule(ind, clinics[static_cast<std::size_t>(clinic_id - 1)]);
      const DomeProfile profile = dome_profile(schedule);
      out << clinic_id << "," << fields[1] << "," << (profile.is_dome ? 1 : 0);
      for (double iv : profile.intervals) out << "," << fmt("%.6f", iv);
      out << "\n";
    } catch (const std::exception& e) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

}  // namespace gpdr
