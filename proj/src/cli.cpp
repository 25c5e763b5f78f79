#include "pram/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pram/io.hpp"
#include "pram/matrix.hpp"
#include "pram/perturb.hpp"
#include "pram/planner.hpp"
#include "pram/risk.hpp"
#include "pram/sim.hpp"

namespace pram {

namespace {

std::string fmt(double v, int digits = 9) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*g", digits, v);
  return buffer;
}

int find_label(const FrequencyTable& freq, const std::string& label) {
  for (int i = 0; i < freq.k(); ++i) {
    if (freq.labels[static_cast<std::size_t>(i)] == label) return i;
  }
  throw ValidationError("target label '" + label + "' not present in the column");
}

FrequencyTable load_table(const CsvColumn& data) {
  return validate_frequency_table(data.table.labels, data.table.counts);
}

void check_matches_plan(const FrequencyTable& freq, const FrequencyTable& planned) {
  if (freq.labels != planned.labels || freq.counts != planned.counts)
    throw ValidationError(
        "input column does not match the frequency table stored in the plan");
}

std::string join_labels(const FrequencyTable& freq, const std::vector<int>& idx,
                        int skip = -1) {
  std::string out;
  for (int i : idx) {
    if (i == skip) continue;
    if (!out.empty()) out += ", ";
    out += freq.labels[static_cast<std::size_t>(i)];
  }
  return out;
}

void do_plan(const RunConfig& cfg, std::ostream& out) {
  if (!(cfg.xi > 0.0 && cfg.xi < 1.0))
    throw ValidationError("--xi must lie strictly between 0 and 1");
  const CsvColumn data = read_categorical_csv(cfg.input_path, cfg.column);
  const FrequencyTable freq = load_table(data);
  const int target = find_label(freq, cfg.target_label);
  const BlockPlan plan = plan_blocks(freq, target, cfg.xi);
  write_json_file(plan_to_json(plan, freq), cfg.out_path, cfg.pretty);

  const std::int64_t t1 = freq.counts[static_cast<std::size_t>(target)];
  out << "records: " << freq.n << ", categories: " << freq.k() << "\n";
  out << "target: '" << cfg.target_label << "' (index " << target
      << ", count " << t1 << ")\n";
  if (plan.is_noop()) {
    out << "no perturbation needed: risk 1/" << t1 << " = "
        << fmt(1.0 / static_cast<double>(t1), 6) << " already meets xi = "
        << fmt(plan.xi_achieved, 6) << "\n";
  } else {
    out << "theta: " << fmt(plan.theta) << "\n";
    out << "block size: " << plan.k1 << "\n";
    out << "block: " << join_labels(freq, plan.target_block()) << "\n";
    std::vector<int> singletons;
    for (const auto& block : plan.blocks) {
      if (block.size() == 1 && block[0] != target) singletons.push_back(block[0]);
    }
    if (!singletons.empty())
      out << "unchanged: " << join_labels(freq, singletons) << "\n";
  }
  out << "xi requested: " << fmt(plan.xi_requested, 6) << ", achieved: "
      << fmt(plan.xi_achieved, 6)
      << (plan.relaxed() ? " (relaxed: requested level infeasible)" : "") << "\n";
  out << "plan written to " << cfg.out_path << "\n";
}

void do_perturb(const RunConfig& cfg, std::ostream& out, bool print_matrix) {
  const PlanFile plan_file = plan_from_json(read_json_file(cfg.plan_path));
  const CsvColumn data = read_categorical_csv(cfg.input_path, cfg.column);
  const FrequencyTable freq = load_table(data);
  check_matches_plan(freq, plan_file.table);

  const TransitionMatrix m = build_ifpr(freq, plan_file.plan);
  const CategoricalColumn released = perturb(data.column, m, cfg.seed);
  write_perturbed_csv(cfg.input_path, cfg.column, released, cfg.out_path);
  write_json_file(matrix_to_json(m), cfg.matrix_path, cfg.pretty);

  std::int64_t changed = 0;
  for (std::size_t r = 0; r < released.values.size(); ++r)
    changed += (released.values[r] != data.column.values[r]);
  out << "perturbed " << released.size() << " records (" << changed
      << " changed) with seed " << cfg.seed << " [" << kRngName << "]\n";
  if (print_matrix) out << matrix_display(m);
  out << "released data written to " << cfg.out_path << "\n";
  out << "matrix written to " << cfg.matrix_path << "\n";
}

void do_risk(const RunConfig& cfg, std::ostream& out) {
  const PlanFile plan_file = plan_from_json(read_json_file(cfg.plan_path));
  const CsvColumn data = read_categorical_csv(cfg.input_path, cfg.column);
  const FrequencyTable freq = load_table(data);
  check_matches_plan(freq, plan_file.table);

  const TransitionMatrix m = build_ifpr(freq, plan_file.plan);
  const RiskProfile profile =
      risk_profile(freq, plan_file.plan, m, cfg.a_max_cap);
  write_json_file(risk_profile_to_json(profile), cfg.out_path, cfg.pretty);

  out << "max risk: " << fmt(profile.max_risk) << " at a = " << profile.argmax_a
      << "\n";
  out << "bound: " << fmt(profile.psi_bound) << " against xi = "
      << fmt(profile.xi_target, 6) << "\n";
  out << "certified: " << (profile.certified ? "yes" : "no") << "\n";
  out << "risk profile written to " << cfg.out_path << "\n";
}

void do_simulate(const RunConfig& cfg, std::ostream& out) {
  const PlanFile plan_file = plan_from_json(read_json_file(cfg.plan_path));
  const CsvColumn data = read_categorical_csv(cfg.input_path, cfg.column);
  const FrequencyTable freq = load_table(data);
  check_matches_plan(freq, plan_file.table);

  const TransitionMatrix m = build_ifpr(freq, plan_file.plan);
  std::vector<ReplicateStat> trace;
  const bool want_trace = !cfg.trace_path.empty();
  const SimulationReport report = run_replicates(
      data.column, m, plan_file.plan.target_index, cfg.replicates, cfg.seed,
      cfg.jobs, want_trace ? &trace : nullptr);
  write_json_file(report_to_json(report, freq.labels), cfg.out_path, cfg.pretty);

  if (want_trace) {
    std::ofstream tr(cfg.trace_path, std::ios::binary);
    if (!tr) throw IoError("cannot open '" + cfg.trace_path + "' for writing");
    tr << "replicate";
    for (const auto& label : freq.labels) tr << ',' << label;
    tr << ",correct_match\n";
    for (std::size_t r = 0; r < trace.size(); ++r) {
      tr << r;
      for (std::int64_t c : trace[r].released_counts) tr << ',' << c;
      tr << ',' << (trace[r].correct_match ? 1 : 0) << '\n';
    }
    if (!tr) throw IoError("failed writing '" + cfg.trace_path + "'");
  }

  out << "replicates: " << report.replicates << ", seed: " << report.master_seed
      << " [" << report.rng_name << "]\n";
  out << "avg correct match: " << fmt(report.avg_correct_match) << "\n";
  double worst = 0.0;
  for (double mse : report.mse_per_category) worst = std::max(worst, mse);
  out << "worst per-category mse: " << fmt(worst) << "\n";
  out << "report written to " << cfg.out_path << "\n";
}

void do_blocktable(bool as_json, std::ostream& out) {
  const auto table = block_size_table();
  if (as_json) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table) rows.push_back(row);
    std::vector<int> t1(10);
    for (int i = 0; i < 10; ++i) t1[static_cast<std::size_t>(i)] = i + 1;
    out << nlohmann::json{{"xi", kBlockTableXi}, {"t1", t1}, {"k1", rows}}.dump()
        << "\n";
    return;
  }
  char buffer[64];
  out << "T1\\xi";
  for (double xi : kBlockTableXi) {
    std::snprintf(buffer, sizeof(buffer), "%7.3f", xi);
    out << buffer;
  }
  out << "\n";
  for (int t1 = 1; t1 <= 10; ++t1) {
    std::snprintf(buffer, sizeof(buffer), "%-5d", t1);
    out << buffer;
    for (int v : table[static_cast<std::size_t>(t1 - 1)]) {
      std::snprintf(buffer, sizeof(buffer), "%7d", v);
      out << buffer;
    }
    out << "\n";
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"invariant post-randomization planning, perturbation, and risk "
               "certification"};
  app.name("pram");
  app.require_subcommand(1);

  RunConfig cfg;
  bool print_matrix = false;
  bool table_json = false;

  CLI::App* plan = app.add_subcommand(
      "plan", "solve the spread parameter and choose the protection block");
  plan->add_option("--input", cfg.input_path, "input CSV file")->required();
  plan->add_option("--column", cfg.column, "name of the categorical column")
      ->required();
  plan->add_option("--target", cfg.target_label, "label of the target category")
      ->required();
  plan->add_option("--xi", cfg.xi, "security level in (0, 1)")->required();
  plan->add_option("--out", cfg.out_path, "plan artifact path")
      ->default_val("plan.json");
  plan->add_flag("--pretty", cfg.pretty, "indent JSON output");
  plan->callback([&]() { do_plan(cfg, out); });

  CLI::App* perturb_cmd =
      app.add_subcommand("perturb", "release a perturbed copy of the column");
  perturb_cmd->add_option("--input", cfg.input_path, "input CSV file")->required();
  perturb_cmd->add_option("--column", cfg.column, "name of the categorical column")
      ->required();
  perturb_cmd->add_option("--plan", cfg.plan_path, "plan artifact")->required();
  perturb_cmd->add_option("--seed", cfg.seed, "master seed (64-bit unsigned)")
      ->required();
  perturb_cmd->add_option("--out", cfg.out_path, "released CSV path")
      ->default_val("perturbed.csv");
  perturb_cmd->add_option("--matrix-out", cfg.matrix_path, "matrix artifact path")
      ->default_val("matrix.json");
  perturb_cmd->add_flag("--print-matrix", print_matrix,
                        "print the rounded transition matrix");
  perturb_cmd->add_flag("--pretty", cfg.pretty, "indent JSON output");
  perturb_cmd->callback([&]() { do_perturb(cfg, out, print_matrix); });

  CLI::App* risk = app.add_subcommand(
      "risk", "compute the exact re-identification risk profile");
  risk->add_option("--plan", cfg.plan_path, "plan artifact")->required();
  risk->add_option("--input", cfg.input_path, "input CSV file")->required();
  risk->add_option("--column", cfg.column, "name of the categorical column")
      ->required();
  risk->add_option("--amax", cfg.a_max_cap,
                   "cap the profile at this released count")
      ->check(CLI::PositiveNumber);
  risk->add_option("--out", cfg.out_path, "risk artifact path")
      ->default_val("risk.json");
  risk->add_flag("--pretty", cfg.pretty, "indent JSON output");
  risk->callback([&]() { do_risk(cfg, out); });

  CLI::App* simulate =
      app.add_subcommand("simulate", "Monte Carlo validation of a plan");
  simulate->add_option("--plan", cfg.plan_path, "plan artifact")->required();
  simulate->add_option("--input", cfg.input_path, "input CSV file")->required();
  simulate->add_option("--column", cfg.column, "name of the categorical column")
      ->required();
  simulate->add_option("--replicates", cfg.replicates, "number of replicates")
      ->required()
      ->check(CLI::PositiveNumber);
  simulate->add_option("--seed", cfg.seed, "master seed (64-bit unsigned)")
      ->required();
  simulate->add_option("--jobs", cfg.jobs, "worker threads")
      ->default_val(1)
      ->check(CLI::PositiveNumber);
  simulate->add_option("--out", cfg.out_path, "report artifact path")
      ->default_val("report.json");
  simulate->add_option("--trace-csv", cfg.trace_path,
                       "also write per-replicate counts as CSV");
  simulate->add_flag("--pretty", cfg.pretty, "indent JSON output");
  simulate->callback([&]() { do_simulate(cfg, out); });

  CLI::App* table = app.add_subcommand(
      "blocktable", "print minimum block sizes for T1 = 1..10");
  table->add_flag("--json", table_json, "machine-readable output");
  table->callback([&]() { do_blocktable(table_json, out); });

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.push_back("pram");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(argv_storage.size());
  for (const auto& s : argv_storage) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const PlanningError& e) {
    err << "error: " << e.what() << "\n";
    err << "best achievable bound: " << fmt(e.best_achievable_xi(), 6) << "\n";
    return kExitInfeasible;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace pram
