#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "pram/perturb.hpp"
#include "pram/types.hpp"

namespace pram {

/// Everything a command run needs. Populated from CLI flags only; seeds are
/// never read from the environment.
struct RunConfig {
  std::string input_path;
  std::string column;
  std::string target_label;
  double xi = 0.0;
  std::uint64_t seed = 0;
  std::int64_t replicates = 0;
  std::string plan_path;
  std::string out_path;
  std::string matrix_path;
  std::string trace_path;
  std::int64_t a_max_cap = -1;
  int jobs = 1;
  bool pretty = false;
};

struct CsvColumn {
  CategoricalColumn column;
  FrequencyTable table;  // unvalidated; consumers validate
};

/// Reads one named column from a CSV file. Dialect: comma separator,
/// double-quote escaping, UTF-8, header row required. Labels are assigned
/// in order of first appearance. Empty cells and ragged rows are rejected
/// with the offending data row number.
CsvColumn read_categorical_csv(const std::string& path,
                               const std::string& column_name);

/// Writes a copy of the original CSV with the named column's values replaced
/// by the released ones. Unchanged cells keep their original bytes; all
/// other columns are untouched. Line endings are normalized to LF.
void write_perturbed_csv(const std::string& original_path,
                         const std::string& column_name,
                         const CategoricalColumn& released,
                         const std::string& out_path);

nlohmann::json plan_to_json(const BlockPlan& plan, const FrequencyTable& freq);

struct PlanFile {
  BlockPlan plan;
  FrequencyTable table;
};

/// Parses and re-validates a plan artifact. Missing or ill-typed fields
/// raise ValidationError naming the field.
PlanFile plan_from_json(const nlohmann::json& j);

nlohmann::json matrix_to_json(const TransitionMatrix& m);
TransitionMatrix matrix_from_json(const nlohmann::json& j);

nlohmann::json risk_profile_to_json(const RiskProfile& profile);

nlohmann::json report_to_json(const SimulationReport& report,
                              const std::vector<std::string>& labels);

/// Reads and parses a JSON artifact; parse failures raise ValidationError,
/// filesystem failures raise IoError.
nlohmann::json read_json_file(const std::string& path);

/// Writes with a trailing newline; pretty switches to 2-space indentation
/// and changes nothing but whitespace.
void write_json_file(const nlohmann::json& j, const std::string& path,
                     bool pretty);

}  // namespace pram
