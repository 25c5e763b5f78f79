#include "pram/io.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

namespace pram {

namespace {

struct RawField {
  std::string raw;      // original bytes, quotes included
  std::string decoded;  // unescaped cell value
};

using RawRecord = std::vector<RawField>;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path + "'");
  return buffer.str();
}

// Splits CSV text into records of raw+decoded fields. Quoted fields may
// contain commas, escaped quotes, and newlines; CRLF and LF both terminate
// records.
std::vector<RawRecord> parse_csv(const std::string& text) {
  std::vector<RawRecord> records;
  RawRecord record;
  RawField field;
  bool quoted = false;
  bool record_open = false;

  auto end_field = [&]() {
    record.push_back(std::move(field));
    field = RawField{};
  };
  auto end_record = [&]() {
    end_field();
    records.push_back(std::move(record));
    record = RawRecord{};
    record_open = false;
  };

  for (std::size_t pos = 0; pos < text.size(); ++pos) {
    const char ch = text[pos];
    if (quoted) {
      field.raw.push_back(ch);
      if (ch == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          field.decoded.push_back('"');
          field.raw.push_back('"');
          ++pos;
        } else {
          quoted = false;
        }
      } else {
        field.decoded.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (field.raw.empty()) {
          quoted = true;
          field.raw.push_back(ch);
        } else {
          field.raw.push_back(ch);
          field.decoded.push_back(ch);
        }
        record_open = true;
        break;
      case ',':
        end_field();
        record_open = true;
        break;
      case '\r':
        if (pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        field.raw.push_back(ch);
        field.decoded.push_back(ch);
        record_open = true;
        break;
    }
  }
  if (quoted)
    throw ValidationError("csv: unterminated quoted field at end of file");
  if (record_open || !field.raw.empty() || !record.empty()) end_record();
  return records;
}

std::string encode_field(const std::string& value) {
  const bool needs_quotes =
      value.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quotes) return value;
  std::string out = "\"";
  for (char ch : value) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

std::size_t column_index(const RawRecord& header, const std::string& name,
                         const std::string& path) {
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c].decoded == name) return c;
  }
  throw ValidationError("csv: column '" + name + "' not found in '" + path + "'");
}

template <typename T>
T field_as(const nlohmann::json& j, const char* key) {
  if (!j.contains(key))
    throw ValidationError(std::string("plan file: missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(std::string("plan file: field '") + key +
                          "' has the wrong type");
  }
}

}  // namespace

CsvColumn read_categorical_csv(const std::string& path,
                               const std::string& column_name) {
  const std::vector<RawRecord> records = parse_csv(read_file(path));
  if (records.empty()) throw ValidationError("csv: '" + path + "' has no header");
  const RawRecord& header = records[0];
  const std::size_t col = column_index(header, column_name, path);

  CategoricalColumn column;
  std::unordered_map<std::string, int> index_of;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const RawRecord& record = records[r];
    if (record.size() != header.size())
      throw ValidationError("csv: data row " + std::to_string(r) + " has " +
                            std::to_string(record.size()) + " fields, header has " +
                            std::to_string(header.size()));
    const std::string& value = record[col].decoded;
    if (value.empty())
      throw ValidationError("csv: empty cell in column '" + column_name +
                            "' at data row " + std::to_string(r));
    auto [it, inserted] =
        index_of.try_emplace(value, static_cast<int>(column.labels.size()));
    if (inserted) column.labels.push_back(value);
    column.values.push_back(it->second);
  }

  CsvColumn result;
  result.table = frequencies(column);
  result.column = std::move(column);
  return result;
}

void write_perturbed_csv(const std::string& original_path,
                         const std::string& column_name,
                         const CategoricalColumn& released,
                         const std::string& out_path) {
  const std::vector<RawRecord> records = parse_csv(read_file(original_path));
  if (records.empty())
    throw ValidationError("csv: '" + original_path + "' has no header");
  const RawRecord& header = records[0];
  const std::size_t col = column_index(header, column_name, original_path);
  if (records.size() - 1 != released.values.size())
    throw ValidationError(
        "csv: released column has " + std::to_string(released.values.size()) +
        " records, file has " + std::to_string(records.size() - 1));

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + out_path + "' for writing");
  for (std::size_t r = 0; r < records.size(); ++r) {
    const RawRecord& record = records[r];
    if (record.size() != header.size())
      throw ValidationError("csv: data row " + std::to_string(r) +
                            " has a different field count than the header");
    for (std::size_t c = 0; c < record.size(); ++c) {
      if (c) out << ',';
      if (r == 0 || c != col) {
        out << record[c].raw;
        continue;
      }
      const std::string& label =
          released.labels[static_cast<std::size_t>(released.values[r - 1])];
      // Unchanged cells keep their original bytes.
      out << (record[c].decoded == label ? record[c].raw : encode_field(label));
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing '" + out_path + "'");
}

nlohmann::json plan_to_json(const BlockPlan& plan, const FrequencyTable& freq) {
  return nlohmann::json{
      {"target_index", plan.target_index},
      {"target_label",
       freq.labels[static_cast<std::size_t>(plan.target_index)]},
      {"xi_requested", plan.xi_requested},
      {"xi_achieved", plan.xi_achieved},
      {"theta", plan.theta},
      {"k1", plan.k1},
      {"blocks", plan.blocks},
      {"labels", freq.labels},
      {"counts", freq.counts},
  };
}

PlanFile plan_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("plan file: not a JSON object");
  auto labels = field_as<std::vector<std::string>>(j, "labels");
  auto counts = field_as<std::vector<std::int64_t>>(j, "counts");
  PlanFile file;
  file.table = validate_frequency_table(std::move(labels), std::move(counts));
  file.plan = BlockPlan::validated(
      file.table, field_as<int>(j, "target_index"),
      field_as<double>(j, "xi_requested"), field_as<double>(j, "xi_achieved"),
      field_as<double>(j, "theta"),
      field_as<std::vector<std::vector<int>>>(j, "blocks"));
  return file;
}

nlohmann::json matrix_to_json(const TransitionMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < m.k; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < m.k; ++j) row.push_back(m.at(i, j));
    rows.push_back(std::move(row));
  }
  return nlohmann::json{
      {"k", m.k}, {"block_of", m.block_of}, {"p", std::move(rows)}};
}

TransitionMatrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("matrix file: not a JSON object");
  const int k = field_as<int>(j, "k");
  auto block_of = field_as<std::vector<int>>(j, "block_of");
  auto rows = field_as<std::vector<std::vector<double>>>(j, "p");
  if (static_cast<int>(rows.size()) != k)
    throw ValidationError("matrix file: row count is not k");
  std::vector<double> p;
  p.reserve(static_cast<std::size_t>(k) * static_cast<std::size_t>(k));
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != k)
      throw ValidationError("matrix file: row length is not k");
    p.insert(p.end(), row.begin(), row.end());
  }
  return TransitionMatrix::validated(k, std::move(p), std::move(block_of));
}

nlohmann::json risk_profile_to_json(const RiskProfile& profile) {
  nlohmann::json by_a = nlohmann::json::array();
  for (const auto& [a, r1] : profile.r1_by_a)
    by_a.push_back(nlohmann::json{{"a", a}, {"r1", r1}});
  return nlohmann::json{
      {"r1_by_a", std::move(by_a)},   {"psi_bound", profile.psi_bound},
      {"max_risk", profile.max_risk}, {"argmax_a", profile.argmax_a},
      {"xi_target", profile.xi_target}, {"certified", profile.certified},
  };
}

nlohmann::json report_to_json(const SimulationReport& report,
                              const std::vector<std::string>& labels) {
  return nlohmann::json{
      {"replicates", report.replicates},
      {"master_seed", report.master_seed},
      {"rng_name", report.rng_name},
      {"labels", labels},
      {"mse_per_category", report.mse_per_category},
      {"mean_proportion_per_category", report.mean_proportion_per_category},
      {"avg_correct_match", report.avg_correct_match},
  };
}

nlohmann::json read_json_file(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("invalid JSON in '" + path + "': " + e.what());
  }
}

void write_json_file(const nlohmann::json& j, const std::string& path,
                     bool pretty) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << (pretty ? j.dump(2) : j.dump()) << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace pram
