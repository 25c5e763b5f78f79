#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "pram/io.hpp"
#include "pram/matrix.hpp"
#include "pram/planner.hpp"
#include "pram/risk.hpp"
#include "reference_data.hpp"

using namespace pram;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "pram_io_tests";
  fs::create_directories(dir);
  return dir;
}

fs::path write_text(const std::string& name, const std::string& content) {
  const fs::path path = scratch_dir() / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.close();
  return path;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

FrequencyTable demo_table() {
  std::vector<std::string> labels;
  std::vector<std::int64_t> counts;
  for (std::size_t i = 0; i < refdata::kDemoCounts.size(); ++i) {
    labels.push_back(std::string(1, static_cast<char>('a' + i)));
    counts.push_back(refdata::kDemoCounts[i]);
  }
  return validate_frequency_table(labels, counts);
}

}  // namespace

TEST_CASE("csv reading follows first appearance order") {
  const fs::path path = write_text(
      "basic.csv", "id,color\n1,red\n2,blue\n3,red\n");
  const CsvColumn got = read_categorical_csv(path.string(), "color");
  CHECK(got.column.labels == std::vector<std::string>{"red", "blue"});
  CHECK(got.column.values == std::vector<int>{0, 1, 0});
  CHECK(got.table.counts == std::vector<std::int64_t>{2, 1});
}

TEST_CASE("csv reading handles quoting, crlf, and missing trailing newline") {
  const fs::path quoted = write_text(
      "quoted.csv",
      "c,note\n\"a,b\",1\n\"say \"\"hi\"\"\",2\n\"line1\nline2\",3\n\"a,b\",4\n");
  const CsvColumn got = read_categorical_csv(quoted.string(), "c");
  CHECK(got.column.labels ==
        std::vector<std::string>{"a,b", "say \"hi\"", "line1\nline2"});
  CHECK(got.table.counts == std::vector<std::int64_t>{2, 1, 1});

  const fs::path crlf = write_text("crlf.csv", "c\r\nx\r\ny\r\n");
  const CsvColumn win = read_categorical_csv(crlf.string(), "c");
  CHECK(win.column.labels == std::vector<std::string>{"x", "y"});

  const fs::path bare = write_text("bare.csv", "c\nx\ny");
  CHECK(read_categorical_csv(bare.string(), "c").column.values.size() == 2);

  const fs::path empty_rows = write_text("headeronly.csv", "c,d\n");
  CHECK(read_categorical_csv(empty_rows.string(), "c").column.values.empty());
}

TEST_CASE("csv reading rejects malformed input") {
  const fs::path unterminated = write_text("open.csv", "c\n\"abc\n");
  CHECK_THROWS_AS(read_categorical_csv(unterminated.string(), "c"),
                  ValidationError);

  const fs::path ragged = write_text("ragged.csv", "a,b\n1,2\n3\n");
  CHECK_THROWS_AS(read_categorical_csv(ragged.string(), "a"), ValidationError);

  const fs::path blank = write_text("blank.csv", "a,b\n1,\n");
  CHECK_THROWS_AS(read_categorical_csv(blank.string(), "b"), ValidationError);

  const fs::path fine = write_text("fine.csv", "a,b\n1,2\n");
  CHECK_THROWS_AS(read_categorical_csv(fine.string(), "missing"),
                  ValidationError);

  CHECK_THROWS_AS(
      read_categorical_csv((scratch_dir() / "absent.csv").string(), "c"),
      IoError);
}

TEST_CASE("perturbed csv keeps unchanged bytes and rewrites changed cells") {
  const fs::path original = write_text(
      "release.csv",
      "id,color,note\n1,red,\"keep, comma\"\n2,\"blue\",plain\n3,red,x\n"
      "4,\"red\",y\n");
  const CategoricalColumn released =
      CategoricalColumn::validated({0, 0, 1, 0}, {"red", "blue"});
  const fs::path out = scratch_dir() / "release_out.csv";
  write_perturbed_csv(original.string(), "color", released, out.string());
  CHECK(read_text(out) ==
        "id,color,note\n1,red,\"keep, comma\"\n2,red,plain\n3,blue,x\n"
        "4,\"red\",y\n");
}

TEST_CASE("perturbed csv quotes labels that need it and normalizes line ends") {
  const fs::path original = write_text("tiny.csv", "c\r\nred\r\nred\r\n");
  const CategoricalColumn released =
      CategoricalColumn::validated({1, 0}, {"red", "w,x"});
  const fs::path out = scratch_dir() / "tiny_out.csv";
  write_perturbed_csv(original.string(), "c", released, out.string());
  CHECK(read_text(out) == "c\n\"w,x\"\nred\n");

  const CategoricalColumn wrong_size =
      CategoricalColumn::validated({0}, {"red"});
  CHECK_THROWS_AS(
      write_perturbed_csv(original.string(), "c", wrong_size, out.string()),
      ValidationError);
}

TEST_CASE("plan artifacts round trip") {
  const FrequencyTable freq = demo_table();
  const BlockPlan plan = plan_blocks(freq, 0, refdata::kDemoXi);
  const nlohmann::json j = plan_to_json(plan, freq);
  const PlanFile back = plan_from_json(j);
  CHECK(back.plan.target_index == plan.target_index);
  CHECK(back.plan.xi_requested == plan.xi_requested);
  CHECK(back.plan.xi_achieved == plan.xi_achieved);
  CHECK(back.plan.theta == plan.theta);
  CHECK(back.plan.blocks == plan.blocks);
  CHECK(back.plan.k1 == plan.k1);
  CHECK(back.table.labels == freq.labels);
  CHECK(back.table.counts == freq.counts);

  nlohmann::json missing = j;
  missing.erase("theta");
  CHECK_THROWS_AS(plan_from_json(missing), ValidationError);

  nlohmann::json wrong_type = j;
  wrong_type["theta"] = "fast";
  CHECK_THROWS_AS(plan_from_json(wrong_type), ValidationError);

  nlohmann::json bad_partition = j;
  bad_partition["blocks"] = nlohmann::json::array({{0}});
  CHECK_THROWS_AS(plan_from_json(bad_partition), ValidationError);

  nlohmann::json bad_theta = j;
  bad_theta["theta"] = 5.0;
  CHECK_THROWS_AS(plan_from_json(bad_theta), ValidationError);
}

TEST_CASE("matrix artifacts round trip") {
  const FrequencyTable freq = demo_table();
  const BlockPlan plan = plan_blocks(freq, 0, refdata::kDemoXi);
  const TransitionMatrix m = build_ifpr(freq, plan);
  const nlohmann::json j = matrix_to_json(m);
  const TransitionMatrix back = matrix_from_json(j);
  CHECK(back.k == m.k);
  CHECK(back.p == m.p);
  CHECK(back.block_of == m.block_of);

  nlohmann::json tampered = j;
  tampered["p"][0][0] = 0.9;
  CHECK_THROWS_AS(matrix_from_json(tampered), ValidationError);
}

TEST_CASE("risk and report serialization carry the headline fields") {
  const FrequencyTable freq = demo_table();
  const BlockPlan plan = plan_blocks(freq, 0, refdata::kDemoXi);
  const TransitionMatrix m = build_ifpr(freq, plan);
  const RiskProfile profile = risk_profile(freq, plan, m, 10);
  const nlohmann::json j = risk_profile_to_json(profile);
  CHECK(j.at("r1_by_a").size() == 10);
  CHECK(j.at("max_risk").get<double>() == profile.max_risk);
  CHECK(j.at("argmax_a").get<std::int64_t>() == 1);
  CHECK(j.at("certified").get<bool>());
  CHECK(j.at("psi_bound").get<double>() == profile.psi_bound);

  SimulationReport report;
  report.replicates = 3;
  report.master_seed = 9;
  report.mse_per_category = {0.0, 1.0};
  report.mean_proportion_per_category = {0.5, 0.5};
  report.avg_correct_match = 0.25;
  report.rng_name = "mt19937_64";
  const nlohmann::json rj = report_to_json(report, {"a", "b"});
  CHECK(rj.at("rng_name") == "mt19937_64");
  CHECK(rj.at("labels").size() == 2);
  CHECK(rj.at("avg_correct_match").get<double>() == 0.25);
  CHECK(rj.at("master_seed").get<std::uint64_t>() == 9);
}

TEST_CASE("json files read and write with both layouts") {
  const fs::path pretty = scratch_dir() / "pretty.json";
  const fs::path compact = scratch_dir() / "compact.json";
  const nlohmann::json j = {{"a", 1}, {"b", {1, 2}}};
  write_json_file(j, pretty.string(), true);
  write_json_file(j, compact.string(), false);
  CHECK(read_json_file(pretty.string()) == j);
  CHECK(read_json_file(compact.string()) == j);
  const std::string pretty_text = read_text(pretty);
  CHECK(pretty_text.find("\n  ") != std::string::npos);
  const std::string compact_text = read_text(compact);
  CHECK(compact_text.find("  ") == std::string::npos);
  CHECK(compact_text.back() == '\n');

  const fs::path garbage = write_text("garbage.json", "{not json");
  CHECK_THROWS_AS(read_json_file(garbage.string()), ValidationError);
  CHECK_THROWS_AS(read_json_file((scratch_dir() / "nofile.json").string()),
                  IoError);
  CHECK_THROWS_AS(
      write_json_file(j, (scratch_dir() / "no_dir" / "x.json").string(), false),
      IoError);
}
