#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nadqec/experiments.hpp"

using namespace nadqec;

namespace {

const char* kMulti = R"({
  "kind": "multiqec",
  "output": "m.csv",
  "seed": 9,
  "parameters": {
    "T1_us": 220,
    "total_free_us": {"start": 0, "stop": 120, "step": 30}
  }
})";

int error_line(const std::string& text) {
  try {
    parse_spec(text, "t.json");
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

std::string error_message(const std::string& text) {
  try {
    parse_spec(text, "t.json");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("catalog") {
  CHECK(experiment_catalog().size() == 7);
  const auto j = catalog_json();
  CHECK(j.size() == 7);
  for (const auto& e : j) CHECK_FALSE(e["figure"].get<std::string>().empty());
  CHECK(catalog_text().find("oracle-check") != std::string::npos);
}

TEST_CASE("parse_spec validation") {
  const ExperimentSpec s = parse_spec(kMulti, "t.json");
  CHECK(s.kind == "multiqec");
  CHECK(s.seed == 9);

  const std::string missing = R"({
  "kind": "multiqec",
  "parameters": {
    "total_free_us": [0, 30]
  }
})";
  CHECK(error_message(missing).find("T1_us") != std::string::npos);
  CHECK(error_line(missing) == 3);

  const std::string unknown = "{\n \"kind\": \"synth\",\n \"parameters\": {\n  \"restart\": 3\n }\n}";
  CHECK(error_line(unknown) == 4);
  CHECK(error_message(unknown).find("restart") != std::string::npos);

  CHECK(error_line("{\n \"kind\": \"nope\"\n}") == 2);
  CHECK(error_line("{\n \"kind\": \"synth\",\n \"seed\": -1\n}") == 3);
  CHECK(error_line("{\n \"kind\": \"synth\",\n\n ]") == 4);
  CHECK(error_line("{\"output\": \"x\"}") == 1);

  // type errors surface when the experiment reads the field
  const ExperimentSpec bad = parse_spec("{\n\"kind\": \"multiqec\",\n\"parameters\": {\n\"T1_us\": 100,\n\"total_free_us\": [0],\n\"variant\": \"best\"\n}}", "t.json");
  try {
    run_experiment(bad);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 6);
  }
}

TEST_CASE("same spec gives identical output") {
  const ExperimentOutput a = run_experiment(parse_spec(kMulti));
  const ExperimentOutput b = run_experiment(parse_spec(kMulti));
  REQUIRE(a.files.size() == 1);
  CHECK(a.files[0].content == b.files[0].content);
  CHECK(a.files[0].content.rfind("total_evolution_us,fidelity,success_probability,rounds,variant,chadd\n", 0) == 0);
  CHECK(a.summary.contains("fit"));

  const char* gain = R"({"kind": "gain-surface", "seed": 4, "parameters": {"t1_us": [100], "delay_us": [20], "shots": 2000}})";
  const ExperimentOutput g1 = run_experiment(parse_spec(gain));
  const ExperimentOutput g2 = run_experiment(parse_spec(gain));
  REQUIRE(g1.files.size() == 2);
  CHECK(g1.files[1].content == g2.files[1].content);
  CHECK(g1.files[1].content.find(",seed\n") != std::string::npos);
}

TEST_CASE("oracle-check passes") {
  const ExperimentOutput out = run_experiment(default_check_spec());
  CHECK(out.passed);
  CHECK(out.summary["success_form_matched"] == "printed_full");
  std::istringstream rows(out.files[0].content);
  std::string line;
  std::getline(rows, line);
  int n = 0;
  while (std::getline(rows, line)) {
    ++n;
    CHECK(line.back() == '1');
  }
  CHECK(n == 6);
}

TEST_CASE("write_outputs writes a reproducible manifest") {
  const auto dir = std::filesystem::temp_directory_path() / "nadqec_test_outputs";
  std::filesystem::remove_all(dir);
  ExperimentSpec s = parse_spec(kMulti);
  s.output = (dir / "sub" / "m.csv").string();
  const std::string manifest = write_outputs(s, run_experiment(s), 0.5);
  std::ifstream in(manifest);
  const auto j = nlohmann::json::parse(in);
  CHECK(j["kind"] == "multiqec");
  CHECK(j["seed"] == 9);
  CHECK(j["spec"]["parameters"]["T1_us"] == 220);
  CHECK(std::filesystem::exists(s.output));
  // The echoed spec parses back to the same run.
  const ExperimentSpec again = parse_spec(j["spec"].dump());
  CHECK(run_experiment(again).files[0].content == run_experiment(s).files[0].content);
  std::filesystem::remove_all(dir);
}
