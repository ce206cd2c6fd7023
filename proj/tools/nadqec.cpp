#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "nadqec/experiments.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

constexpr int kOk = 0;
constexpr int kConfig = 2;
constexpr int kNumerical = 3;

// NADQEC_THREADS overrides OMP_NUM_THREADS when set to a positive integer.
int apply_thread_override() {
  const char* v = std::getenv("NADQEC_THREADS");
  if (v == nullptr || *v == '\0') return kOk;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1) {
    std::cerr << "nadqec: NADQEC_THREADS must be a positive integer (got '" << v << "')\n";
    return kConfig;
  }
#ifdef _OPENMP
  omp_set_num_threads(static_cast<int>(n));
#endif
  return kOk;
}

int execute(const nadqec::ExperimentSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  const nadqec::ExperimentOutput out = nadqec::run_experiment(spec);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::string manifest = nadqec::write_outputs(spec, out, wall);
  for (const auto& f : out.files) std::cout << "wrote " << f.path << "\n";
  std::cout << "wrote " << manifest << "\n";
  if (spec.kind == "oracle-check") {
    std::cout << "\n" << out.files.front().content;
  }
  std::cout << out.summary.dump(2) << "\n";
  if (!out.passed) {
    std::cerr << "nadqec: " << spec.kind << " checks failed\n";
    return kNumerical;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noise-adapted 3-qubit QEC simulator and experiment runner"};
  app.set_version_flag("--version", nadqec::library_version());
  app.require_subcommand(1);

  std::string spec_path;
  auto* run = app.add_subcommand("run", "Run the experiment described by a JSON spec");
  run->add_option("spec", spec_path, "Spec file")->required();

  bool as_json = false;
  auto* list = app.add_subcommand("list", "List experiment kinds");
  list->add_flag("--json", as_json, "Emit the catalog as JSON");

  std::string check_output = "oracle-check.csv";
  auto* check = app.add_subcommand("check", "Run the oracle and invariant suite");
  check->add_option("-o,--output", check_output, "CSV path for the check table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  if (const int rc = apply_thread_override(); rc != kOk) return rc;

  try {
    if (*list) {
      if (as_json)
        std::cout << nadqec::catalog_json().dump(2) << "\n";
      else
        std::cout << nadqec::catalog_text();
      return kOk;
    }
    nadqec::ExperimentSpec spec;
    if (*check) {
      spec = nadqec::default_check_spec();
      spec.output = check_output;
      spec.raw["output"] = check_output;
    } else {
      std::ifstream in(spec_path, std::ios::binary);
      if (!in) {
        std::cerr << "nadqec: cannot open " << spec_path << "\n";
        return kConfig;
      }
      std::ostringstream text;
      text << in.rdbuf();
      spec = nadqec::parse_spec(text.str(), spec_path);
    }
    return execute(spec);
  } catch (const nadqec::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const nadqec::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
}
