#pragma once

// Configuration-driven experiment runner behind the `nadqec` tool.
//
// A spec is a JSON object:
//   { "kind": "...", "output": "path.csv", "seed": 1, "parameters": { ... } }
// Every kind writes its main CSV to `output`, side files next to it, and a
// run manifest to `<output>.manifest.json`.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nadqec/qcore.hpp"

namespace nadqec {

/// Invalid spec; the message starts with "<origin>:<line>:".
class ConfigError : public InvalidArgument {
 public:
  ConfigError(const std::string& origin, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

struct ExperimentSpec {
  std::string kind;
  std::string output;
  std::uint64_t seed = 1;
  nlohmann::json parameters = nlohmann::json::object();
  nlohmann::json raw;
  std::string source_text;
  std::string origin;
};

/// Parses and validates a spec (kind known, required fields present, no
/// unknown parameters, field types). Throws ConfigError.
ExperimentSpec parse_spec(const std::string& text, const std::string& origin = "<spec>");

struct OutputFile {
  std::string path;
  std::string content;
};

struct ExperimentOutput {
  std::vector<OutputFile> files;
  nlohmann::json summary = nlohmann::json::object();
  /// False when the experiment ran but its own checks failed (oracle-check).
  bool passed = true;
};

/// Runs the experiment without touching the filesystem. Deterministic in
/// the spec: equal specs give byte-identical files.
ExperimentOutput run_experiment(const ExperimentSpec& spec);

/// Writes the files and the manifest; returns the manifest path.
std::string write_outputs(const ExperimentSpec& spec, const ExperimentOutput& out, double wall_seconds);

struct CatalogEntry {
  std::string kind;
  std::string description;
  std::string figure;
  std::vector<std::string> required;
  std::vector<std::string> optional;
};

const std::vector<CatalogEntry>& experiment_catalog();
std::string catalog_text();
nlohmann::json catalog_json();

/// Default oracle-check spec used by `nadqec check`.
ExperimentSpec default_check_spec();

const char* library_version();

}  // namespace nadqec
