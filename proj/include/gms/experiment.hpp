#pragma once

// Configuration-driven runs of the solver suite. A config is one JSON
// document; every run returns a table plus the resolved config it came from.

#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "gms/optimizer.hpp"

namespace gms {

using Json = nlohmann::ordered_json;

struct ExperimentConfig {
  std::string command;  // figure2 | solve-torus | sweep-t | thresholds | bi-check

  int n1 = 32;
  int n2 = 32;
  double period1 = 2.0 * std::numbers::pi;
  double period2 = 2.0 * std::numbers::pi;

  std::string metricBuiltin = "one-plus-cos-squared";  // or "flat"; empty when a table is used
  std::string metricTable;                              // resolved path of a `theta,h` CSV
  std::string angleMap = "even";                        // even: h(|theta|); half: h(|theta| / 2)

  std::vector<int> k{1};
  std::vector<double> c;
  std::vector<double> kappa;
  std::vector<double> t;

  SolverConfig solver;
  double quadTol = 1e-6;
  int quadMaxLevel = 20;

  std::uint64_t seed = 42;
  int samples = 1000;
  int thetaSamples = 721;

  std::string outputPath;  // empty: stdout
  std::string outputFormat = "csv";
};

struct Diagnostic {
  std::string path;  // field path such as "class.t"; empty for parse errors
  std::string message;
  int line = 0;  // 1-based, parse errors only
  int column = 0;
};

/// Parses and checks a config document. Relative table paths are resolved
/// against `base_dir`. Throws ConfigError naming the offending field.
ExperimentConfig parse_config(const Json& doc, const std::string& base_dir = ".");

/// Reads, parses and checks a config file. Throws ConfigError.
ExperimentConfig load_config(const std::string& path);

/// Every problem found in a config file, without running anything.
std::vector<Diagnostic> validate_config_file(const std::string& path);

/// The config with all defaults filled in.
Json resolved_config(const ExperimentConfig& cfg);

using Cell = std::variant<double, long long, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct RunRecord {
  Json config;
  std::string version;
  std::string command;
  double wallSeconds = 0.0;
  Table payload;
};

/// Executes the configured command.
RunRecord run(const ExperimentConfig& cfg);

/// Header row plus one line per payload row; shortest round-trip numbers.
void write_csv(const Table& table, std::ostream& out);
/// Full record. The wall time is included only when `with_timing` is set so
/// that identical configs give identical bytes.
void write_json(const RunRecord& record, std::ostream& out, bool with_timing = false);

/// Shortest decimal string that reads back to the same double.
std::string format_number(double x);

const char* version_string();

}  // namespace gms
