#pragma once

// Config-driven runner: validates a JSON run configuration, dispatches to a
// command and produces text, JSON and CSV outputs.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace varistab {

inline constexpr const char* kToolkitVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

/// Command-line overrides applied on top of the configuration file.
struct RunOptions {
  std::optional<std::string> command;
  std::optional<std::uint64_t> seed;
};

struct CsvTable {
  std::string name;  // file stem
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct RunReport {
  nlohmann::ordered_json json;
  std::string text;
  std::vector<CsvTable> csv;
  int exit_code = 1;
};

/// Commands accepted by run_config.
const std::vector<std::string>& command_names();

/// Throws ConfigError on schema violations (the message names the field).
RunReport run_config(const nlohmann::json& config, const RunOptions& options = {});

/// Parses the file (ConfigError with line and column on syntax errors) and
/// runs it.
RunReport run_config_file(const std::string& path, const RunOptions& options = {});

/// Writes report.txt, report.json and <table>.csv into `dir` according to
/// `format` (text | json | csv | all). Throws IoError when a file cannot be
/// written.
void emit_report(const RunReport& report, const std::string& dir, const std::string& format);

std::string to_csv(const CsvTable& table);

}  // namespace varistab
