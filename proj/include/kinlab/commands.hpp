#pragma once

// Command dispatch: each command computes a table plus a JSON summary, and
// dispatch() writes them next to each other (CSV + .json) atomically.
//
// Exit codes: 0 success, 1 numerical-validation failure, 2 configuration error.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "kinlab/config.hpp"

namespace kinlab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitConfig = 2;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row);
};

struct CommandResult {
  int exit_code = kExitOk;
  Table table;
  nlohmann::ordered_json summary;  // key scalars of the command
  std::string message;             // one line for the terminal
};

const std::vector<std::string>& command_names();

/// Runs the computation only; errors propagate as exceptions.
CommandResult run_command(const std::string& command, const RunConfig& config);

/// Shortest text that reads back to the same double ("%.17g").
std::string format_double(double v);

/// Header comment with the fingerprint, then the header row and the rows.
std::string render_csv(const Table& table, const std::string& command, const std::string& fingerprint);

/// Writes through a temporary file in the same directory and renames it.
void write_atomic(const std::string& path, const std::string& content);

/// Runs `command`, writes the artifacts, reports on `out`/`err`, returns the exit code.
int dispatch(const std::string& command, const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace kinlab
