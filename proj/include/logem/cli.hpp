#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "logem/config.hpp"

namespace logem::cli {

enum ExitCode : int {
  kSuccess = 0,
  kRuntimeFailure = 1,
  kConfigError = 2,
  kValidationFailure = 3,
};

/// Flags shared by every subcommand; set values override the config's run section.
struct CommandOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<OutputFormat> format;
  unsigned threads = 0;
  bool check_oracle = false;       // simulate only
  bool allow_unvalidated = false;  // non-positivity scenarios only
};

int cmd_simulate(const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_converge(const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_audit(const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_validate(const CommandOptions& options, std::ostream& out, std::ostream& err);

/// Writes to a sibling temp file and renames it into place.
void write_atomically(const std::filesystem::path& path, const std::string& content);

/// SDDE_LOGEM_THREADS when set and valid, otherwise 0 (available parallelism).
unsigned threads_from_environment();

}  // namespace logem::cli
