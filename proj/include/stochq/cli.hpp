#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace stochq::cli {

enum class Command { embed, sh_sim, divisibility, correspond, unistochastic, dilate, extract_hamiltonian };

std::string to_string(Command c);
std::optional<Command> command_from_string(const std::string& name);

enum ExitCode : int { kOk = 0, kValidationFailure = 1, kIndeterminate = 2 };

// Unset numeric parameters fall back to per-command defaults (see --help).
struct ExperimentConfig {
  Command command = Command::correspond;
  std::filesystem::path input;
  std::filesystem::path output;
  std::optional<double> dt;
  std::optional<double> T;
  std::optional<double> tol;
  std::uint64_t seed = 42;
  std::optional<long> max_iters;
  int jobs = 1;
  long stride = 100;
  std::string integrator = "strang";
};

// Applies keys of a --config object (same names as the long flags, e.g.
// "dt", "max-iters") on top of `config`.
void apply_config_overrides(ExperimentConfig& config, const nlohmann::json& overrides);

struct Report {
  nlohmann::json json;
  std::optional<std::string> csv;  // written next to the JSON with extension .csv
};

std::filesystem::path csv_path_for(const std::filesystem::path& json_path);

// Writes `report.json` (2-space indent, trailing newline) to `path` and the
// CSV, if any, to csv_path_for(path).
void emit_report(const Report& report, const std::filesystem::path& path);

// Runs one experiment and writes its artifacts. Errors are reported on `err`
// as a JSON object {"error": ..., "field": ...}.
int run(const ExperimentConfig& config, std::ostream& err);

// Builds the report without touching the filesystem (used by run()).
Report execute(const ExperimentConfig& config, int* exit_code);

// Full command-line entry point: `stochq <command> [flags]`.
int main_entry(int argc, char** argv);

}  // namespace stochq::cli
