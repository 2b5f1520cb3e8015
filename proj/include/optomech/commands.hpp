#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "optomech/config.hpp"

namespace optomech {

enum class OutputFormat { csv, json };

struct CommandOptions {
    std::filesystem::path out_dir = ".";
    std::optional<std::uint64_t> seed;  // overrides the config seed
    OutputFormat format = OutputFormat::csv;
    std::optional<std::filesystem::path> input;  // record (calibrate-demo) or sweep file (fringe-fit)
};

struct CommandResult {
    nlohmann::ordered_json summary;
    std::vector<std::filesystem::path> files;  // relative to out_dir, in write order
    std::vector<std::string> warnings;
};

CommandResult cmd_budget(const RunConfig& config, const CommandOptions& options);
CommandResult cmd_sweep(const RunConfig& config, const CommandOptions& options);
CommandResult cmd_calibrate_demo(const RunConfig& config, const CommandOptions& options);
CommandResult cmd_fringe_fit(const RunConfig& config, const CommandOptions& options);

// Budget spectra as a versioned table (frequency_hz, quantum/thermal/total/sql
// ASDs in m/rtHz, ratio_db_power).
CsvTable budget_table(const BudgetReport& report);

// Full command line: verb, flags, dispatch, error reporting. Returns the
// process exit code (0 ok, 1 runtime, 2 validation).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace optomech
