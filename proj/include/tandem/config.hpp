#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tandem/engine.hpp"
#include "tandem/models.hpp"

namespace tandem {

enum class Command { kValidate, kSolve, kSimulate, kSweep };

struct RunConfig {
    Command command{Command::kValidate};
    std::string scenario_path;
    std::vector<double> cost_list{1e-2, 1e-3, 1e-4};
    std::size_t trials{10000};
    std::uint64_t seed{42};
    std::string out_path;  // empty: standard output
    std::string format{"csv"};
    std::size_t grid{180};
    ResetPolicy reset{ResetPolicy::kResetToPrior};
    RandomizationMode randomization{RandomizationMode::kFusionDriven};
    std::size_t block_b{1};
    std::uint64_t horizon{10'000'000};
    std::string transcript_path;
    std::optional<double> centralized_constant;
    std::size_t threads{0};
};

/// Command-line values; a set field overrides the scenario file's "run" block.
struct Overrides {
    std::optional<double> cost;
    std::optional<std::vector<double>> cost_list;
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_path;
    std::optional<std::string> format;
    std::optional<std::size_t> grid;
    std::optional<std::string> reset;
    std::optional<std::string> randomization;
    std::optional<std::size_t> block_b;
    std::optional<std::uint64_t> horizon;
    std::optional<std::string> transcript_path;
    std::optional<std::size_t> threads;
};

struct ParsedConfig {
    RunConfig run;
    Scenario scenario;
};

Command parse_command(const std::string& name);
std::string command_name(Command c);
std::vector<double> parse_cost_list(const std::string& csv);

/// Reads the scenario file, applies its optional "run" block and then the
/// overrides. Throws Error(kParseError) or Error(kValidationError).
ParsedConfig parse_config(const std::string& path, Command command, const Overrides& overrides = {});
ParsedConfig parse_config_json(const nlohmann::json& doc, Command command, const Overrides& overrides = {});

nlohmann::json to_json(const RunConfig& cfg);

/// Exit codes: 0 success, 1 validation failure, 2 runtime error.
int run_command(const ParsedConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace tandem
