#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stomod/cli/run_config.hpp"
#include "stomod/cli/table.hpp"

namespace stomod::cli {

enum class Command { operating_point, psd_map, asymmetry_map, bandwidth, error_analysis };

[[nodiscard]] std::optional<Command> parse_command(std::string_view name);
[[nodiscard]] std::string_view command_name(Command command);

struct RunOptions {
    int jobs = 1;
};

[[nodiscard]] Table cmd_operating_point(const RunConfig& config);
[[nodiscard]] Table cmd_psd_map(const RunConfig& config, const RunOptions& options = {});
[[nodiscard]] Table cmd_asymmetry_map(const RunConfig& config, const RunOptions& options = {});
[[nodiscard]] Table cmd_bandwidth(const RunConfig& config, const RunOptions& options = {});
[[nodiscard]] Table cmd_error_analysis(const RunConfig& config, const RunOptions& options = {});

[[nodiscard]] Table run_command(Command command, const RunConfig& config, const RunOptions& options = {});

/// Metadata lines for the CSV preamble (version, command, config hash).
[[nodiscard]] std::vector<std::string> provenance(Command command, const RunConfig& config);

/// Validates, runs and renders; the string is the exact file content.
[[nodiscard]] std::string render_command(Command command, const RunConfig& config, const RunOptions& options = {});

}  // namespace stomod::cli
