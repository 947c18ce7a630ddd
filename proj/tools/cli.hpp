#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tracelab/sim.hpp"

namespace tracelab::cli {

enum class Command { simulate, thresholds, analyze, presets };

struct CliRequest {
    Command command = Command::presets;
    std::optional<std::string> config_path;
    std::map<std::string, std::string> overrides;  // flag name (without dashes) -> value
    std::optional<std::string> out_path;
    std::optional<std::string> events_path;
    std::optional<std::uint64_t> seed;
    std::size_t parallelism = 1;
};

/// Applies flag overrides on top of a config. Throws PreconditionError on
/// unknown names or unparsable values.
void apply_overrides(ExperimentConfig& config, const std::map<std::string, std::string>& overrides);

/// Resolved experiment for `simulate`: preset/config file, then flags, then seed
/// (flag, else TRACELAB_SEED, else the config's own seed).
ExperimentConfig resolve_experiment(const CliRequest& request);

/// Parses argv (args[0] is the program name). Returns nullopt after printing
/// help or a parse diagnostic; `status` receives the exit code in that case.
std::optional<CliRequest> parse_request(const std::vector<std::string>& args, std::ostream& out,
                                        std::ostream& err, int& status);

int execute(const CliRequest& request, std::ostream& out, std::ostream& err);

/// parse_request + execute; never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tracelab::cli
