#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

namespace weakmix {

/// Command-line options shared by the subcommands. Values given here
/// override the config file.
struct CommandOptions {
    std::optional<std::string> config;
    std::optional<std::string> data;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> chains;
    std::optional<std::size_t> iters;
    std::optional<std::size_t> burnin;
    std::optional<std::string> family;
    std::optional<std::size_t> k;
    std::optional<int> proposal;
    /// Observations (simulate), draws (prior-sample) or Monte Carlo size (oracle-check).
    std::optional<std::size_t> n;
};

enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitNumerical = 3 };

/// Each command returns an exit code; ValidationError and NumericalError
/// propagate and are mapped by run_command.
int cmd_simulate(const CommandOptions& o, std::ostream& log);
int cmd_fit(const CommandOptions& o, std::ostream& log);
int cmd_prior_sample(const CommandOptions& o, std::ostream& log);
int cmd_summarize(const CommandOptions& o, std::ostream& log);
int cmd_oracle_check(const CommandOptions& o, std::ostream& log);

/// Runs `name` and maps library errors to exit codes 2 and 3.
int run_command(const std::string& name, const CommandOptions& o, std::ostream& log, std::ostream& err);

/// Default oracle suite; `passed` tells whether every check passed.
nlohmann::json oracle_suite(std::size_t n_mc, std::uint64_t seed, bool& passed);

std::string version();

} // namespace weakmix
