#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "weakmix/postprocess.hpp"
#include "weakmix/priors.hpp"
#include "weakmix/sampler.hpp"
#include "weakmix/types.hpp"

namespace weakmix {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);
double parse_double(std::string_view text);

/// One value per row under a header line.
Dataset read_data_csv(const std::filesystem::path& path);
void write_data_csv(const std::filesystem::path& path, const Dataset& data);

/// Column names of a chain CSV. Component columns are named after the family:
/// mu_i/sigma_i (Gaussian), lambda_i (Poisson), mean_i (exponential).
std::vector<std::string> chain_columns(const ChainResult& chain);
void write_chain_csv(const std::filesystem::path& path, const ChainResult& chain);
ChainResult read_chain_csv(const std::filesystem::path& path);

/// Everything a fit needs besides the data.
struct FitConfig {
    Family family = Family::gaussian;
    std::size_t k = 2;
    PriorSpec prior;
    RunConfig run;
    /// "auto" (two-component sampler for Gaussian k = 2), "general" or "k2".
    std::string sampler = "auto";
    /// Mixture used by `simulate`.
    std::optional<StandardParams> model;
};

FitConfig parse_config(const nlohmann::json& j);
FitConfig read_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const FitConfig& c);

nlohmann::json to_json(const ParamSummary& s);
nlohmann::json to_json(const ComponentTable& t);
nlohmann::json to_json(const Summary& s);
nlohmann::json to_json(const StandardParams& p);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

} // namespace weakmix
