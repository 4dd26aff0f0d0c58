#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "weakmix/priors.hpp"
#include "weakmix/random.hpp"
#include "weakmix/types.hpp"

namespace weakmix {

/// How a proposal scale acts on the spread of its proposal. A larger
/// `spread` scale widens the proposal; a larger `concentration` scale (the
/// multiplier inside Beta/Dirichlet proposals) narrows it.
enum class ScaleKind { spread, concentration };

struct ScaleBlock {
    std::string name;
    double scale = 1.0;
    double target = 0.44;
    ScaleKind kind = ScaleKind::spread;
    bool adaptive = true;

    std::size_t batch_accepts = 0;
    std::size_t batch_proposals = 0;
    std::size_t total_accepts = 0;
    std::size_t total_proposals = 0;
    /// Counters restricted to iterations after the adaptation horizon.
    std::size_t post_accepts = 0;
    std::size_t post_proposals = 0;

    double acceptance_rate() const;
    double post_acceptance_rate() const;
};

/// Per-block proposal scales with acceptance counters.
struct ScaleBank {
    std::vector<ScaleBlock> blocks;
    std::size_t batch_index = 0;

    std::size_t add(ScaleBlock block);
    std::size_t index_of(std::string_view name) const;
    const ScaleBlock& at(std::string_view name) const;
    void record(std::size_t block, bool accepted, bool after_horizon);
};

/// Step size of the log-scale update after `batch` completed batches.
double adaptation_step(std::size_t batch);

/// One adaptation round: every adaptive block moves its log-scale by the
/// adaptation step toward its target rate using the acceptance observed in
/// the current batch. Batch counters are reset and the batch index advanced.
ScaleBank adapt_scales(ScaleBank bank);

enum class LambdaProposal {
    /// log lambda' ~ N(log mean(x), eps)
    independent,
    /// log lambda' ~ N(log lambda, eps)
    random_walk,
};

struct RunConfig {
    std::size_t iterations = 10000;
    std::size_t burnin = 1000;
    std::size_t chains = 1;
    std::uint64_t seed = 1;
    double target_scalar = 0.44;
    double target_vector = 0.234;
    std::size_t batch_size = 50;
    /// Iterations during which scales adapt; defaults to iterations / 2.
    std::optional<std::size_t> adapt_horizon;
    /// Keep adapting until the end of the run.
    bool adapt_throughout = false;
    /// k = 2 sampler: 1 = Beta/Dirichlet proposals, 2 = Gaussian random walks.
    int proposal = 1;
    LambdaProposal lambda_proposal = LambdaProposal::independent;
    /// Independent uniform refreshes of the angles.
    bool angle_independent_moves = true;
    /// Uniform random-walk moves of the angles.
    bool angle_walk_moves = true;
    std::size_t thin = 1;

    void validate() const;
    std::size_t horizon() const;
};

struct ChainRecord {
    std::size_t iteration = 0;
    std::variant<GaussianState, RateReparam> state;
    StandardParams standard;
    double log_posterior = 0.0;
    std::vector<std::uint8_t> accepted;
};

struct ChainResult {
    Family family = Family::gaussian;
    std::size_t k = 0;
    std::size_t chain_index = 0;
    std::vector<std::string> block_names;
    std::vector<ChainRecord> records;
    ScaleBank bank;
};

std::vector<ChainResult> mwg_gaussian(const Dataset& data, std::size_t k, const PriorSpec& prior,
                                      const RunConfig& config);
std::vector<ChainResult> mwg_gaussian_k2(const Dataset& data, const PriorSpec& prior,
                                         const RunConfig& config);
std::vector<ChainResult> mwg_poisson(const Dataset& data, std::size_t k, const PriorSpec& prior,
                                     const RunConfig& config);
std::vector<ChainResult> mwg_exponential(const Dataset& data, std::size_t k,
                                         const PriorSpec& prior, const RunConfig& config);

/// Potential scale reduction factor of equally long chains of one scalar.
double gelman_rubin(const std::vector<std::vector<double>>& chains);

using ScalarSelector = std::function<double(const ChainRecord&)>;

/// Named scalar of a record: "mu", "sigma", "sigma_sq", "phi", "phi_sq",
/// "lambda" or "log_posterior".
ScalarSelector select_scalar(std::string_view name);

std::vector<double> trace(const ChainResult& chain, const ScalarSelector& selector);
double gelman_rubin(const std::vector<ChainResult>& chains, const ScalarSelector& selector);

/// Proposal moves shared by the samplers. Each returns the proposed value
/// and log q(current | proposed) - log q(proposed | current).
namespace moves {

struct ScalarMove {
    double value = 0.0;
    double log_correction = 0.0;
};

struct VectorMove {
    std::vector<double> value;
    double log_correction = 0.0;
    /// false when the draw fell outside the open simplex (underflow)
    bool valid = true;
};

/// x' ~ Beta(x eps + offset, (1 - x) eps + offset) on (0, 1).
ScalarMove beta(Rng& rng, double x, double eps, double offset);
/// x' ~ Dir(x eps + offset) on the open simplex.
VectorMove dirichlet(Rng& rng, std::span<const double> x, double eps, double offset);
/// Independent N(center, sd) proposal.
ScalarMove normal_independent(Rng& rng, double x, double center, double sd);
/// Independent proposal sigma^2 ~ InvGamma(shape, scale), returned on the sigma scale.
ScalarMove inv_gamma_sigma(Rng& rng, double sigma, double shape, double scale);
/// log-normal random walk on a positive scalar.
ScalarMove log_walk(Rng& rng, double x, double sd);
/// Independent proposal log x' ~ N(log_center, sd), on the x scale.
ScalarMove log_independent(Rng& rng, double x, double log_center, double sd);
/// Normal random walk on logit(x).
ScalarMove logit_walk(Rng& rng, double x, double sd);
/// Gaussian walk on the additive log-ratios of a simplex point (last entry
/// as reference), log correction relative to the simplex coordinates.
VectorMove log_ratio_walk(Rng& rng, std::span<const double> x, double sd);

/// Metropolis-Hastings accept test.
bool accept(Rng& rng, double log_ratio);

} // namespace moves

} // namespace weakmix
