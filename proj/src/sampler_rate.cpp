#include <cmath>

#include "chain_runner.hpp"
#include "weakmix/errors.hpp"
#include "weakmix/likelihood.hpp"
#include "weakmix/sampler.hpp"
#include "weakmix/transforms.hpp"

namespace weakmix {

namespace {

constexpr int kMaxInitAttempts = 1000;

ChainResult run_rate(Family family, const Dataset& data, const TabulatedData& tab, std::size_t k,
                     const PriorSpec& prior, const RunConfig& config, Rng& rng) {
    const detail::IterationClock clock(config);
    const double n = static_cast<double>(data.n());
    const double xbar = data.mean();
    const double sd = std::sqrt(data.variance());

    RateReparam state;
    double lp = -INFINITY;
    for (int attempt = 0; attempt < kMaxInitAttempts && !std::isfinite(lp); ++attempt) {
        const PriorDraw d = draw_prior(prior, k, family, rng);
        state = {xbar, d.gamma, d.weights};
        lp = log_posterior(family, tab, prior, state);
    }
    if (!std::isfinite(lp)) {
        throw NumericalError("could not find an initial state with finite log-posterior");
    }

    ScaleBank bank;
    const double lambda_sd = sd > 0.0 ? sd / (xbar * std::sqrt(n)) : 1.0 / std::sqrt(n);
    const std::size_t b_lambda = bank.add({.name = "lambda",
                                           .scale = lambda_sd,
                                           .target = config.target_scalar,
                                           .kind = ScaleKind::spread});
    const std::size_t b_gamma = bank.add({.name = "gamma",
                                          .scale = n,
                                          .target = config.target_vector,
                                          .kind = ScaleKind::concentration});
    const std::size_t b_p = bank.add({.name = "p",
                                      .scale = n,
                                      .target = config.target_vector,
                                      .kind = ScaleKind::concentration});
    std::vector<std::uint8_t> flags(bank.blocks.size(), 0);

    ChainResult out;
    out.family = family;
    out.k = k;
    for (std::size_t it = 1; it <= config.iterations; ++it) {
        const bool late = clock.after_horizon(it);
        auto step = [&](std::size_t block, RateReparam proposal, double extra) {
            double lp_new = -INFINITY;
            if (std::isfinite(extra)) {
                lp_new = log_posterior(family, tab, prior, proposal);
            }
            const bool ok = moves::accept(rng, lp_new - lp + extra);
            if (ok) {
                state = std::move(proposal);
                lp = lp_new;
            }
            bank.record(block, ok, late);
            flags[block] = ok ? 1 : 0;
        };

        {
            RateReparam s = state;
            const double eps = bank.blocks[b_lambda].scale;
            const moves::ScalarMove m = config.lambda_proposal == LambdaProposal::independent
                                            ? moves::log_independent(rng, s.lambda, std::log(xbar), eps)
                                            : moves::log_walk(rng, s.lambda, eps);
            s.lambda = m.value;
            step(b_lambda, std::move(s), m.log_correction);
        }
        {
            RateReparam s = state;
            const moves::VectorMove m = moves::dirichlet(rng, s.gamma, bank.blocks[b_gamma].scale, 1.0);
            if (m.valid) {
                s.gamma = m.value;
            }
            step(b_gamma, std::move(s), m.valid ? m.log_correction : -INFINITY);
        }
        {
            RateReparam s = state;
            const moves::VectorMove m = moves::dirichlet(rng, s.weights, bank.blocks[b_p].scale, 1.0);
            if (m.valid) {
                s.weights = m.value;
            }
            step(b_p, std::move(s), m.valid ? m.log_correction : -INFINITY);
        }

        if (clock.adapt_now(it)) {
            bank = adapt_scales(std::move(bank));
        }
        if (clock.keep(it)) {
            ChainRecord r;
            r.iteration = it;
            r.standard = standard_from_rate(family, state);
            r.state = state;
            r.log_posterior = lp;
            r.accepted = flags;
            out.records.push_back(std::move(r));
        }
        std::fill(flags.begin(), flags.end(), 0);
    }
    out.bank = bank;
    for (const ScaleBlock& b : bank.blocks) {
        out.block_names.push_back(b.name);
    }
    return out;
}

std::vector<ChainResult> run_rate_family(Family family, const Dataset& data, std::size_t k,
                                         const PriorSpec& prior, const RunConfig& config) {
    if (k < 2) {
        throw ValidationError("need k >= 2 components");
    }
    validate_dataset(data, family);
    prior.validate();
    config.validate();
    const TabulatedData tab = TabulatedData::from(data);
    return detail::run_chains(config, [&](std::size_t, Rng& rng) {
        return run_rate(family, data, tab, k, prior, config, rng);
    });
}

} // namespace

std::vector<ChainResult> mwg_poisson(const Dataset& data, std::size_t k, const PriorSpec& prior,
                                     const RunConfig& config) {
    return run_rate_family(Family::poisson, data, k, prior, config);
}

std::vector<ChainResult> mwg_exponential(const Dataset& data, std::size_t k,
                                         const PriorSpec& prior, const RunConfig& config) {
    return run_rate_family(Family::exponential, data, k, prior, config);
}

} // namespace weakmix
