#pragma once

#include <exception>
#include <functional>
#include <thread>
#include <vector>

#include "weakmix/sampler.hpp"

namespace weakmix::detail {

/// Runs `config.chains` independent chains, one thread each, with the RNG
/// stream of chain c seeded by (config.seed, c). Rethrows the first failure.
inline std::vector<ChainResult> run_chains(const RunConfig& config,
                                           const std::function<ChainResult(std::size_t, Rng&)>& body) {
    std::vector<ChainResult> results(config.chains);
    std::vector<std::exception_ptr> errors(config.chains);
    std::vector<std::thread> threads;
    threads.reserve(config.chains);
    for (std::size_t c = 0; c < config.chains; ++c) {
        threads.emplace_back([&, c] {
            try {
                Rng rng = make_rng(config.seed, c);
                results[c] = body(c, rng);
                results[c].chain_index = c;
            } catch (...) {
                errors[c] = std::current_exception();
            }
        });
    }
    for (std::thread& t : threads) {
        t.join();
    }
    for (const std::exception_ptr& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return results;
}

/// Iteration bookkeeping shared by the samplers.
struct IterationClock {
    const RunConfig& config;
    std::size_t horizon;

    explicit IterationClock(const RunConfig& c) : config(c), horizon(c.horizon()) {}

    bool after_horizon(std::size_t it) const { return it > horizon; }
    bool adapt_now(std::size_t it) const { return it % config.batch_size == 0 && it <= horizon; }
    bool keep(std::size_t it) const {
        return it > config.burnin && (it - config.burnin) % config.thin == 0;
    }
};

} // namespace weakmix::detail
