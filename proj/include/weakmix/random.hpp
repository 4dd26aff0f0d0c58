#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace weakmix {

using Rng = std::mt19937_64;

/// Independent stream for (seed, stream index); used for per-chain and
/// per-shard seeding.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

namespace rnd {

double uniform(Rng& rng, double lo = 0.0, double hi = 1.0);
double normal(Rng& rng, double mean = 0.0, double sd = 1.0);
double gamma(Rng& rng, double shape, double scale = 1.0);
double beta(Rng& rng, double a, double b);
double inv_gamma(Rng& rng, double shape, double scale);
/// Dirichlet draw. May contain exact zeros when shapes are tiny; callers
/// treat such draws as outside the support.
std::vector<double> dirichlet(Rng& rng, std::span<const double> alpha);
std::vector<double> dirichlet(Rng& rng, std::size_t k, double alpha);
unsigned poisson(Rng& rng, double mean);
double exponential_mean(Rng& rng, double mean);
std::size_t categorical(Rng& rng, std::span<const double> probs);

} // namespace rnd

// Log densities, fully normalised.
double normal_logpdf(double x, double mean, double sd);
double beta_logpdf(double x, double a, double b);
double inv_gamma_logpdf(double x, double shape, double scale);
double dirichlet_logpdf(std::span<const double> x, std::span<const double> alpha);

/// Standard normal CDF.
double normal_cdf(double z);

} // namespace weakmix
