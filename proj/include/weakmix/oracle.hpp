#pragma once

#include <cstdint>

#include "weakmix/priors.hpp"
#include "weakmix/types.hpp"

namespace weakmix {

/// Arguments of one (i, j) term of the two-observation marginal likelihood.
struct PairTerm {
    double p_i = 0.5;
    double p_j = 0.5;
    double alpha_i = 0.0;
    double alpha_j = 0.0;
    double tau_i = 1.0;
    double tau_j = 1.0;
    double x1 = 0.0;
    double x2 = 1.0;
};

/// p_i p_j / |d| * Phi((alpha_i - alpha_j) / d * |d| / sqrt(tau_i^2 + tau_j^2)),
/// d = x1 - x2: the (mu, sigma) integral of the term under pi(mu, sigma) = 1/sigma.
double gaussian_pair_closed(const PairTerm& t);

/// Same expression with the opposite sign inside Phi.
double gaussian_pair_closed_flipped(const PairTerm& t);

struct QuadratureSpec {
    /// Gauss-Legendre nodes per panel; 64 or 128.
    int nodes = 64;
    /// Panels across the mu window and the z window.
    int mu_panels = 2;
    int z_panels = 16;
    /// Half-width of the mu window in conditional standard deviations.
    double mu_halfwidth = 10.0;
    /// Distance of the z window edges from the z-mode in standard deviations.
    double z_halfwidth = 12.0;
    /// Largest accepted truncation error relative to the value.
    double tolerance = 1e-9;

    void validate() const;
};

struct QuadratureResult {
    double value = 0.0;
    double truncation_error = 0.0;
};

/// Tensor-product Gauss-Legendre quadrature of the (mu, z = 1/sigma)
/// integrand p_i p_j z / (2 pi tau_i tau_j) exp(-(z(x1 - mu) - alpha_i)^2 / (2 tau_i^2)
/// - (z(x2 - mu) - alpha_j)^2 / (2 tau_j^2)). The truncation error is the
/// quadrature of the neglected z tails; NumericalError if it exceeds the
/// tolerance.
QuadratureResult gaussian_pair_quad(const PairTerm& t, const QuadratureSpec& spec = {});

struct MonteCarloEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    /// Bound on the floating-point error of the estimate. The integrand is
    /// constant in exact arithmetic, so the sampling error can be smaller
    /// than the rounding error.
    double rounding_error = 0.0;
    std::size_t draws = 0;
};

/// Marginal likelihood of one observation for a Poisson or exponential
/// mixture under pi(lambda) = 1/lambda: the lambda integral is done in
/// closed form per draw and (gamma, p) are drawn from their Dirichlet priors.
MonteCarloEstimate marginal_one_obs_mc(Family family, std::size_t k, double x1, const PriorSpec& prior,
                                       std::size_t n_mc, std::uint64_t seed, std::size_t shards = 8);

/// Integral of 1/sigma over [1/L, L].
double n1_divergence_probe(double L);

} // namespace weakmix
