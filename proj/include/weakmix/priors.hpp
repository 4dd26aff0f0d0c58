#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "weakmix/random.hpp"
#include "weakmix/types.hpp"

namespace weakmix {

enum class PriorKind {
    /// varpi uniform, eta^2 / (1 - phi^2) uniform on the unit simplex
    single_uniform,
    /// varpi and xi uniform on their ranges
    double_uniform,
};

std::string_view to_string(PriorKind kind);
PriorKind parse_prior_kind(std::string_view name);

struct PriorSpec {
    PriorKind kind = PriorKind::double_uniform;
    double alpha0 = 1.0;          ///< Dirichlet(alpha0, ..., alpha0) on the weights
    double phi_a = 1.0;           ///< phi^2 ~ Beta(phi_a, phi_b)
    double phi_b = 1.0;
    double gamma_alpha = 1.0;     ///< Dirichlet on gamma for the rate families

    void validate() const;
};

/// One prior draw. Gaussian draws fill `angles`, rate draws fill `gamma`.
struct PriorDraw {
    std::vector<double> weights;
    AngularCoords angles;
    std::vector<double> gamma;
};

PriorDraw draw_prior(const PriorSpec& spec, std::size_t k, Family family, Rng& rng);

std::vector<PriorDraw> sample_prior(const PriorSpec& spec, std::size_t k, Family family,
                                    std::size_t n_draws, std::uint64_t seed);

/// log |d u / d xi| for u_i = eta_i^2 / (1 - phi^2), i < k: the density
/// factor turning a density on the scale simplex into one on the xi angles.
double log_xi_jacobian(std::span<const double> xi);

/// Unnormalised log prior of a Gaussian state: -log sigma plus the kernels
/// of Dir(alpha0) on p, Beta(a1, a2) on phi^2 and the angle law. Returns
/// -infinity outside the support. The additive constant is dropped, so
/// values are comparable only under one PriorSpec.
double log_prior(const PriorSpec& spec, const GaussianState& state);

/// Unnormalised log prior of a rate state: -log lambda plus Dirichlet kernels
/// on gamma and p.
double log_prior(const PriorSpec& spec, const RateReparam& state);

/// Mixture CDF of a Gaussian mixture.
double mixture_cdf(const StandardParams& params, double x);

/// Quantile of a Gaussian mixture by bisection on its CDF (tolerance 1e-8).
double mixture_quantile(const StandardParams& params, double level);

/// For every draw (mean 0, variance 1), the mixture quantiles at `levels`.
/// Rows are draws, columns are levels.
std::vector<std::vector<double>> prior_quantile_study(const PriorSpec& spec, std::size_t k,
                                                      std::size_t n_draws,
                                                      std::span<const double> levels,
                                                      std::uint64_t seed);

} // namespace weakmix
