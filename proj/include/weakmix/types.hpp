#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace weakmix {

enum class Family { gaussian, poisson, exponential };

std::string_view to_string(Family family);
Family parse_family(std::string_view name);

/// Mixture in its usual component-wise form.
///
/// `locs` holds component means for Gaussian mixtures and component means
/// (rates) for Poisson/exponential ones. `scales` holds component standard
/// deviations and is empty for the rate families. All I/O in this library
/// uses standard deviations, never variances: N(-8, 2) means sd = 2.
struct StandardParams {
    Family family = Family::gaussian;
    std::vector<double> weights;
    std::vector<double> locs;
    std::vector<double> scales;

    std::size_t k() const { return weights.size(); }

    /// Throws ValidationError unless weights form a simplex (1e-12) and all
    /// scales/rates are strictly positive.
    void validate() const;
};

/// Mean and standard deviation of the whole mixture.
struct GlobalMoments {
    double mu = 0.0;
    double sigma = 1.0;
};

/// Component offsets and scale ratios relative to the global moments:
/// mu_i = mu + sigma * alpha_i, sigma_i = sigma * tau_i.
struct AlphaTau {
    std::vector<double> alpha;
    std::vector<double> tau;
};

/// alpha_i = gamma_i / sqrt(p_i), tau_i = eta_i / sqrt(p_i).
struct GammaEta {
    std::vector<double> gamma;
    std::vector<double> eta;
};

/// Compact coordinates of a location-scale mixture given its weights.
///
/// `phi` is the radius of the location part: sum(gamma_i^2) = phi^2. For k = 2
/// it is signed (gamma = phi * F_1); for k >= 3 it is non-negative and the
/// direction of gamma is carried by `varpi` (k - 2 angles, the first k - 3 in
/// [0, pi] and the last in [0, 2 pi]). `xi` holds the k - 1 angles of eta,
/// each in [0, pi/2].
struct AngularCoords {
    double phi = 0.0;
    std::vector<double> varpi;
    std::vector<double> xi;

    double phi_sq() const { return phi * phi; }
};

/// Orthonormal basis of the hyperplane orthogonal to (sqrt(p_1), ..., sqrt(p_k)).
struct OrthonormalBasis {
    std::vector<std::vector<double>> vectors;
};

/// Mean-anchored form of a Poisson or exponential mixture:
/// lambda_i = lambda * gamma_i / p_i with gamma on the simplex.
struct RateReparam {
    double lambda = 1.0;
    std::vector<double> gamma;
    std::vector<double> weights;
};
using PoissonReparam = RateReparam;

/// Full parameter state of the Gaussian samplers: global moments, weights
/// and the compact angular block.
struct GaussianState {
    GlobalMoments global;
    std::vector<double> weights;
    AngularCoords angles;
};

/// Observations. Real valued for Gaussian/exponential, non-negative integers
/// (stored as doubles) for Poisson.
struct Dataset {
    std::vector<double> values;

    std::size_t n() const { return values.size(); }
    double mean() const;
    /// Unbiased sample variance; 0 when n < 2.
    double variance() const;
};

namespace detail {
void check_simplex(std::span<const double> p, double tol, const char* what);
}

} // namespace weakmix
