#pragma once

#include <span>
#include <utility>
#include <vector>

#include "weakmix/types.hpp"

namespace weakmix {

/// Tolerances used when checking transform invariants.
inline constexpr double kTransformTol = 1e-10;
inline constexpr double kIdentityTol = 1e-12;
/// Smallest admissible weight for the basis construction.
inline constexpr double kMinWeight = 1e-12;

struct MixtureMoments {
    double mean = 0.0;
    double variance = 0.0; ///< only meaningful for the Gaussian family
};

/// Mean and variance of a mixture from its component moments.
MixtureMoments mixture_moments(const StandardParams& params);

/// The global moments of a Gaussian mixture (mean, sqrt(variance)).
GlobalMoments global_moments(const StandardParams& params);

AlphaTau to_alpha_tau(const StandardParams& params, const GlobalMoments& g);
StandardParams from_alpha_tau(const AlphaTau& at, std::span<const double> weights,
                              const GlobalMoments& g);

GammaEta to_gamma_eta(const AlphaTau& at, std::span<const double> weights);
AlphaTau from_gamma_eta(const GammaEta& ge, std::span<const double> weights);

/// Normalised basis F_1..F_{k-1}; vector s only touches coordinates 1..s+1.
OrthonormalBasis build_basis(std::span<const double> weights);

/// gamma = phi * (cos w1 F_1 + sin w1 cos w2 F_2 + ... + sin w1 ... sin w_{k-2} F_{k-1}).
/// For k = 2 `varpi` is empty and gamma = phi * F_1 with phi signed.
std::vector<double> gamma_from_angles(double phi, std::span<const double> varpi,
                                      std::span<const double> weights);

struct GammaAngles {
    double phi = 0.0;
    std::vector<double> varpi;
};

/// Inverse of gamma_from_angles. Angles at exact poles are set to 0.
GammaAngles angles_from_gamma(std::span<const double> gamma, std::span<const double> weights);

/// eta_1 = r cos xi_1, eta_i = r sin xi_1 ... sin xi_{i-1} cos xi_i, eta_k = r prod sin xi_j,
/// r = sqrt(1 - phi^2).
std::vector<double> eta_from_angles(double phi_sq, std::span<const double> xi);
std::vector<double> angles_from_eta(std::span<const double> eta, double phi_sq);

/// Full chain angular -> standard parameterisation (validated).
StandardParams standard_from_angular(const GlobalMoments& g, std::span<const double> weights,
                                     const AngularCoords& a);

/// Full chain standard -> angular. Returns the global moments as well.
std::pair<GlobalMoments, AngularCoords> angular_from_standard(const StandardParams& params);

/// Same composition as standard_from_angular without range checks; used on
/// hot paths where the caller has already checked the support. Scales may
/// come out zero at the boundary of the angle ranges.
StandardParams compose_standard(const GlobalMoments& g, std::span<const double> weights,
                                const AngularCoords& a);

/// Rate families: lambda_i = lambda * gamma_i / p_i.
StandardParams standard_from_rate(Family family, const RateReparam& r);
RateReparam rate_from_standard(const StandardParams& params);

/// Checks the range of every angle; returns false instead of throwing.
bool angles_in_range(std::size_t k, const AngularCoords& a);

} // namespace weakmix
