#pragma once

#include <span>
#include <vector>

#include "weakmix/priors.hpp"
#include "weakmix/types.hpp"

namespace weakmix {

/// Checks family-specific support (positive values for exponential data,
/// non-negative integers for Poisson data) and the minimum sample needed for
/// a proper posterior under the improper global prior: two observations for
/// Gaussian mixtures, one strictly positive count for Poisson mixtures, one
/// observation for exponential mixtures. Throws ValidationError.
void validate_dataset(const Dataset& data, Family family);

/// Distinct observed values with multiplicities.
struct TabulatedData {
    std::vector<double> values;
    std::vector<double> counts;

    static TabulatedData from(const Dataset& data);
};

/// log sum_i exp(terms_i), summed in descending order so that the result
/// does not depend on the order of `terms`. Reorders `terms` in place.
double log_sum_exp_sorted(std::span<double> terms);

double loglik_gaussian(const Dataset& data, const StandardParams& params);
double loglik_poisson(const Dataset& data, const RateReparam& r);
double loglik_exponential(const Dataset& data, const RateReparam& r);

/// Log-likelihood of a mixture in standard form; dispatches on the family.
double loglik_standard(const Dataset& data, const StandardParams& params);

/// Rate-family log-likelihood on tabulated data (Poisson or exponential).
double loglik_rate(Family family, const TabulatedData& data, const RateReparam& r);

/// log prior + log likelihood of a Gaussian state in angular coordinates.
/// -infinity outside the support. Defined up to an additive constant.
double log_posterior(const Dataset& data, const PriorSpec& spec, const GaussianState& state);

double log_posterior(Family family, const TabulatedData& data, const PriorSpec& spec,
                     const RateReparam& state);
double log_posterior(Family family, const Dataset& data, const PriorSpec& spec,
                     const RateReparam& state);

} // namespace weakmix
