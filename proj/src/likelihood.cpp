#include "weakmix/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>

#include "weakmix/errors.hpp"
#include "weakmix/transforms.hpp"

namespace weakmix {

namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

} // namespace

void validate_dataset(const Dataset& data, Family family) {
    for (double x : data.values) {
        if (!std::isfinite(x)) {
            throw ValidationError("observations must be finite");
        }
    }
    switch (family) {
    case Family::gaussian:
        if (data.n() < 2) {
            throw ValidationError(
                "a Gaussian mixture under the 1/sigma prior needs at least two observations "
                "for a proper posterior");
        }
        break;
    case Family::poisson: {
        bool positive = false;
        for (double x : data.values) {
            if (x < 0.0 || x != std::floor(x)) {
                throw ValidationError("Poisson observations must be non-negative integers");
            }
            positive = positive || x > 0.0;
        }
        if (!positive) {
            throw ValidationError(
                "a Poisson mixture under the 1/lambda prior needs at least one strictly "
                "positive observation for a proper posterior");
        }
        break;
    }
    case Family::exponential:
        if (data.n() < 1) {
            throw ValidationError("need at least one observation");
        }
        for (double x : data.values) {
            if (!(x > 0.0)) {
                throw ValidationError("exponential observations must be > 0");
            }
        }
        break;
    }
}

TabulatedData TabulatedData::from(const Dataset& data) {
    std::map<double, double> tally;
    for (double x : data.values) {
        tally[x] += 1.0;
    }
    TabulatedData out;
    out.values.reserve(tally.size());
    out.counts.reserve(tally.size());
    for (const auto& [v, c] : tally) {
        out.values.push_back(v);
        out.counts.push_back(c);
    }
    return out;
}

double log_sum_exp_sorted(std::span<double> terms) {
    std::sort(terms.begin(), terms.end(), std::greater<>());
    const double top = terms.front();
    if (top == -INFINITY) {
        return -INFINITY;
    }
    double s = 0.0;
    for (double t : terms) {
        s += std::exp(t - top);
    }
    return top + std::log(s);
}

double loglik_gaussian(const Dataset& data, const StandardParams& params) {
    const std::size_t k = params.k();
    if (params.locs.size() != k || params.scales.size() != k) {
        throw ValidationError("loglik_gaussian: parameter lengths differ");
    }
    std::vector<double> log_w(k);
    std::vector<double> log_norm(k);
    for (std::size_t i = 0; i < k; ++i) {
        if (!(params.scales[i] > 0.0)) {
            return -INFINITY;
        }
        log_w[i] = std::log(params.weights[i]);
        log_norm[i] = log_w[i] - std::log(params.scales[i]) - kHalfLog2Pi;
    }
    std::vector<double> terms(k);
    double total = 0.0;
    for (double x : data.values) {
        for (std::size_t i = 0; i < k; ++i) {
            const double z = (x - params.locs[i]) / params.scales[i];
            terms[i] = log_norm[i] - 0.5 * z * z;
        }
        total += log_sum_exp_sorted(terms);
    }
    return total;
}

double loglik_rate(Family family, const TabulatedData& data, const RateReparam& r) {
    const std::size_t k = r.weights.size();
    if (r.gamma.size() != k) {
        throw ValidationError("loglik_rate: gamma length differs from k");
    }
    std::vector<double> rate(k);
    std::vector<double> log_w(k);
    std::vector<double> log_rate(k);
    for (std::size_t i = 0; i < k; ++i) {
        rate[i] = r.lambda * r.gamma[i] / r.weights[i];
        if (!(rate[i] > 0.0) || !std::isfinite(rate[i])) {
            return -INFINITY;
        }
        log_w[i] = std::log(r.weights[i]);
        log_rate[i] = std::log(rate[i]);
    }
    std::vector<double> terms(k);
    double total = 0.0;
    for (std::size_t j = 0; j < data.values.size(); ++j) {
        const double x = data.values[j];
        if (family == Family::poisson) {
            const double log_fact = std::lgamma(x + 1.0);
            for (std::size_t i = 0; i < k; ++i) {
                terms[i] = log_w[i] + x * log_rate[i] - rate[i] - log_fact;
            }
        } else {
            for (std::size_t i = 0; i < k; ++i) {
                terms[i] = log_w[i] - log_rate[i] - x / rate[i];
            }
        }
        total += data.counts[j] * log_sum_exp_sorted(terms);
    }
    return total;
}

double loglik_poisson(const Dataset& data, const RateReparam& r) {
    return loglik_rate(Family::poisson, TabulatedData::from(data), r);
}

double loglik_exponential(const Dataset& data, const RateReparam& r) {
    return loglik_rate(Family::exponential, TabulatedData::from(data), r);
}

double loglik_standard(const Dataset& data, const StandardParams& params) {
    if (params.family == Family::gaussian) {
        return loglik_gaussian(data, params);
    }
    const std::size_t k = params.k();
    RateReparam r;
    r.weights = params.weights;
    r.lambda = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        r.lambda += params.weights[i] * params.locs[i];
    }
    r.gamma.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        r.gamma[i] = params.weights[i] * params.locs[i] / r.lambda;
    }
    return loglik_rate(params.family, TabulatedData::from(data), r);
}

double log_posterior(const Dataset& data, const PriorSpec& spec, const GaussianState& state) {
    const double lp = log_prior(spec, state);
    if (lp == -INFINITY) {
        return -INFINITY;
    }
    const StandardParams sp = compose_standard(state.global, state.weights, state.angles);
    const double ll = loglik_gaussian(data, sp);
    const double out = lp + ll;
    return std::isnan(out) ? -INFINITY : out;
}

double log_posterior(Family family, const TabulatedData& data, const PriorSpec& spec,
                     const RateReparam& state) {
    const double lp = log_prior(spec, state);
    if (lp == -INFINITY) {
        return -INFINITY;
    }
    const double out = lp + loglik_rate(family, data, state);
    return std::isnan(out) ? -INFINITY : out;
}

double log_posterior(Family family, const Dataset& data, const PriorSpec& spec,
                     const RateReparam& state) {
    return log_posterior(family, TabulatedData::from(data), spec, state);
}

} // namespace weakmix
