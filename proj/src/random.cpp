#include "weakmix/random.hpp"

#include <cmath>
#include <numbers>

#include "weakmix/errors.hpp"

namespace weakmix {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x6d69786du};
    return Rng(seq);
}

namespace rnd {

double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double normal(Rng& rng, double mean, double sd) {
    return std::normal_distribution<double>(mean, sd)(rng);
}

double gamma(Rng& rng, double shape, double scale) {
    return std::gamma_distribution<double>(shape, scale)(rng);
}

double beta(Rng& rng, double a, double b) {
    const double x = gamma(rng, a);
    const double y = gamma(rng, b);
    const double s = x + y;
    if (!(s > 0.0)) {
        return a >= b ? 1.0 : 0.0;
    }
    return x / s;
}

double inv_gamma(Rng& rng, double shape, double scale) {
    return 1.0 / gamma(rng, shape, 1.0 / scale);
}

std::vector<double> dirichlet(Rng& rng, std::span<const double> alpha) {
    std::vector<double> out(alpha.size());
    double total = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        out[i] = gamma(rng, alpha[i]);
        total += out[i];
    }
    if (!(total > 0.0)) {
        // every gamma underflowed; the caller sees a zero vector and rejects
        std::fill(out.begin(), out.end(), 0.0);
        return out;
    }
    for (double& v : out) {
        v /= total;
    }
    return out;
}

std::vector<double> dirichlet(Rng& rng, std::size_t k, double alpha) {
    const std::vector<double> a(k, alpha);
    return dirichlet(rng, a);
}

unsigned poisson(Rng& rng, double mean) {
    return std::poisson_distribution<unsigned>(mean)(rng);
}

double exponential_mean(Rng& rng, double mean) {
    return std::exponential_distribution<double>(1.0 / mean)(rng);
}

std::size_t categorical(Rng& rng, std::span<const double> probs) {
    double u = uniform(rng);
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
        if (u < probs[i]) {
            return i;
        }
        u -= probs[i];
    }
    return probs.size() - 1;
}

} // namespace rnd

double normal_logpdf(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

double beta_logpdf(double x, double a, double b) {
    if (!(x > 0.0 && x < 1.0)) {
        return -INFINITY;
    }
    return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) + std::lgamma(a + b) -
           std::lgamma(a) - std::lgamma(b);
}

double inv_gamma_logpdf(double x, double shape, double scale) {
    if (!(x > 0.0)) {
        return -INFINITY;
    }
    return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(x) - scale / x;
}

double dirichlet_logpdf(std::span<const double> x, std::span<const double> alpha) {
    if (x.size() != alpha.size()) {
        throw ValidationError("dirichlet_logpdf: size mismatch");
    }
    double out = 0.0;
    double alpha_sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0)) {
            return -INFINITY;
        }
        out += (alpha[i] - 1.0) * std::log(x[i]) - std::lgamma(alpha[i]);
        alpha_sum += alpha[i];
    }
    return out + std::lgamma(alpha_sum);
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

} // namespace weakmix
