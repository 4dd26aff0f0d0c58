#include "weakmix/oracle.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <thread>
#include <vector>

#include "weakmix/errors.hpp"
#include "weakmix/random.hpp"

namespace weakmix {

namespace {

template <class F>
double composite_gl(F f, double a, double b, int panels, int nodes) {
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int s = 0; s < panels; ++s) {
        const double lo = a + s * h;
        const double hi = lo + h;
        if (nodes == 128) {
            total += boost::math::quadrature::gauss<double, 128>::integrate(f, lo, hi);
        } else {
            total += boost::math::quadrature::gauss<double, 64>::integrate(f, lo, hi);
        }
    }
    return total;
}

void check_pair(const PairTerm& t) {
    if (t.x1 == t.x2) {
        throw ValidationError("pair oracle needs x1 != x2");
    }
    if (!(t.tau_i > 0.0) || !(t.tau_j > 0.0)) {
        throw ValidationError("pair oracle needs tau > 0");
    }
}

double pair_closed(const PairTerm& t, double sign) {
    check_pair(t);
    const double d = t.x1 - t.x2;
    const double s = std::sqrt(t.tau_i * t.tau_i + t.tau_j * t.tau_j);
    return t.p_i * t.p_j / std::abs(d) * normal_cdf(sign * (t.alpha_i - t.alpha_j) / d * std::abs(d) / s);
}

} // namespace

double gaussian_pair_closed(const PairTerm& t) {
    return pair_closed(t, 1.0);
}

double gaussian_pair_closed_flipped(const PairTerm& t) {
    return pair_closed(t, -1.0);
}

void QuadratureSpec::validate() const {
    if (nodes != 64 && nodes != 128) {
        throw ValidationError("quadrature node count must be 64 or 128");
    }
    if (mu_panels < 1 || z_panels < 1) {
        throw ValidationError("quadrature needs at least one panel");
    }
    if (!(mu_halfwidth > 0.0) || !(z_halfwidth > 0.0) || !(tolerance > 0.0)) {
        throw ValidationError("quadrature window and tolerance must be > 0");
    }
}

QuadratureResult gaussian_pair_quad(const PairTerm& t, const QuadratureSpec& spec) {
    check_pair(t);
    spec.validate();
    const double wi = 1.0 / (t.tau_i * t.tau_i);
    const double wj = 1.0 / (t.tau_j * t.tau_j);
    const double norm = t.p_i * t.p_j / (2.0 * std::numbers::pi * t.tau_i * t.tau_j);

    auto integrand = [&](double mu, double z) {
        const double ei = z * (t.x1 - mu) - t.alpha_i;
        const double ej = z * (t.x2 - mu) - t.alpha_j;
        return norm * z * std::exp(-0.5 * (ei * ei * wi + ej * ej * wj));
    };
    auto inner = [&](double z) {
        if (!(z > 0.0)) {
            return 0.0;
        }
        const double centre = (wi * (t.x1 - t.alpha_i / z) + wj * (t.x2 - t.alpha_j / z)) / (wi + wj);
        const double sd = 1.0 / (z * std::sqrt(wi + wj));
        const double half = spec.mu_halfwidth * sd;
        return composite_gl([&](double mu) { return integrand(mu, z); }, centre - half, centre + half,
                            spec.mu_panels, spec.nodes);
    };

    // The mu-marginal is Gaussian in z; place the window around its mode.
    const double d = t.x1 - t.x2;
    const double z_mode = (t.alpha_i - t.alpha_j) / d;
    const double z_sd = std::sqrt(t.tau_i * t.tau_i + t.tau_j * t.tau_j) / std::abs(d);
    const double lo = std::max(0.0, z_mode - spec.z_halfwidth * z_sd);
    const double hi = std::max(0.0, z_mode) + spec.z_halfwidth * z_sd;

    QuadratureResult out;
    out.value = composite_gl(inner, lo, hi, spec.z_panels, spec.nodes);
    double tail = composite_gl(inner, hi, 2.0 * hi - lo, spec.z_panels, spec.nodes);
    if (lo > 0.0) {
        tail += composite_gl(inner, 0.0, lo, spec.z_panels, spec.nodes);
    }
    out.truncation_error = std::abs(tail);
    if (out.truncation_error > spec.tolerance * std::abs(out.value)) {
        throw NumericalError("pair quadrature truncation error above tolerance");
    }
    return out;
}

MonteCarloEstimate marginal_one_obs_mc(Family family, std::size_t k, double x1, const PriorSpec& prior,
                                       std::size_t n_mc, std::uint64_t seed, std::size_t shards) {
    prior.validate();
    if (k < 2) {
        throw ValidationError("need k >= 2 components");
    }
    if (n_mc < 2 || shards < 1) {
        throw ValidationError("need at least two Monte Carlo draws and one shard");
    }
    if (family == Family::poisson) {
        if (!(x1 >= 1.0) || x1 != std::floor(x1)) {
            throw ValidationError("Poisson marginal needs a positive integer observation");
        }
    } else if (family == Family::exponential) {
        if (!(x1 > 0.0)) {
            throw ValidationError("exponential marginal needs a positive observation");
        }
    } else {
        throw ValidationError("marginal_one_obs_mc covers the Poisson and exponential families");
    }

    constexpr double eps = std::numeric_limits<double>::epsilon();

    // Closed-form lambda integral of one component term, with rate r = gamma_i / p_i,
    // and a bound on its floating-point error.
    struct Term {
        double value;
        double bound;
    };
    auto term = [&](double r) -> Term {
        if (family == Family::poisson) {
            // r^x / x! * int lambda^(x-1) exp(-r lambda) d lambda = r^x / x! * Gamma(x) / r^x
            const double log_r = std::log(r);
            const double a = std::lgamma(x1 + 1.0);
            const double b = std::lgamma(x1);
            const double v = std::exp(x1 * log_r - a + b - x1 * log_r);
            return {v, 4.0 * eps * (2.0 * std::abs(x1 * log_r) + a + b + 1.0) * v};
        }
        // int (1 / (r lambda)) exp(-x / (r lambda)) d lambda / lambda = (1 / r) * (r / x)
        const double v = (1.0 / r) * (r / x1);
        return {v, 4.0 * eps * v};
    };

    std::vector<std::vector<double>> values(shards);
    std::vector<double> bounds(shards, 0.0);
    std::vector<std::thread> threads;
    for (std::size_t s = 0; s < shards; ++s) {
        threads.emplace_back([&, s] {
            Rng rng = make_rng(seed, s);
            const std::size_t count = n_mc / shards + (s < n_mc % shards ? 1 : 0);
            values[s].reserve(count);
            for (std::size_t t = 0; t < count; ++t) {
                const std::vector<double> p = rnd::dirichlet(rng, k, prior.alpha0);
                const std::vector<double> g = rnd::dirichlet(rng, k, prior.gamma_alpha);
                double v = 0.0;
                double bound = 0.0;
                for (std::size_t i = 0; i < k; ++i) {
                    if (p[i] > 0.0 && g[i] > 0.0) {
                        const Term tm = term(g[i] / p[i]);
                        v += p[i] * tm.value;
                        bound += p[i] * tm.bound + 2.0 * eps * std::abs(v);
                    }
                }
                values[s].push_back(v);
                bounds[s] += bound;
            }
        });
    }
    for (std::thread& th : threads) {
        th.join();
    }

    // Neumaier summation in shard order, then a second pass for the variance.
    double sum = 0.0;
    double carry = 0.0;
    std::size_t count = 0;
    double bound_total = 0.0;
    for (std::size_t s = 0; s < shards; ++s) {
        for (double v : values[s]) {
            const double t = sum + v;
            carry += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
            sum = t;
        }
        count += values[s].size();
        bound_total += bounds[s];
    }
    const double n = static_cast<double>(count);
    MonteCarloEstimate out;
    out.draws = count;
    out.estimate = (sum + carry) / n;
    double ss = 0.0;
    for (const auto& shard : values) {
        for (double v : shard) {
            ss += (v - out.estimate) * (v - out.estimate);
        }
    }
    out.std_error = std::sqrt(ss / (n - 1.0) / n);
    out.rounding_error = bound_total / n + 4.0 * eps * std::abs(out.estimate);
    return out;
}

double n1_divergence_probe(double L) {
    if (!(L > 1.0)) {
        throw ValidationError("divergence probe needs L > 1");
    }
    return 2.0 * std::log(L);
}

} // namespace weakmix
