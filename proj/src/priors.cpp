#include "weakmix/priors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "weakmix/errors.hpp"
#include "weakmix/transforms.hpp"

namespace weakmix {

namespace {

// (a - 1) * log(x) with the a == 1 term dropped so that x = 0 stays finite.
double kernel_term(double a, double x) {
    if (a == 1.0) {
        return 0.0;
    }
    return (a - 1.0) * std::log(x);
}

bool interior_simplex(std::span<const double> p) {
    double total = 0.0;
    for (double v : p) {
        if (!(v > 0.0)) {
            return false;
        }
        total += v;
    }
    return std::abs(total - 1.0) <= 1e-10;
}

} // namespace

std::string_view to_string(PriorKind kind) {
    return kind == PriorKind::single_uniform ? "single_uniform" : "double_uniform";
}

PriorKind parse_prior_kind(std::string_view name) {
    if (name == "single_uniform" || name == "single") {
        return PriorKind::single_uniform;
    }
    if (name == "double_uniform" || name == "double") {
        return PriorKind::double_uniform;
    }
    throw ValidationError("unknown prior kind '" + std::string(name) + "'");
}

void PriorSpec::validate() const {
    if (!(alpha0 > 0.0) || !(phi_a > 0.0) || !(phi_b > 0.0) || !(gamma_alpha > 0.0)) {
        throw ValidationError("prior hyperparameters must be > 0");
    }
}

PriorDraw draw_prior(const PriorSpec& spec, std::size_t k, Family family, Rng& rng) {
    if (k < 2) {
        throw ValidationError("need k >= 2 components");
    }
    PriorDraw draw;
    draw.weights = rnd::dirichlet(rng, k, spec.alpha0);
    if (family != Family::gaussian) {
        draw.gamma = rnd::dirichlet(rng, k, spec.gamma_alpha);
        return draw;
    }

    const double phi_sq = rnd::beta(rng, spec.phi_a, spec.phi_b);
    if (k == 2) {
        const double sign = rnd::uniform(rng) < 0.5 ? -1.0 : 1.0;
        draw.angles.phi = sign * std::sqrt(phi_sq);
    } else {
        draw.angles.phi = std::sqrt(phi_sq);
        draw.angles.varpi.resize(k - 2);
        for (std::size_t j = 0; j + 1 < k - 2; ++j) {
            draw.angles.varpi[j] = rnd::uniform(rng, 0.0, std::numbers::pi);
        }
        draw.angles.varpi[k - 3] = rnd::uniform(rng, 0.0, 2.0 * std::numbers::pi);
    }

    if (spec.kind == PriorKind::double_uniform) {
        draw.angles.xi.resize(k - 1);
        for (double& x : draw.angles.xi) {
            x = rnd::uniform(rng, 0.0, std::numbers::pi / 2);
        }
    } else {
        // u uniform on the simplex, eta_i = sqrt(u_i); angles are scale free
        const std::vector<double> u = rnd::dirichlet(rng, k, 1.0);
        std::vector<double> eta(k);
        for (std::size_t i = 0; i < k; ++i) {
            eta[i] = std::sqrt(u[i]);
        }
        double ss = 0.0;
        for (double e : eta) {
            ss += e * e;
        }
        draw.angles.xi = angles_from_eta(eta, 1.0 - ss);
    }
    return draw;
}

std::vector<PriorDraw> sample_prior(const PriorSpec& spec, std::size_t k, Family family,
                                    std::size_t n_draws, std::uint64_t seed) {
    spec.validate();
    Rng rng = make_rng(seed);
    std::vector<PriorDraw> out;
    out.reserve(n_draws);
    for (std::size_t t = 0; t < n_draws; ++t) {
        out.push_back(draw_prior(spec, k, family, rng));
    }
    return out;
}

double log_xi_jacobian(std::span<const double> xi) {
    const std::size_t m = xi.size(); // k - 1
    double out = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        out += std::log(std::sin(2.0 * xi[j]));
        if (j + 1 < m) {
            out += 2.0 * static_cast<double>(m - 1 - j) * std::log(std::sin(xi[j]));
        }
    }
    return out;
}

double log_prior(const PriorSpec& spec, const GaussianState& state) {
    const std::size_t k = state.weights.size();
    if (k < 2 || !(state.global.sigma > 0.0) || !std::isfinite(state.global.mu)) {
        return -INFINITY;
    }
    if (!interior_simplex(state.weights) || !angles_in_range(k, state.angles)) {
        return -INFINITY;
    }
    const double phi_sq = state.angles.phi_sq();
    if (phi_sq > 1.0) {
        return -INFINITY;
    }
    double out = -std::log(state.global.sigma);
    for (double p : state.weights) {
        out += kernel_term(spec.alpha0, p);
    }
    out += kernel_term(spec.phi_a, phi_sq) + kernel_term(spec.phi_b, 1.0 - phi_sq);
    if (spec.kind == PriorKind::single_uniform) {
        out += log_xi_jacobian(state.angles.xi);
    }
    return std::isnan(out) ? -INFINITY : out;
}

double log_prior(const PriorSpec& spec, const RateReparam& state) {
    if (!(state.lambda > 0.0) || !std::isfinite(state.lambda)) {
        return -INFINITY;
    }
    if (state.gamma.size() != state.weights.size() || !interior_simplex(state.gamma) ||
        !interior_simplex(state.weights)) {
        return -INFINITY;
    }
    double out = -std::log(state.lambda);
    for (std::size_t i = 0; i < state.weights.size(); ++i) {
        out += kernel_term(spec.alpha0, state.weights[i]) + kernel_term(spec.gamma_alpha, state.gamma[i]);
    }
    return out;
}

double mixture_cdf(const StandardParams& params, double x) {
    double out = 0.0;
    for (std::size_t i = 0; i < params.k(); ++i) {
        out += params.weights[i] * normal_cdf((x - params.locs[i]) / params.scales[i]);
    }
    return out;
}

double mixture_quantile(const StandardParams& params, double level) {
    if (!(level > 0.0 && level < 1.0)) {
        throw ValidationError("quantile level must lie in (0, 1)");
    }
    double lo = INFINITY;
    double hi = -INFINITY;
    for (std::size_t i = 0; i < params.k(); ++i) {
        lo = std::min(lo, params.locs[i] - 40.0 * params.scales[i]);
        hi = std::max(hi, params.locs[i] + 40.0 * params.scales[i]);
    }
    while (hi - lo > 1e-8) {
        const double mid = 0.5 * (lo + hi);
        if (mixture_cdf(params, mid) < level) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::vector<std::vector<double>> prior_quantile_study(const PriorSpec& spec, std::size_t k,
                                                      std::size_t n_draws,
                                                      std::span<const double> levels,
                                                      std::uint64_t seed) {
    for (double q : levels) {
        if (!(q > 0.0 && q < 1.0)) {
            throw ValidationError("quantile levels must lie in (0, 1)");
        }
    }
    const std::vector<PriorDraw> draws = sample_prior(spec, k, Family::gaussian, n_draws, seed);
    std::vector<std::vector<double>> table;
    table.reserve(n_draws);
    for (const PriorDraw& d : draws) {
        const StandardParams sp = compose_standard({0.0, 1.0}, d.weights, d.angles);
        std::vector<double> row;
        row.reserve(levels.size());
        for (double q : levels) {
            row.push_back(mixture_quantile(sp, q));
        }
        table.push_back(std::move(row));
    }
    return table;
}

} // namespace weakmix
