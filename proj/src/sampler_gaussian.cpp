#include <cmath>
#include <numbers>

#include "chain_runner.hpp"
#include "weakmix/errors.hpp"
#include "weakmix/likelihood.hpp"
#include "weakmix/sampler.hpp"
#include "weakmix/transforms.hpp"

namespace weakmix {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxInitAttempts = 1000;

double fold_unit(double x, double hi) {
    // reflect into [0, hi]
    const double period = 2.0 * hi;
    double y = std::fmod(x, period);
    if (y < 0.0) {
        y += period;
    }
    return y > hi ? period - y : y;
}

double wrap(double x, double period) {
    double y = std::fmod(x, period);
    if (y < 0.0) {
        y += period;
    }
    return y;
}

/// Current state of a Gaussian chain and the MH step shared by all blocks.
class GaussianChain {
public:
    GaussianChain(const Dataset& data, const PriorSpec& prior, Rng& rng, const RunConfig& config)
        : data_(data), prior_(prior), rng_(rng), clock_(config) {}

    void init(std::size_t k) {
        for (int attempt = 0; attempt < kMaxInitAttempts; ++attempt) {
            const PriorDraw d = draw_prior(prior_, k, Family::gaussian, rng_);
            GaussianState s;
            s.global = {data_.mean(), std::sqrt(data_.variance())};
            s.weights = d.weights;
            s.angles = d.angles;
            const double lp = log_posterior(data_, prior_, s);
            if (std::isfinite(lp)) {
                state_ = std::move(s);
                lp_ = lp;
                return;
            }
        }
        throw NumericalError("could not find an initial state with finite log-posterior");
    }

    std::size_t add_block(std::string name, double scale, double target, ScaleKind kind,
                          bool adaptive = true) {
        flags_.push_back(0);
        return bank_.add({.name = std::move(name),
                          .scale = scale,
                          .target = target,
                          .kind = kind,
                          .adaptive = adaptive});
    }

    double scale(std::size_t block) const { return bank_.blocks[block].scale; }
    const GaussianState& state() const { return state_; }
    double log_post() const { return lp_; }
    Rng& rng() { return rng_; }

    /// MH step for `proposal`. `extra` is added to the log ratio on top of
    /// the posterior ratio (proposal correction and change of coordinates).
    void step(std::size_t block, GaussianState proposal, double extra) {
        double lp_new = -INFINITY;
        if (std::isfinite(extra)) {
            lp_new = log_posterior(data_, prior_, proposal);
        }
        const bool ok = moves::accept(rng_, lp_new - lp_ + extra);
        if (ok) {
            state_ = std::move(proposal);
            lp_ = lp_new;
        }
        bank_.record(block, ok, clock_.after_horizon(iteration_));
        flags_[block] = ok ? 1 : 0;
    }

    void reject(std::size_t block) {
        moves::accept(rng_, -INFINITY);
        bank_.record(block, false, clock_.after_horizon(iteration_));
        flags_[block] = 0;
    }

    void begin(std::size_t it) {
        iteration_ = it;
        std::fill(flags_.begin(), flags_.end(), 0);
    }

    void end(ChainResult& out) {
        if (clock_.adapt_now(iteration_)) {
            bank_ = adapt_scales(std::move(bank_));
        }
        if (clock_.keep(iteration_)) {
            ChainRecord r;
            r.iteration = iteration_;
            r.standard = compose_standard(state_.global, state_.weights, state_.angles);
            r.state = state_;
            r.log_posterior = lp_;
            r.accepted = flags_;
            out.records.push_back(std::move(r));
        }
    }

    ChainResult finish(ChainResult out) {
        out.bank = bank_;
        for (const ScaleBlock& b : bank_.blocks) {
            out.block_names.push_back(b.name);
        }
        return out;
    }

private:
    const Dataset& data_;
    const PriorSpec& prior_;
    Rng& rng_;
    detail::IterationClock clock_;
    GaussianState state_;
    double lp_ = -INFINITY;
    ScaleBank bank_;
    std::vector<std::uint8_t> flags_;
    std::size_t iteration_ = 0;
};

void check_inputs(const Dataset& data, std::size_t k, const PriorSpec& prior,
                  const RunConfig& config) {
    if (k < 2) {
        throw ValidationError("need k >= 2 components");
    }
    validate_dataset(data, Family::gaussian);
    prior.validate();
    config.validate();
}

/// log density of a k = 2 state in the simplex coordinates
/// (phi^2, eta_1^2, eta_2^2) relative to the angular coordinates.
double simplex_coordinate_jacobian(const GaussianState& s) {
    const double phi_sq = s.angles.phi_sq();
    return -(std::log1p(-phi_sq) + log_xi_jacobian(s.angles.xi));
}

ChainResult run_general(const Dataset& data, std::size_t k, const PriorSpec& prior,
                        const RunConfig& config, Rng& rng) {
    GaussianChain chain(data, prior, rng, config);
    chain.init(k);

    const double n = static_cast<double>(data.n());
    const double sd = std::sqrt(data.variance());
    const std::size_t b_mu = chain.add_block("mu", sd / std::sqrt(n), config.target_scalar, ScaleKind::spread);
    const std::size_t b_sigma =
        chain.add_block("log_sigma", 1.0 / std::sqrt(2.0 * n), config.target_scalar, ScaleKind::spread);
    std::size_t b_xi_ind = 0;
    std::size_t b_varpi_ind = 0;
    if (config.angle_independent_moves) {
        b_xi_ind = chain.add_block("xi_ind", 1.0, config.target_vector, ScaleKind::spread, false);
        if (k >= 3) {
            b_varpi_ind = chain.add_block("varpi_ind", 1.0, config.target_vector, ScaleKind::spread, false);
        }
    }
    const std::size_t b_phi = chain.add_block("phi", n, config.target_scalar, ScaleKind::concentration);
    const std::size_t b_p = chain.add_block("p", n, config.target_vector, ScaleKind::concentration);
    std::size_t b_xi_walk = 0;
    std::size_t b_varpi_walk = 0;
    if (config.angle_walk_moves) {
        b_xi_walk = chain.add_block("xi_walk", 0.1,
                                    k == 2 ? config.target_scalar : config.target_vector,
                                    ScaleKind::spread);
        if (k >= 3) {
            b_varpi_walk = chain.add_block("varpi_walk", 0.1,
                                           k == 3 ? config.target_scalar : config.target_vector,
                                           ScaleKind::spread);
        }
    }
    std::size_t b_sign = 0;
    if (k == 2) {
        b_sign = chain.add_block("sign", 1.0, config.target_scalar, ScaleKind::spread, false);
    }

    ChainResult out;
    out.family = Family::gaussian;
    out.k = k;
    for (std::size_t it = 1; it <= config.iterations; ++it) {
        chain.begin(it);

        {
            GaussianState s = chain.state();
            s.global.mu += rnd::normal(chain.rng(), 0.0, chain.scale(b_mu));
            chain.step(b_mu, std::move(s), 0.0);
        }
        {
            GaussianState s = chain.state();
            const moves::ScalarMove m = moves::log_walk(chain.rng(), s.global.sigma, chain.scale(b_sigma));
            s.global.sigma = m.value;
            chain.step(b_sigma, std::move(s), m.log_correction);
        }
        if (config.angle_independent_moves) {
            GaussianState s = chain.state();
            for (double& x : s.angles.xi) {
                x = rnd::uniform(chain.rng(), 0.0, kPi / 2);
            }
            chain.step(b_xi_ind, std::move(s), 0.0);
            if (k >= 3) {
                GaussianState v = chain.state();
                for (std::size_t j = 0; j + 1 < k - 2; ++j) {
                    v.angles.varpi[j] = rnd::uniform(chain.rng(), 0.0, kPi);
                }
                v.angles.varpi[k - 3] = rnd::uniform(chain.rng(), 0.0, 2.0 * kPi);
                chain.step(b_varpi_ind, std::move(v), 0.0);
            }
        }
        {
            GaussianState s = chain.state();
            const double phi_sq = s.angles.phi_sq();
            const moves::ScalarMove m = moves::beta(chain.rng(), phi_sq, chain.scale(b_phi), 1.0);
            const double sign = s.angles.phi < 0.0 ? -1.0 : 1.0;
            s.angles.phi = sign * std::sqrt(m.value);
            chain.step(b_phi, std::move(s), m.log_correction);
        }
        {
            GaussianState s = chain.state();
            const moves::VectorMove m = moves::dirichlet(chain.rng(), s.weights, chain.scale(b_p), 1.0);
            if (!m.valid) {
                chain.reject(b_p);
            } else {
                s.weights = m.value;
                chain.step(b_p, std::move(s), m.log_correction);
            }
        }
        if (config.angle_walk_moves) {
            GaussianState s = chain.state();
            bool inside = true;
            const double e = chain.scale(b_xi_walk);
            for (double& x : s.angles.xi) {
                x += rnd::uniform(chain.rng(), -e, e);
                inside = inside && x >= 0.0 && x <= kPi / 2;
            }
            if (inside) {
                chain.step(b_xi_walk, std::move(s), 0.0);
            } else {
                chain.reject(b_xi_walk);
            }
            if (k >= 3) {
                GaussianState v = chain.state();
                const double w = chain.scale(b_varpi_walk);
                for (std::size_t j = 0; j < k - 2; ++j) {
                    const double moved = v.angles.varpi[j] + rnd::uniform(chain.rng(), -w, w);
                    v.angles.varpi[j] = j + 1 < k - 2 ? fold_unit(moved, kPi) : wrap(moved, 2.0 * kPi);
                }
                chain.step(b_varpi_walk, std::move(v), 0.0);
            }
        }
        if (k == 2) {
            GaussianState s = chain.state();
            s.angles.phi = -s.angles.phi;
            chain.step(b_sign, std::move(s), 0.0);
        }

        chain.end(out);
    }
    return chain.finish(std::move(out));
}

ChainResult run_k2(const Dataset& data, const PriorSpec& prior, const RunConfig& config, Rng& rng) {
    GaussianChain chain(data, prior, rng, config);
    chain.init(2);

    const double n = static_cast<double>(data.n());
    const double xbar = data.mean();
    const double s2 = data.variance();
    const double ig_shape = (n + 1.0) / 2.0;
    const double ig_scale = (n - 1.0) * s2 / 2.0;
    const bool p1 = config.proposal == 1;

    const std::size_t b_mu =
        chain.add_block("mu", std::sqrt(s2 / n), config.target_scalar, ScaleKind::spread);
    const std::size_t b_sigma = chain.add_block("sigma", 1.0, config.target_scalar, ScaleKind::spread, false);
    const std::size_t b_p = chain.add_block("p", p1 ? n : 0.3, config.target_scalar,
                                            p1 ? ScaleKind::concentration : ScaleKind::spread);
    const std::size_t b_pe = chain.add_block("phi_eta", p1 ? n : 0.3, config.target_vector,
                                             p1 ? ScaleKind::concentration : ScaleKind::spread);
    const std::size_t b_sign = chain.add_block("sign", 1.0, config.target_scalar, ScaleKind::spread, false);

    ChainResult out;
    out.family = Family::gaussian;
    out.k = 2;
    for (std::size_t it = 1; it <= config.iterations; ++it) {
        chain.begin(it);

        {
            GaussianState s = chain.state();
            const moves::ScalarMove m =
                moves::normal_independent(chain.rng(), s.global.mu, xbar, chain.scale(b_mu));
            s.global.mu = m.value;
            chain.step(b_mu, std::move(s), m.log_correction);
        }
        {
            GaussianState s = chain.state();
            const moves::ScalarMove m = moves::inv_gamma_sigma(chain.rng(), s.global.sigma, ig_shape, ig_scale);
            s.global.sigma = m.value;
            chain.step(b_sigma, std::move(s), m.log_correction);
        }
        {
            GaussianState s = chain.state();
            const double p = s.weights[0];
            const moves::ScalarMove m = p1 ? moves::beta(chain.rng(), p, chain.scale(b_p), 0.0)
                                           : moves::logit_walk(chain.rng(), p, chain.scale(b_p));
            if (!std::isfinite(m.log_correction)) {
                chain.reject(b_p);
            } else {
                s.weights = {m.value, 1.0 - m.value};
                chain.step(b_p, std::move(s), m.log_correction);
            }
        }
        {
            const GaussianState& cur = chain.state();
            const std::vector<double> eta = eta_from_angles(cur.angles.phi_sq(), cur.angles.xi);
            const std::vector<double> x = {cur.angles.phi_sq(), eta[0] * eta[0], eta[1] * eta[1]};
            const moves::VectorMove m = p1 ? moves::dirichlet(chain.rng(), x, chain.scale(b_pe), 0.0)
                                           : moves::log_ratio_walk(chain.rng(), x, chain.scale(b_pe));
            if (!m.valid || !(x[1] > 0.0 && x[2] > 0.0 && x[0] > 0.0)) {
                chain.reject(b_pe);
            } else {
                GaussianState s = cur;
                const double sign = cur.angles.phi < 0.0 ? -1.0 : 1.0;
                s.angles.phi = sign * std::sqrt(m.value[0]);
                s.angles.xi = {std::atan2(std::sqrt(m.value[2]), std::sqrt(m.value[1]))};
                const double coords = simplex_coordinate_jacobian(s) - simplex_coordinate_jacobian(cur);
                chain.step(b_pe, std::move(s), m.log_correction + coords);
            }
        }
        {
            GaussianState s = chain.state();
            s.angles.phi = -s.angles.phi;
            chain.step(b_sign, std::move(s), 0.0);
        }

        chain.end(out);
    }
    return chain.finish(std::move(out));
}

} // namespace

std::vector<ChainResult> mwg_gaussian(const Dataset& data, std::size_t k, const PriorSpec& prior,
                                      const RunConfig& config) {
    check_inputs(data, k, prior, config);
    return detail::run_chains(config, [&](std::size_t, Rng& rng) {
        return run_general(data, k, prior, config, rng);
    });
}

std::vector<ChainResult> mwg_gaussian_k2(const Dataset& data, const PriorSpec& prior,
                                         const RunConfig& config) {
    check_inputs(data, 2, prior, config);
    return detail::run_chains(config, [&](std::size_t, Rng& rng) {
        return run_k2(data, prior, config, rng);
    });
}

} // namespace weakmix
