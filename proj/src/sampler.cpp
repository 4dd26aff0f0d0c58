#include "weakmix/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "weakmix/errors.hpp"

namespace weakmix {

double ScaleBlock::acceptance_rate() const {
    return total_proposals == 0 ? 0.0
                                : static_cast<double>(total_accepts) / static_cast<double>(total_proposals);
}

double ScaleBlock::post_acceptance_rate() const {
    return post_proposals == 0 ? 0.0
                               : static_cast<double>(post_accepts) / static_cast<double>(post_proposals);
}

std::size_t ScaleBank::add(ScaleBlock block) {
    if (!(block.scale > 0.0)) {
        throw ValidationError("proposal scale of block '" + block.name + "' must be > 0");
    }
    blocks.push_back(std::move(block));
    return blocks.size() - 1;
}

std::size_t ScaleBank::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (blocks[i].name == name) {
            return i;
        }
    }
    throw ValidationError("no proposal block named '" + std::string(name) + "'");
}

const ScaleBlock& ScaleBank::at(std::string_view name) const {
    return blocks[index_of(name)];
}

void ScaleBank::record(std::size_t block, bool accepted, bool after_horizon) {
    ScaleBlock& b = blocks.at(block);
    const std::size_t hit = accepted ? 1 : 0;
    b.batch_accepts += hit;
    b.batch_proposals += 1;
    b.total_accepts += hit;
    b.total_proposals += 1;
    if (after_horizon) {
        b.post_accepts += hit;
        b.post_proposals += 1;
    }
}

double adaptation_step(std::size_t batch) {
    if (batch == 0) {
        return 0.01;
    }
    return std::min(0.01, 1.0 / std::sqrt(static_cast<double>(batch)));
}

ScaleBank adapt_scales(ScaleBank bank) {
    bank.batch_index += 1;
    const double delta = adaptation_step(bank.batch_index);
    for (ScaleBlock& b : bank.blocks) {
        if (b.adaptive && b.batch_proposals > 0) {
            const double rate =
                static_cast<double>(b.batch_accepts) / static_cast<double>(b.batch_proposals);
            double direction = 0.0;
            if (rate > b.target) {
                direction = 1.0;
            } else if (rate < b.target) {
                direction = -1.0;
            }
            if (b.kind == ScaleKind::concentration) {
                direction = -direction;
            }
            b.scale *= std::exp(direction * delta);
        }
        b.batch_accepts = 0;
        b.batch_proposals = 0;
    }
    return bank;
}

void RunConfig::validate() const {
    if (!(iterations > burnin)) {
        throw ValidationError("iterations must exceed burn-in");
    }
    if (chains < 1) {
        throw ValidationError("need at least one chain");
    }
    if (batch_size < 1 || thin < 1) {
        throw ValidationError("batch size and thinning must be >= 1");
    }
    if (proposal != 1 && proposal != 2) {
        throw ValidationError("proposal must be 1 or 2");
    }
    if (!(target_scalar > 0.0 && target_scalar < 1.0) || !(target_vector > 0.0 && target_vector < 1.0)) {
        throw ValidationError("target acceptance rates must lie in (0, 1)");
    }
}

std::size_t RunConfig::horizon() const {
    if (adapt_throughout) {
        return iterations;
    }
    return adapt_horizon.value_or(iterations / 2);
}

double gelman_rubin(const std::vector<std::vector<double>>& chains) {
    const std::size_t m = chains.size();
    if (m < 2) {
        throw ValidationError("gelman_rubin needs at least two chains");
    }
    const std::size_t n = chains.front().size();
    if (n < 2) {
        throw ValidationError("gelman_rubin needs at least two draws per chain");
    }
    std::vector<double> means(m);
    double within = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        if (chains[j].size() != n) {
            throw ValidationError("gelman_rubin needs chains of equal length");
        }
        double s = 0.0;
        for (double v : chains[j]) {
            s += v;
        }
        means[j] = s / static_cast<double>(n);
        double ss = 0.0;
        for (double v : chains[j]) {
            ss += (v - means[j]) * (v - means[j]);
        }
        within += ss / static_cast<double>(n - 1);
    }
    within /= static_cast<double>(m);
    if (!(within > 0.0)) {
        throw NumericalError("gelman_rubin: zero within-chain variance");
    }
    double grand = 0.0;
    for (double v : means) {
        grand += v;
    }
    grand /= static_cast<double>(m);
    double between = 0.0;
    for (double v : means) {
        between += (v - grand) * (v - grand);
    }
    between *= static_cast<double>(n) / static_cast<double>(m - 1);
    if (between == 0.0) {
        return 1.0;
    }
    const double nn = static_cast<double>(n);
    return std::sqrt((within * (nn - 1.0) / nn + between / nn) / within);
}

ScalarSelector select_scalar(std::string_view name) {
    if (name == "log_posterior") {
        return [](const ChainRecord& r) { return r.log_posterior; };
    }
    if (name == "lambda") {
        return [](const ChainRecord& r) {
            if (const auto* s = std::get_if<RateReparam>(&r.state)) {
                return s->lambda;
            }
            throw ValidationError("lambda is defined for rate families only");
        };
    }
    auto gaussian = [](const ChainRecord& r) -> const GaussianState& {
        if (const auto* s = std::get_if<GaussianState>(&r.state)) {
            return *s;
        }
        throw ValidationError("parameter is defined for Gaussian mixtures only");
    };
    if (name == "mu") {
        return [gaussian](const ChainRecord& r) { return gaussian(r).global.mu; };
    }
    if (name == "sigma") {
        return [gaussian](const ChainRecord& r) { return gaussian(r).global.sigma; };
    }
    if (name == "sigma_sq") {
        return [gaussian](const ChainRecord& r) {
            const double s = gaussian(r).global.sigma;
            return s * s;
        };
    }
    if (name == "phi") {
        return [gaussian](const ChainRecord& r) { return gaussian(r).angles.phi; };
    }
    if (name == "phi_sq") {
        return [gaussian](const ChainRecord& r) { return gaussian(r).angles.phi_sq(); };
    }
    throw ValidationError("unknown scalar '" + std::string(name) + "'");
}

std::vector<double> trace(const ChainResult& chain, const ScalarSelector& selector) {
    std::vector<double> out;
    out.reserve(chain.records.size());
    for (const ChainRecord& r : chain.records) {
        out.push_back(selector(r));
    }
    return out;
}

double gelman_rubin(const std::vector<ChainResult>& chains, const ScalarSelector& selector) {
    std::vector<std::vector<double>> traces;
    traces.reserve(chains.size());
    for (const ChainResult& c : chains) {
        traces.push_back(trace(c, selector));
    }
    return gelman_rubin(traces);
}

namespace moves {

ScalarMove beta(Rng& rng, double x, double eps, double offset) {
    const double a = x * eps + offset;
    const double b = (1.0 - x) * eps + offset;
    ScalarMove out;
    out.value = rnd::beta(rng, a, b);
    if (!(out.value > 0.0 && out.value < 1.0)) {
        out.log_correction = -INFINITY;
        return out;
    }
    const double a_rev = out.value * eps + offset;
    const double b_rev = (1.0 - out.value) * eps + offset;
    out.log_correction = beta_logpdf(x, a_rev, b_rev) - beta_logpdf(out.value, a, b);
    return out;
}

VectorMove dirichlet(Rng& rng, std::span<const double> x, double eps, double offset) {
    std::vector<double> alpha(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        alpha[i] = x[i] * eps + offset;
    }
    VectorMove out;
    out.value = rnd::dirichlet(rng, alpha);
    for (double v : out.value) {
        if (!(v > 0.0)) {
            out.valid = false;
            out.log_correction = -INFINITY;
            return out;
        }
    }
    std::vector<double> alpha_rev(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        alpha_rev[i] = out.value[i] * eps + offset;
    }
    out.log_correction = dirichlet_logpdf(x, alpha_rev) - dirichlet_logpdf(out.value, alpha);
    if (!std::isfinite(out.log_correction)) {
        out.valid = false;
        out.log_correction = -INFINITY;
    }
    return out;
}

ScalarMove normal_independent(Rng& rng, double x, double center, double sd) {
    ScalarMove out;
    out.value = rnd::normal(rng, center, sd);
    out.log_correction = normal_logpdf(x, center, sd) - normal_logpdf(out.value, center, sd);
    return out;
}

ScalarMove inv_gamma_sigma(Rng& rng, double sigma, double shape, double scale) {
    ScalarMove out;
    out.value = std::sqrt(rnd::inv_gamma(rng, shape, scale));
    auto log_q = [&](double s) { return inv_gamma_logpdf(s * s, shape, scale) + std::log(s); };
    out.log_correction = log_q(sigma) - log_q(out.value);
    return out;
}

ScalarMove log_walk(Rng& rng, double x, double sd) {
    ScalarMove out;
    const double step = rnd::normal(rng, 0.0, sd);
    out.value = x * std::exp(step);
    out.log_correction = step;
    return out;
}

ScalarMove log_independent(Rng& rng, double x, double log_center, double sd) {
    ScalarMove out;
    const double y = rnd::normal(rng, log_center, sd);
    out.value = std::exp(y);
    const double y_cur = std::log(x);
    out.log_correction =
        (normal_logpdf(y_cur, log_center, sd) - y_cur) - (normal_logpdf(y, log_center, sd) - y);
    return out;
}

ScalarMove logit_walk(Rng& rng, double x, double sd) {
    ScalarMove out;
    const double l = std::log(x) - std::log1p(-x) + rnd::normal(rng, 0.0, sd);
    out.value = 1.0 / (1.0 + std::exp(-l));
    if (!(out.value > 0.0 && out.value < 1.0)) {
        out.log_correction = -INFINITY;
        return out;
    }
    out.log_correction =
        std::log(out.value) + std::log1p(-out.value) - std::log(x) - std::log1p(-x);
    return out;
}

VectorMove log_ratio_walk(Rng& rng, std::span<const double> x, double sd) {
    const std::size_t m = x.size();
    const double log_ref = std::log(x[m - 1]);
    std::vector<double> theta(m, 0.0);
    for (std::size_t i = 0; i + 1 < m; ++i) {
        theta[i] = std::log(x[i]) - log_ref + rnd::normal(rng, 0.0, sd);
    }
    const double top = *std::max_element(theta.begin(), theta.end());
    double total = 0.0;
    VectorMove out;
    out.value.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        out.value[i] = std::exp(theta[i] - top);
        total += out.value[i];
    }
    double log_prod_new = 0.0;
    double log_prod_old = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        out.value[i] /= total;
        if (!(out.value[i] > 0.0)) {
            out.valid = false;
            out.log_correction = -INFINITY;
            return out;
        }
        log_prod_new += std::log(out.value[i]);
        log_prod_old += std::log(x[i]);
    }
    out.log_correction = log_prod_new - log_prod_old;
    return out;
}

bool accept(Rng& rng, double log_ratio) {
    const double u = rnd::uniform(rng);
    return std::log(u) < log_ratio;
}

} // namespace moves

} // namespace weakmix
