#pragma once

#include <cmath>
#include <vector>

#include "weakmix/random.hpp"
#include "weakmix/types.hpp"

namespace testutil {

inline std::vector<double> random_simplex(weakmix::Rng& rng, std::size_t k, double alpha = 1.0) {
    for (;;) {
        std::vector<double> p = weakmix::rnd::dirichlet(rng, k, alpha);
        bool ok = true;
        for (double v : p) {
            ok = ok && v > 1e-6;
        }
        if (ok) {
            return p;
        }
    }
}

inline weakmix::StandardParams random_gaussian_mixture(weakmix::Rng& rng, std::size_t k) {
    weakmix::StandardParams p;
    p.family = weakmix::Family::gaussian;
    p.weights = random_simplex(rng, k);
    for (std::size_t i = 0; i < k; ++i) {
        p.locs.push_back(weakmix::rnd::uniform(rng, -10.0, 10.0));
        p.scales.push_back(weakmix::rnd::uniform(rng, 0.2, 4.0));
    }
    return p;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return a.size() == b.size() ? m : INFINITY;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

/// Gaussian data from a mixture, one categorical draw per observation.
inline weakmix::Dataset simulate(const weakmix::StandardParams& m, std::size_t n, weakmix::Rng& rng) {
    weakmix::Dataset d;
    for (std::size_t t = 0; t < n; ++t) {
        const std::size_t c = weakmix::rnd::categorical(rng, m.weights);
        switch (m.family) {
        case weakmix::Family::gaussian:
            d.values.push_back(weakmix::rnd::normal(rng, m.locs[c], m.scales[c]));
            break;
        case weakmix::Family::poisson:
            d.values.push_back(weakmix::rnd::poisson(rng, m.locs[c]));
            break;
        case weakmix::Family::exponential:
            d.values.push_back(weakmix::rnd::exponential_mean(rng, m.locs[c]));
            break;
        }
    }
    return d;
}

struct MeanMcse {
    double mean = 0.0;
    double mcse = 0.0;
    double sd = 0.0;
};

/// Mean with a batch-means Monte Carlo standard error (default 25 batches).
inline MeanMcse batch_means(const std::vector<double>& v, std::size_t batches = 25) {
    const std::size_t len = v.size() / batches;
    double total = 0.0;
    double total_sq = 0.0;
    for (double x : v) {
        total += x;
        total_sq += x * x;
    }
    const double n = static_cast<double>(v.size());
    const double mean = total / n;
    double ss = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
        double m = 0.0;
        for (std::size_t j = 0; j < len; ++j) {
            m += v[b * len + j];
        }
        m /= static_cast<double>(len);
        ss += (m - mean) * (m - mean);
    }
    const double var_batch = ss / static_cast<double>(batches - 1);
    return {mean, std::sqrt(var_batch / static_cast<double>(batches)),
            std::sqrt(std::max(0.0, total_sq / n - mean * mean))};
}

} // namespace testutil
