#include "weakmix/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>

#include "weakmix/errors.hpp"
#include "weakmix/random.hpp"

namespace weakmix {

namespace {

std::vector<Permutation> all_permutations(std::size_t k) {
    Permutation p(k);
    std::iota(p.begin(), p.end(), 0);
    std::vector<Permutation> out;
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

double block_sd(std::span<const ChainRecord> records, const std::vector<double> StandardParams::*field) {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t n = 0;
    for (const ChainRecord& r : records) {
        for (double v : r.standard.*field) {
            sum += v;
            sum_sq += v * v;
            ++n;
        }
    }
    if (n < 2) {
        return 1.0;
    }
    const double mean = sum / static_cast<double>(n);
    const double var = (sum_sq - static_cast<double>(n) * mean * mean) / static_cast<double>(n - 1);
    return var > 0.0 ? std::sqrt(var) : 1.0;
}

struct BlockWeights {
    double locs = 1.0;
    double scales = 1.0;
    double weights = 1.0;
};

BlockWeights block_weights(const RelabelOptions& o) {
    return {o.use_locs ? 1.0 : 0.0, o.use_scales ? 1.0 : 0.0, o.use_weights ? 1.0 : 0.0};
}

double weighted_distance(const StandardParams& draw, const StandardParams& ref, const Permutation& perm,
                         const BlockWeights& w) {
    double d = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) {
        const std::size_t j = perm[i];
        if (w.locs > 0.0) {
            const double e = draw.locs[j] - ref.locs[i];
            d += w.locs * e * e;
        }
        if (w.scales > 0.0 && !draw.scales.empty()) {
            const double e = draw.scales[j] - ref.scales[i];
            d += w.scales * e * e;
        }
        if (w.weights > 0.0) {
            const double e = draw.weights[j] - ref.weights[i];
            d += w.weights * e * e;
        }
    }
    return d;
}

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d += (a[i] - b[i]) * (a[i] - b[i]);
    }
    return d;
}

std::size_t nearest(const std::vector<double>& x, const std::vector<std::vector<double>>& centres,
                    double* dist) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centres.size(); ++c) {
        const double d = sq_dist(x, centres[c]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    if (dist != nullptr) {
        *dist = best_d;
    }
    return best;
}

std::vector<std::vector<double>> seed_centres(const std::vector<std::vector<double>>& points,
                                              std::size_t k, Rng& rng) {
    std::vector<std::vector<double>> centres;
    std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
    centres.push_back(points[pick(rng)]);
    std::vector<double> d2(points.size());
    while (centres.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            nearest(points[i], centres, &d2[i]);
            total += d2[i];
        }
        if (!(total > 0.0)) {
            centres.push_back(points[pick(rng)]);
            continue;
        }
        for (double& v : d2) {
            v /= total;
        }
        centres.push_back(points[rnd::categorical(rng, d2)]);
    }
    return centres;
}

} // namespace

StandardParams permute(const StandardParams& params, const Permutation& perm) {
    StandardParams out;
    out.family = params.family;
    const std::size_t k = perm.size();
    out.weights.resize(k);
    out.locs.resize(k);
    if (!params.scales.empty()) {
        out.scales.resize(k);
    }
    for (std::size_t i = 0; i < k; ++i) {
        out.weights[i] = params.weights[perm[i]];
        out.locs[i] = params.locs[perm[i]];
        if (!params.scales.empty()) {
            out.scales[i] = params.scales[perm[i]];
        }
    }
    return out;
}

MapEstimate find_map(std::span<const ChainRecord> records) {
    if (records.empty()) {
        throw ValidationError("find_map needs a nonempty chain");
    }
    std::size_t best = 0;
    for (std::size_t t = 1; t < records.size(); ++t) {
        if (records[t].log_posterior > records[best].log_posterior) {
            best = t;
        }
    }
    return {records[best].standard, best, records[best].log_posterior};
}

std::vector<ChainRecord> pool(const std::vector<ChainResult>& chains) {
    std::vector<ChainRecord> out;
    for (const ChainResult& c : chains) {
        out.insert(out.end(), c.records.begin(), c.records.end());
    }
    return out;
}

double relabel_distance(const StandardParams& draw, const StandardParams& reference,
                        const RelabelOptions& options) {
    Permutation id(draw.k());
    std::iota(id.begin(), id.end(), 0);
    return weighted_distance(draw, reference, id, block_weights(options));
}

Relabelled relabel_map(std::span<const ChainRecord> records, const StandardParams& reference,
                       const RelabelOptions& options) {
    const std::size_t k = reference.k();
    if (k > kMaxExhaustiveK) {
        throw ValidationError("relabel_map searches all k! permutations and supports k <= 8; "
                              "use an assignment-based (Hungarian) matching for larger k");
    }
    BlockWeights w = block_weights(options);
    if (options.standardise) {
        const double sl = block_sd(records, &StandardParams::locs);
        const double ss = block_sd(records, &StandardParams::scales);
        const double sw = block_sd(records, &StandardParams::weights);
        w.locs /= sl * sl;
        w.scales /= ss * ss;
        w.weights /= sw * sw;
    }
    const std::vector<Permutation> perms = all_permutations(k);
    Relabelled out;
    out.draws.reserve(records.size());
    out.trace.r.reserve(records.size());
    for (const ChainRecord& rec : records) {
        if (rec.standard.k() != k) {
            throw ValidationError("relabel_map: component count mismatch");
        }
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < perms.size(); ++j) {
            const double d = weighted_distance(rec.standard, reference, perms[j], w);
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        out.draws.push_back(permute(rec.standard, perms[best]));
        out.trace.r.push_back(perms[best]);
    }
    return out;
}

SwitchReport detect_switching(const PermutationTrace& trace) {
    if (trace.r.empty()) {
        throw ValidationError("detect_switching needs a nonempty trace");
    }
    SwitchReport out;
    std::set<Permutation> seen;
    std::size_t run = 0;
    for (std::size_t t = 0; t < trace.r.size(); ++t) {
        seen.insert(trace.r[t]);
        if (t > 0 && trace.r[t] != trace.r[t - 1]) {
            ++out.transitions;
            run = 1;
        } else {
            ++run;
        }
        out.longest_run = std::max(out.longest_run, run);
    }
    out.distinct = seen.size();
    return out;
}

KMeansResult kmeans(const std::vector<std::vector<double>>& points, std::size_t k, std::uint64_t seed,
                    std::size_t restarts, std::size_t max_iter) {
    if (k == 0 || points.size() < k) {
        throw ValidationError("kmeans needs at least k points");
    }
    const std::size_t dim = points.front().size();
    KMeansResult best;
    bool have_best = false;
    for (std::size_t restart = 0; restart < restarts; ++restart) {
        Rng rng = make_rng(seed, restart);
        KMeansResult fit;
        fit.centres = seed_centres(points, k, rng);
        fit.assignment.assign(points.size(), 0);
        bool degenerate = false;
        for (std::size_t iter = 0; iter < max_iter; ++iter) {
            bool changed = iter == 0;
            for (std::size_t i = 0; i < points.size(); ++i) {
                const std::size_t c = nearest(points[i], fit.centres, nullptr);
                if (c != fit.assignment[i]) {
                    fit.assignment[i] = c;
                    changed = true;
                }
            }
            std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
            fit.sizes.assign(k, 0);
            for (std::size_t i = 0; i < points.size(); ++i) {
                const std::size_t c = fit.assignment[i];
                fit.sizes[c] += 1;
                for (std::size_t d = 0; d < dim; ++d) {
                    sums[c][d] += points[i][d];
                }
            }
            for (std::size_t c = 0; c < k; ++c) {
                if (fit.sizes[c] == 0) {
                    degenerate = true;
                    break;
                }
                for (std::size_t d = 0; d < dim; ++d) {
                    fit.centres[c][d] = sums[c][d] / static_cast<double>(fit.sizes[c]);
                }
            }
            if (degenerate) {
                break;
            }
            double sse = 0.0;
            for (std::size_t i = 0; i < points.size(); ++i) {
                sse += sq_dist(points[i], fit.centres[fit.assignment[i]]);
            }
            fit.sse_history.push_back(sse);
            fit.sse = sse;
            if (!changed) {
                break;
            }
        }
        if (degenerate) {
            continue;
        }
        fit.best_restart = restart;
        if (!have_best || fit.sse < best.sse) {
            best = std::move(fit);
            have_best = true;
        }
    }
    if (!have_best) {
        throw NumericalError("kmeans: every restart ended with an empty cluster");
    }
    return best;
}

double quantile_sorted(std::span<const double> sorted, double level) {
    if (sorted.empty()) {
        throw ValidationError("quantile of an empty sample");
    }
    const double h = static_cast<double>(sorted.size() - 1) * level;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

ParamSummary summarise(std::span<const double> values) {
    if (values.empty()) {
        throw ValidationError("summarise needs a nonempty sample");
    }
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    ParamSummary s;
    s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    s.median = quantile_sorted(v, 0.5);
    s.q025 = quantile_sorted(v, 0.025);
    s.q975 = quantile_sorted(v, 0.975);
    return s;
}

ComponentTable summarise_components(std::span<const StandardParams> draws) {
    if (draws.empty()) {
        throw ValidationError("summarise needs a nonempty sample");
    }
    const std::size_t k = draws.front().k();
    const bool has_scales = !draws.front().scales.empty();
    ComponentTable t;
    std::vector<double> col(draws.size());
    auto column = [&](const std::vector<double> StandardParams::*field, std::size_t i) {
        for (std::size_t t2 = 0; t2 < draws.size(); ++t2) {
            col[t2] = (draws[t2].*field)[i];
        }
        return summarise(col);
    };
    for (std::size_t i = 0; i < k; ++i) {
        t.locs.push_back(column(&StandardParams::locs, i));
        if (has_scales) {
            t.scales.push_back(column(&StandardParams::scales, i));
        }
        t.weights.push_back(column(&StandardParams::weights, i));
    }
    return t;
}

KMeansSummary kmeans_summary(std::span<const StandardParams> draws, std::size_t k, std::uint64_t seed) {
    if (draws.empty()) {
        throw ValidationError("kmeans_summary needs a nonempty sample");
    }
    const bool has_scales = !draws.front().scales.empty();
    std::vector<std::vector<double>> points;
    points.reserve(draws.size() * k);
    for (const StandardParams& d : draws) {
        for (std::size_t i = 0; i < d.k(); ++i) {
            if (has_scales) {
                points.push_back({d.locs[i], d.scales[i], d.weights[i]});
            } else {
                points.push_back({d.locs[i], d.weights[i]});
            }
        }
    }
    KMeansSummary out;
    out.fit = kmeans(points, k, seed);

    Permutation order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return out.fit.centres[a][0] < out.fit.centres[b][0];
    });
    const std::size_t w_col = has_scales ? 2 : 1;
    for (std::size_t c : order) {
        std::vector<double> locs;
        std::vector<double> scales;
        std::vector<double> weights;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (out.fit.assignment[i] == c) {
                locs.push_back(points[i][0]);
                if (has_scales) {
                    scales.push_back(points[i][1]);
                }
                weights.push_back(points[i][w_col]);
            }
        }
        out.table.locs.push_back(summarise(locs));
        if (has_scales) {
            out.table.scales.push_back(summarise(scales));
        }
        out.table.weights.push_back(summarise(weights));
    }
    return out;
}

Summary summarise_chains(const std::vector<ChainResult>& chains, std::uint64_t seed,
                         const RelabelOptions& options) {
    const std::vector<ChainRecord> records = pool(chains);
    if (records.empty()) {
        throw ValidationError("no draws to summarise");
    }
    Summary s;
    s.family = chains.front().family;
    s.k = chains.front().k;
    s.draws = records.size();

    std::vector<std::string> names = {"log_posterior"};
    if (s.family == Family::gaussian) {
        names.insert(names.end(), {"mu", "sigma", "sigma_sq", "phi", "phi_sq"});
    } else {
        names.push_back("lambda");
    }
    std::vector<double> col(records.size());
    for (const std::string& name : names) {
        const ScalarSelector sel = select_scalar(name);
        for (std::size_t t = 0; t < records.size(); ++t) {
            col[t] = sel(records[t]);
        }
        s.global[name] = summarise(col);
    }

    s.map = find_map(records);
    Permutation order(s.k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return s.map.params.locs[a] < s.map.params.locs[b];
    });
    const StandardParams reference = permute(s.map.params, order);
    const Relabelled rel = relabel_map(records, reference, options);
    s.map_relabelled = summarise_components(rel.draws);
    s.switching = detect_switching(rel.trace);

    std::vector<StandardParams> draws;
    draws.reserve(records.size());
    for (const ChainRecord& r : records) {
        draws.push_back(r.standard);
    }
    s.kmeans = kmeans_summary(draws, s.k, seed).table;
    return s;
}

double mixture_density(const StandardParams& params, double x) {
    double out = 0.0;
    switch (params.family) {
    case Family::gaussian:
        for (std::size_t i = 0; i < params.k(); ++i) {
            out += params.weights[i] * std::exp(normal_logpdf(x, params.locs[i], params.scales[i]));
        }
        break;
    case Family::poisson:
        if (x < 0.0 || x != std::floor(x)) {
            return 0.0;
        }
        for (std::size_t i = 0; i < params.k(); ++i) {
            const double l = params.locs[i];
            out += params.weights[i] * std::exp(x * std::log(l) - l - std::lgamma(x + 1.0));
        }
        break;
    case Family::exponential:
        if (x < 0.0) {
            return 0.0;
        }
        for (std::size_t i = 0; i < params.k(); ++i) {
            out += params.weights[i] / params.locs[i] * std::exp(-x / params.locs[i]);
        }
        break;
    }
    return out;
}

std::vector<double> density_curve(std::span<const StandardParams> draws, std::span<const double> grid) {
    if (draws.empty()) {
        throw ValidationError("density_curve needs at least one draw");
    }
    if (!std::is_sorted(grid.begin(), grid.end())) {
        throw ValidationError("density grid must be sorted");
    }
    std::vector<double> out(grid.size(), 0.0);
    for (const StandardParams& d : draws) {
        for (std::size_t g = 0; g < grid.size(); ++g) {
            out[g] += mixture_density(d, grid[g]);
        }
    }
    for (double& v : out) {
        v /= static_cast<double>(draws.size());
    }
    return out;
}

} // namespace weakmix
