#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "weakmix/errors.hpp"
#include "weakmix/postprocess.hpp"
#include "weakmix/transforms.hpp"

using namespace weakmix;
using doctest::Approx;

namespace {

ChainRecord record(const StandardParams& p, double lp, std::size_t it = 0) {
    ChainRecord r;
    r.iteration = it;
    r.standard = p;
    r.log_posterior = lp;
    return r;
}

ChainResult chain_of(std::vector<ChainRecord> records) {
    ChainResult c;
    c.family = records.front().standard.family;
    c.k = records.front().standard.k();
    c.records = std::move(records);
    return c;
}

void check_equal(const ParamSummary& a, const ParamSummary& b) {
    CHECK(a.mean == Approx(b.mean).epsilon(1e-12));
    CHECK(a.median == b.median);
    CHECK(a.q025 == b.q025);
    CHECK(a.q975 == b.q975);
}

} // namespace

TEST_CASE("MAP search") {
    const StandardParams a{Family::gaussian, {0.5, 0.5}, {0.0, 1.0}, {1.0, 1.0}};
    SUBCASE("single draw") {
        const std::vector<ChainRecord> r = {record(a, -3.0)};
        const MapEstimate m = find_map(r);
        CHECK(m.index == 0);
        CHECK(m.log_posterior == -3.0);
        CHECK(m.params.locs == a.locs);
    }
    SUBCASE("increasing log posterior") {
        std::vector<ChainRecord> r;
        for (int t = 0; t < 10; ++t) {
            r.push_back(record(a, t));
        }
        CHECK(find_map(r).index == 9);
    }
    SUBCASE("ties go to the first") {
        const std::vector<ChainRecord> r = {record(a, 1.0), record(a, 2.0), record(a, 2.0)};
        CHECK(find_map(r).index == 1);
    }
    SUBCASE("linear scan oracle") {
        Rng rng = make_rng(41);
        std::vector<ChainRecord> r;
        for (int t = 0; t < 10000; ++t) {
            r.push_back(record(a, std::round(rnd::normal(rng, 0.0, 30.0))));
        }
        std::size_t best = 0;
        for (std::size_t t = 1; t < r.size(); ++t) {
            if (r[t].log_posterior > r[best].log_posterior) {
                best = t;
            }
        }
        CHECK(find_map(r).index == best);
    }
}

TEST_CASE("MAP relabelling") {
    const StandardParams ref{Family::gaussian, {0.2, 0.3, 0.5}, {-3.0, 0.0, 4.0}, {1.0, 2.0, 0.5}};
    SUBCASE("identity") {
        const std::vector<ChainRecord> r = {record(ref, 0.0)};
        const Relabelled out = relabel_map(r, ref);
        CHECK(out.trace.r[0] == Permutation{0, 1, 2});
    }
    SUBCASE("transposition") {
        const std::vector<ChainRecord> r = {record(permute(ref, {1, 0, 2}), 0.0)};
        const Relabelled out = relabel_map(r, ref);
        CHECK(out.trace.r[0] == Permutation{1, 0, 2});
        CHECK(out.draws[0].locs == ref.locs);
    }
    SUBCASE("exhaustive optimality at k = 3") {
        Rng rng = make_rng(42);
        std::vector<ChainRecord> r;
        for (int t = 0; t < 300; ++t) {
            r.push_back(record(testutil::random_gaussian_mixture(rng, 3), 0.0));
        }
        const Relabelled out = relabel_map(r, ref);
        Permutation perm = {0, 1, 2};
        for (std::size_t t = 0; t < r.size(); ++t) {
            const double chosen = relabel_distance(out.draws[t], ref);
            std::sort(perm.begin(), perm.end());
            do {
                CHECK(chosen <= relabel_distance(permute(r[t].standard, perm), ref));
            } while (std::next_permutation(perm.begin(), perm.end()));
        }
    }
    SUBCASE("block mask") {
        // with locations only, the scales and weights do not matter
        StandardParams d = permute(ref, {2, 1, 0});
        d.scales = {9.0, 9.0, 9.0};
        d.weights = {0.9, 0.05, 0.05};
        RelabelOptions opt;
        opt.use_scales = false;
        opt.use_weights = false;
        const std::vector<ChainRecord> r = {record(d, 0.0)};
        CHECK(relabel_map(r, ref, opt).trace.r[0] == Permutation{2, 1, 0});
    }
    SUBCASE("large k is refused") {
        Rng rng = make_rng(43);
        const StandardParams big = testutil::random_gaussian_mixture(rng, 9);
        const std::vector<ChainRecord> r = {record(big, 0.0)};
        CHECK_THROWS_AS(relabel_map(r, big), ValidationError);
    }
}

TEST_CASE("switch detection") {
    SUBCASE("constant trace") {
        PermutationTrace t;
        t.r.assign(7, Permutation{0, 1});
        const SwitchReport s = detect_switching(t);
        CHECK(s.distinct == 1);
        CHECK(s.transitions == 0);
        CHECK(s.longest_run == 7);
    }
    SUBCASE("alternating") {
        PermutationTrace t;
        for (int i = 0; i < 10; ++i) {
            t.r.push_back(i % 2 == 0 ? Permutation{0, 1} : Permutation{1, 0});
        }
        const SwitchReport s = detect_switching(t);
        CHECK(s.distinct == 2);
        CHECK(s.transitions == 9);
        CHECK(s.longest_run == 1);
    }
}

TEST_CASE("k-means") {
    Rng rng = make_rng(44);
    const std::vector<std::vector<double>> centres = {{0.0, 0.0, 0.0}, {10.0, 1.0, 0.5}, {-5.0, 3.0, 0.2}};
    std::vector<std::vector<double>> pts;
    std::vector<std::vector<double>> sums(3, std::vector<double>(3, 0.0));
    for (int t = 0; t < 600; ++t) {
        const std::size_t c = static_cast<std::size_t>(t % 3);
        std::vector<double> p(3);
        for (std::size_t d = 0; d < 3; ++d) {
            p[d] = centres[c][d] + rnd::normal(rng, 0.0, 0.01);
            sums[c][d] += p[d];
        }
        pts.push_back(p);
    }
    const KMeansResult fit = kmeans(pts, 3);
    for (const auto& centre : fit.centres) {
        double best = INFINITY;
        for (const auto& s : sums) {
            double dist = 0.0;
            for (std::size_t d = 0; d < 3; ++d) {
                dist = std::max(dist, std::abs(centre[d] - s[d] / 200.0));
            }
            best = std::min(best, dist);
        }
        CHECK(best < 1e-6);
    }
    CHECK(fit.sizes == std::vector<std::size_t>{200, 200, 200});
    SUBCASE("within-cluster SSE never increases") {
        std::vector<std::vector<double>> noisy;
        for (int t = 0; t < 500; ++t) {
            noisy.push_back({rnd::normal(rng, 0.0, 3.0), rnd::normal(rng, 0.0, 1.0)});
        }
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const KMeansResult f = kmeans(noisy, 4, seed, 1);
            REQUIRE(!f.sse_history.empty());
            for (std::size_t i = 1; i < f.sse_history.size(); ++i) {
                CHECK(f.sse_history[i] <= f.sse_history[i - 1] + 1e-9);
            }
        }
    }
    SUBCASE("degenerate pools") {
        const std::vector<std::vector<double>> same(10, std::vector<double>{1.0, 1.0});
        CHECK_THROWS_AS(kmeans(same, 2), NumericalError);
    }
}

TEST_CASE("summaries") {
    SUBCASE("constant values") {
        const std::vector<double> v(20, 2.5);
        const ParamSummary s = summarise(v);
        CHECK(s.mean == 2.5);
        CHECK(s.median == 2.5);
        CHECK(s.q025 == 2.5);
        CHECK(s.q975 == 2.5);
    }
    SUBCASE("grid 1..100") {
        std::vector<double> v(100);
        std::iota(v.begin(), v.end(), 1.0);
        std::reverse(v.begin(), v.end());
        const ParamSummary s = summarise(v);
        CHECK(s.median == Approx(50.5).epsilon(1e-15));
        CHECK(s.q025 == Approx(3.475).epsilon(1e-14));
        CHECK(s.q975 == Approx(97.525).epsilon(1e-14));
        CHECK(s.mean == Approx(50.5));
    }
    SUBCASE("fixed permutation permutes the table") {
        Rng rng = make_rng(45);
        std::vector<StandardParams> draws;
        std::vector<StandardParams> shuffled;
        const Permutation perm = {2, 0, 1};
        for (int t = 0; t < 200; ++t) {
            draws.push_back(testutil::random_gaussian_mixture(rng, 3));
            shuffled.push_back(permute(draws.back(), perm));
        }
        const ComponentTable a = summarise_components(draws);
        const ComponentTable b = summarise_components(shuffled);
        for (std::size_t i = 0; i < 3; ++i) {
            check_equal(b.locs[i], a.locs[perm[i]]);
            check_equal(b.scales[i], a.scales[perm[i]]);
            check_equal(b.weights[i], a.weights[perm[i]]);
            CHECK(a.locs[i].q025 <= a.locs[i].median);
            CHECK(a.locs[i].median <= a.locs[i].q975);
        }
    }
}

TEST_CASE("chain summaries") {
    Rng rng = make_rng(46);
    std::vector<ChainRecord> recs;
    const StandardParams base{Family::gaussian, {0.3, 0.7}, {-2.0, 3.0}, {1.0, 0.5}};
    for (int t = 0; t < 400; ++t) {
        StandardParams p = base;
        p.locs[0] += rnd::normal(rng, 0.0, 0.05);
        p.locs[1] += rnd::normal(rng, 0.0, 0.05);
        GaussianState s;
        s.global = global_moments(p);
        ChainRecord r = record(t % 2 == 0 ? p : permute(p, {1, 0}), -std::abs(p.locs[0] + 2.0), t);
        r.state = s;
        recs.push_back(r);
    }
    const Summary s = summarise_chains({chain_of(recs)});
    CHECK(s.k == 2);
    CHECK(s.draws == 400);
    CHECK(s.switching.distinct == 2);
    CHECK(s.map_relabelled.locs[0].median == Approx(-2.0).epsilon(0.02));
    CHECK(s.map_relabelled.locs[1].median == Approx(3.0).epsilon(0.02));
    CHECK(std::abs(s.kmeans.locs[0].median - s.map_relabelled.locs[0].median) < 0.01);
    CHECK(std::abs(s.kmeans.weights[1].median - 0.7) < 1e-9);
    CHECK(s.global.count("mu") == 1);
}

TEST_CASE("density curves") {
    const StandardParams a{Family::gaussian, {0.4, 0.6}, {-1.0, 2.0}, {0.7, 1.3}};
    std::vector<double> grid;
    for (int i = 0; i <= 4000; ++i) {
        grid.push_back(-1.0 - 8.0 * 0.7 + i * (3.0 + 8.0 * 1.3 + 8.0 * 0.7) / 4000.0);
    }
    SUBCASE("single draw") {
        const std::vector<StandardParams> d = {a};
        const std::vector<double> f = density_curve(d, grid);
        for (std::size_t i = 0; i < grid.size(); i += 400) {
            CHECK(f[i] == Approx(mixture_density(a, grid[i])).epsilon(1e-15));
        }
    }
    SUBCASE("duplicates") {
        const std::vector<StandardParams> one = {a};
        const std::vector<StandardParams> two = {a, a};
        CHECK(testutil::max_abs_diff(density_curve(one, grid), density_curve(two, grid)) < 1e-15);
    }
    SUBCASE("trapezoid integral") {
        const std::vector<StandardParams> d = {a, permute(a, {1, 0})};
        const std::vector<double> f = density_curve(d, grid);
        double area = 0.0;
        for (std::size_t i = 1; i < grid.size(); ++i) {
            area += 0.5 * (f[i] + f[i - 1]) * (grid[i] - grid[i - 1]);
        }
        CHECK(std::abs(area - 1.0) < 1e-3);
    }
    SUBCASE("unsorted grid") {
        const std::vector<StandardParams> d = {a};
        const std::vector<double> bad = {0.0, -1.0};
        CHECK_THROWS_AS(density_curve(d, bad), ValidationError);
    }
    SUBCASE("rate families") {
        const StandardParams pois{Family::poisson, {0.5, 0.5}, {1.0, 4.0}, {}};
        CHECK(mixture_density(pois, 0.0) == Approx(0.5 * std::exp(-1.0) + 0.5 * std::exp(-4.0)));
        CHECK(mixture_density(pois, 0.5) == 0.0);
        const StandardParams ex{Family::exponential, {1.0, 0.0}, {2.0, 3.0}, {}};
        CHECK(mixture_density(ex, -1.0) == 0.0);
        CHECK(mixture_density(ex, 1.0) == Approx(0.5 * std::exp(-0.5)));
    }
}
