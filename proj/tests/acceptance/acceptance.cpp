// Acceptance suite: one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "weakmix/likelihood.hpp"
#include "weakmix/oracle.hpp"
#include "weakmix/postprocess.hpp"
#include "weakmix/priors.hpp"
#include "weakmix/sampler.hpp"
#include "weakmix/transforms.hpp"

namespace fs = std::filesystem;
using namespace weakmix;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::vector<double> simplex(Rng& rng, std::size_t k) {
    for (;;) {
        std::vector<double> p = rnd::dirichlet(rng, k, 1.0);
        if (*std::min_element(p.begin(), p.end()) > 1e-6) {
            return p;
        }
    }
}

Dataset simulate(const StandardParams& m, std::size_t n, Rng& rng) {
    Dataset d;
    for (std::size_t t = 0; t < n; ++t) {
        const std::size_t c = rnd::categorical(rng, m.weights);
        if (m.family == Family::gaussian) {
            d.values.push_back(rnd::normal(rng, m.locs[c], m.scales[c]));
        } else {
            d.values.push_back(rnd::poisson(rng, m.locs[c]));
        }
    }
    return d;
}

std::vector<double> pooled(const std::vector<ChainResult>& chains, const char* name) {
    const ScalarSelector sel = select_scalar(name);
    std::vector<double> out;
    for (const ChainResult& c : chains) {
        const std::vector<double> t = trace(c, sel);
        out.insert(out.end(), t.begin(), t.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + WEAKMIX_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

fs::path scratch_dir() {
    const fs::path p = fs::temp_directory_path() / ("weakmix_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

Outcome transforms_suite() {
    Rng rng = make_rng(101);
    double round_trip = 0.0;
    double constraints = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t k = 2 + static_cast<std::size_t>(rep) % 9;
        StandardParams p{Family::gaussian, simplex(rng, k), {}, {}};
        for (std::size_t i = 0; i < k; ++i) {
            p.locs.push_back(rnd::uniform(rng, -10.0, 10.0));
            p.scales.push_back(rnd::uniform(rng, 0.2, 4.0));
        }
        const auto [g, a] = angular_from_standard(p);
        const StandardParams back = standard_from_angular(g, p.weights, a);
        for (std::size_t i = 0; i < k; ++i) {
            round_trip = std::max({round_trip, std::abs(back.locs[i] - p.locs[i]),
                                   std::abs(back.scales[i] - p.scales[i]),
                                   std::abs(back.weights[i] - p.weights[i])});
        }
        const AlphaTau at = to_alpha_tau(p, g);
        const GammaEta ge = to_gamma_eta(at, p.weights);
        double s_alpha = 0.0;
        double s_norm = 0.0;
        double plane = 0.0;
        double sphere = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            s_alpha += p.weights[i] * at.alpha[i];
            s_norm += p.weights[i] * (at.alpha[i] * at.alpha[i] + at.tau[i] * at.tau[i]);
            plane += std::sqrt(p.weights[i]) * ge.gamma[i];
            sphere += ge.gamma[i] * ge.gamma[i] + ge.eta[i] * ge.eta[i];
        }
        constraints = std::max({constraints, std::abs(s_alpha), std::abs(s_norm - 1.0), std::abs(plane),
                                std::abs(sphere - 1.0)});
    }
    return {round_trip <= 1e-10 && constraints <= 1e-12,
            "max round-trip error " + fmt("%.2e", round_trip) + ", max constraint error " + fmt("%.2e", constraints)};
}

Outcome basis_suite() {
    Rng rng = make_rng(102);
    double worst = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t k = 2 + static_cast<std::size_t>(rep) % 9;
        const std::vector<double> p = simplex(rng, k);
        const OrthonormalBasis b = build_basis(p);
        for (std::size_t s = 0; s < k - 1; ++s) {
            double plane = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                plane += b.vectors[s][i] * std::sqrt(p[i]);
            }
            worst = std::max(worst, std::abs(plane));
            for (std::size_t t = s; t < k - 1; ++t) {
                double d = 0.0;
                for (std::size_t i = 0; i < k; ++i) {
                    d += b.vectors[s][i] * b.vectors[t][i];
                }
                worst = std::max(worst, std::abs(d - (s == t ? 1.0 : 0.0)));
            }
        }
    }
    return {worst <= 1e-12, "max Gram/hyperplane error " + fmt("%.2e", worst)};
}

Outcome pair_oracle() {
    Rng rng = make_rng(103);
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        PairTerm t;
        t.p_i = rnd::uniform(rng, 0.05, 0.95);
        t.p_j = rnd::uniform(rng, 0.05, 0.95);
        t.alpha_i = rnd::uniform(rng, -3.0, 3.0);
        t.alpha_j = rnd::uniform(rng, -3.0, 3.0);
        t.tau_i = rnd::uniform(rng, 0.1, 2.0);
        t.tau_j = rnd::uniform(rng, 0.1, 2.0);
        t.x1 = rnd::uniform(rng, -5.0, 5.0);
        const double gap = rnd::uniform(rng, 0.1, 10.0);
        t.x2 = t.x1 + (rnd::uniform(rng) < 0.5 ? -gap : gap);
        const double q = gaussian_pair_quad(t).value;
        worst = std::max(worst, std::abs(gaussian_pair_closed(t) / q - 1.0));
    }
    return {worst < 1e-5, "max relative error " + fmt("%.2e", worst)};
}

Outcome marginal_oracle() {
    bool ok = true;
    double worst = 0.0;
    std::uint64_t seed = 104;
    auto one = [&](Family f, std::size_t k, double x) {
        const MonteCarloEstimate m = marginal_one_obs_mc(f, k, x, PriorSpec{}, 1000000, seed++);
        const double err = std::abs(m.estimate - 1.0 / x);
        const double allowed = 3.0 * m.std_error + m.rounding_error;
        ok = ok && err <= allowed;
        worst = std::max(worst, err / allowed);
    };
    for (std::size_t k : {2, 5}) {
        for (double x : {1.0, 3.0, 7.0}) {
            one(Family::poisson, k, x);
        }
        for (double x : {0.5, 2.0}) {
            one(Family::exponential, k, x);
        }
    }
    return {ok, "10 cases, largest |error| / (3 s.e. + rounding bound) " + fmt("%.3f", worst)};
}

Outcome example1() {
    const StandardParams truth{Family::gaussian, {0.65, 0.35}, {-8.0, -0.5}, {2.0, 1.0}};
    Rng data_rng = make_rng(1, 999);
    const Dataset data = simulate(truth, 50, data_rng);
    RunConfig cfg;
    cfg.iterations = 20000;
    cfg.burnin = 10000;
    cfg.chains = 4;
    cfg.seed = 1;
    cfg.proposal = 1;
    const auto chains = mwg_gaussian_k2(data, PriorSpec{}, cfg);

    bool ok = true;
    std::string detail;
    const std::pair<const char*, double> targets[] = {{"mu", -5.375}, {"sigma_sq", 15.746875}, {"phi_sq", 0.81266}};
    for (const auto& [name, value] : targets) {
        const std::vector<double> v = pooled(chains, name);
        const double lo = quantile_sorted(v, 0.05);
        const double hi = quantile_sorted(v, 0.95);
        ok = ok && lo <= value && value <= hi;
        detail += std::string(name) + " [" + fmt("%.3f", lo) + ", " + fmt("%.3f", hi) + "] ";
    }
    // eta as an unordered pair
    std::vector<double> eta_lo;
    std::vector<double> eta_hi;
    for (const ChainResult& c : chains) {
        for (const ChainRecord& r : c.records) {
            const GaussianState& s = std::get<GaussianState>(r.state);
            const std::vector<double> e = eta_from_angles(s.angles.phi_sq(), s.angles.xi);
            eta_lo.push_back(std::min(e[0], e[1]));
            eta_hi.push_back(std::max(e[0], e[1]));
        }
    }
    std::sort(eta_lo.begin(), eta_lo.end());
    std::sort(eta_hi.begin(), eta_hi.end());
    detail += "eta {[" + fmt("%.3f", quantile_sorted(eta_lo, 0.05)) + ", " + fmt("%.3f", quantile_sorted(eta_lo, 0.95)) +
              "], [" + fmt("%.3f", quantile_sorted(eta_hi, 0.05)) + ", " + fmt("%.3f", quantile_sorted(eta_hi, 0.95)) + "]} ";

    const double r_mu = gelman_rubin(chains, select_scalar("mu"));
    const double r_sigma = gelman_rubin(chains, select_scalar("sigma"));
    ok = ok && r_mu < 1.15 && r_sigma < 1.15;
    detail += "PSRF mu " + fmt("%.4f", r_mu) + " sigma " + fmt("%.4f", r_sigma);

    double lo_rate = 1.0;
    double hi_rate = 0.0;
    for (const ChainResult& c : chains) {
        for (const ScaleBlock& b : c.bank.blocks) {
            if (b.adaptive) {
                lo_rate = std::min(lo_rate, b.post_acceptance_rate());
                hi_rate = std::max(hi_rate, b.post_acceptance_rate());
            }
        }
    }
    ok = ok && lo_rate >= 0.15 && hi_rate <= 0.6;
    detail += ", adaptive-block rates in [" + fmt("%.3f", lo_rate) + ", " + fmt("%.3f", hi_rate) + "]";
    return {ok, detail};
}

Outcome example3() {
    const StandardParams truth{Family::gaussian, {0.27, 0.4, 0.33}, {-4.5, 10.0, 3.0}, {1.0, 1.0, 1.0}};
    Rng data_rng = make_rng(1, 999);
    const Dataset data = simulate(truth, 50, data_rng);
    RunConfig cfg;
    cfg.iterations = 100000;
    cfg.burnin = 1000;
    cfg.seed = 1;
    const auto chains = mwg_gaussian(data, 3, PriorSpec{}, cfg);
    const Summary s = summarise_chains(chains, cfg.seed);

    // components in location order
    const double locs[] = {-4.5, 3.0, 10.0};
    const double weights[] = {0.27, 0.33, 0.4};
    bool ok = true;
    double loc_err = 0.0;
    double weight_err = 0.0;
    double method_gap = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        loc_err = std::max(loc_err, std::abs(s.map_relabelled.locs[i].median - locs[i]));
        weight_err = std::max(weight_err, std::abs(s.map_relabelled.weights[i].median - weights[i]));
        method_gap = std::max({method_gap, std::abs(s.map_relabelled.locs[i].median - s.kmeans.locs[i].median),
                               std::abs(s.map_relabelled.scales[i].median - s.kmeans.scales[i].median),
                               std::abs(s.map_relabelled.weights[i].median - s.kmeans.weights[i].median)});
    }
    ok = loc_err <= 0.75 && weight_err <= 0.1 && method_gap <= 0.1 && s.switching.distinct >= 2;
    std::string detail = "max |median mu - truth| " + fmt("%.3f", loc_err) + ", max |median p - truth| " +
                         fmt("%.3f", weight_err) + ", k-means vs MAP medians " + fmt("%.3f", method_gap) +
                         ", distinct permutations " + std::to_string(s.switching.distinct);
    return {ok, detail};
}

Outcome example5() {
    const StandardParams truth{Family::poisson, {0.6, 0.4}, {1.0, 5.0}, {}};
    const std::uint64_t seed = 2;
    Rng data_rng = make_rng(seed, 999);
    const Dataset data = simulate(truth, 10000, data_rng);
    RunConfig cfg;
    cfg.iterations = 50000;
    cfg.burnin = 1000;
    cfg.chains = 4;
    cfg.seed = seed;
    const auto chains = mwg_poisson(data, 2, PriorSpec{}, cfg);
    const Summary s = summarise_chains(chains, cfg.seed);
    const double lambda = s.global.at("lambda").mean;
    const double rate_err = std::max(std::abs(s.map_relabelled.locs[0].mean - 1.0),
                                     std::abs(s.map_relabelled.locs[1].mean - 5.0));
    const double weight_err = std::max(std::abs(s.map_relabelled.weights[0].mean - 0.6),
                                       std::abs(s.map_relabelled.weights[1].mean - 0.4));
    const bool ok = std::abs(lambda - 2.6) <= 0.05 && rate_err <= 0.3 && weight_err <= 0.05;
    return {ok, "lambda mean " + fmt("%.4f", lambda) + " (sample mean " + fmt("%.4f", data.mean()) +
                    "), max rate error " + fmt("%.3f", rate_err) + ", max weight error " + fmt("%.3f", weight_err)};
}

Outcome prior_study() {
    double worst = 0.0;
    for (std::size_t k : {3, 20}) {
        for (PriorKind kind : {PriorKind::single_uniform, PriorKind::double_uniform}) {
            for (const PriorDraw& d : sample_prior(PriorSpec{kind}, k, Family::gaussian, 20000, 105 + k)) {
                const MixtureMoments m = mixture_moments(compose_standard({0.0, 1.0}, d.weights, d.angles));
                worst = std::max({worst, std::abs(m.mean), std::abs(m.variance - 1.0)});
            }
        }
    }
    const std::vector<double> levels = {0.99};
    auto iqr = [&](PriorKind kind) {
        const auto table = prior_quantile_study(PriorSpec{kind}, 20, 20000, levels, 106);
        std::vector<double> v;
        for (const auto& row : table) {
            v.push_back(row[0]);
        }
        std::sort(v.begin(), v.end());
        return quantile_sorted(v, 0.75) - quantile_sorted(v, 0.25);
    };
    const double du = iqr(PriorKind::double_uniform);
    const double su = iqr(PriorKind::single_uniform);
    return {worst <= 1e-10 && du > su, "max moment error " + fmt("%.2e", worst) + ", k = 20 IQR of 0.99-quantile: double " +
                                           fmt("%.4f", du) + " vs single " + fmt("%.4f", su)};
}

Outcome guard_rails(const fs::path& dir) {
    {
        std::ofstream(dir / "gauss.json") << R"({"family": "gaussian", "k": 2, "run": {"iterations": 200, "burnin": 10}})";
        std::ofstream(dir / "pois.json") << R"({"family": "poisson", "k": 2, "run": {"iterations": 200, "burnin": 10}})";
        std::ofstream(dir / "one.csv") << "x\n0.7\n";
        std::ofstream(dir / "zeros.csv") << "x\n0\n0\n0\n0\n";
    }
    const int g = run_cli("fit --config \"" + (dir / "gauss.json").string() + "\" --data \"" +
                          (dir / "one.csv").string() + "\" --out \"" + (dir / "g").string() + "\"");
    const int p = run_cli("fit --config \"" + (dir / "pois.json").string() + "\" --data \"" +
                          (dir / "zeros.csv").string() + "\" --out \"" + (dir / "p").string() + "\"");
    bool probe = true;
    for (double L : {1.5, 2.0, std::exp(1.0), 10.0, 1e3, 1e8}) {
        probe = probe && n1_divergence_probe(L) == 2.0 * std::log(L);
    }
    return {g == 2 && p == 2 && probe, "exit codes n = 1 Gaussian " + std::to_string(g) + ", all-zero Poisson " +
                                           std::to_string(p) + ", probe " + (probe ? "exact" : "mismatch")};
}

Outcome determinism(const fs::path& dir) {
    std::ofstream(dir / "det.json") << R"({"family": "gaussian", "k": 3,
      "model": {"weights": [0.27, 0.4, 0.33], "locs": [-4.5, 10, 3], "scales": [1, 1, 1]},
      "run": {"iterations": 5000, "burnin": 500, "chains": 3, "seed": 42}})";
    const std::string cfg = "--config \"" + (dir / "det.json").string() + "\"";
    bool ok = run_cli("simulate " + cfg + " --n 50 --out \"" + (dir / "det.csv").string() + "\"") == 0;
    for (const char* out : {"d1", "d2"}) {
        ok = ok && run_cli("fit " + cfg + " --data \"" + (dir / "det.csv").string() + "\" --out \"" +
                           (dir / out).string() + "\"") == 0;
    }
    std::size_t same = 0;
    for (int c = 1; c <= 3; ++c) {
        const std::string name = "chain_" + std::to_string(c) + ".csv";
        const std::string a = slurp(dir / "d1" / name);
        if (!a.empty() && a == slurp(dir / "d2" / name)) {
            ++same;
        }
    }
    return {ok && same == 3, std::to_string(same) + " of 3 chain files byte-identical"};
}

} // namespace

int main() {
    const fs::path dir = scratch_dir();
    struct Criterion {
        int id;
        const char* name;
        double limit_seconds;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "transform round trips and constraints", 5.0, transforms_suite},
        {2, "orthonormal basis", 0.0, basis_suite},
        {3, "pair term closed form vs quadrature", 30.0, pair_oracle},
        {4, "one-observation marginals of rate mixtures", 60.0, marginal_oracle},
        {5, "two-component Gaussian reproduction", 120.0, example1},
        {6, "three-component Gaussian reproduction", 300.0, example3},
        {7, "Poisson mixture reproduction", 180.0, example5},
        {8, "prior study", 0.0, prior_study},
        {9, "guard rails", 0.0, [&] { return guard_rails(dir); }},
        {10, "determinism", 0.0, [&] { return determinism(dir); }},
    };
    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool pass = o.pass;
        if (c.limit_seconds > 0.0 && secs > c.limit_seconds) {
            pass = false;
            o.detail += "; runtime limit " + fmt("%.0f", c.limit_seconds) + " s exceeded";
        }
        failures += pass ? 0 : 1;
        std::cout << "criterion " << c.id << ": " << (pass ? "PASS" : "FAIL") << "  " << c.name << " ("
                  << o.detail << "; " << fmt("%.1f", secs) << " s)" << std::endl;
    }
    fs::remove_all(dir);
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
