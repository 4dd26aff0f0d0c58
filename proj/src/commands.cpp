#include "weakmix/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "weakmix/errors.hpp"
#include "weakmix/io.hpp"
#include "weakmix/likelihood.hpp"
#include "weakmix/oracle.hpp"
#include "weakmix/postprocess.hpp"
#include "weakmix/priors.hpp"
#include "weakmix/sampler.hpp"
#include "weakmix/transforms.hpp"

#ifndef WEAKMIX_VERSION
#define WEAKMIX_VERSION "0.0.0"
#endif

namespace weakmix {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::vector<double> kQuantileLevels = {0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99};
constexpr std::size_t kDensityPoints = 201;

FitConfig load_config(const CommandOptions& o) {
    FitConfig c = o.config ? read_config(*o.config) : FitConfig{};
    if (o.family) {
        c.family = parse_family(*o.family);
        if (c.model) {
            c.model->family = c.family;
        }
    }
    if (o.k) {
        c.k = *o.k;
    }
    if (o.seed) {
        c.run.seed = *o.seed;
    }
    if (o.chains) {
        c.run.chains = *o.chains;
    }
    if (o.iters) {
        c.run.iterations = *o.iters;
    }
    if (o.burnin) {
        c.run.burnin = *o.burnin;
    }
    if (o.proposal) {
        c.run.proposal = *o.proposal;
    }
    return c;
}

const std::string& require(const std::optional<std::string>& v, const char* flag) {
    if (!v) {
        throw ValidationError(std::string("missing required option ") + flag);
    }
    return *v;
}

double draw_observation(const StandardParams& m, Rng& rng) {
    const std::size_t c = rnd::categorical(rng, m.weights);
    switch (m.family) {
    case Family::gaussian:
        return rnd::normal(rng, m.locs[c], m.scales[c]);
    case Family::poisson:
        return static_cast<double>(rnd::poisson(rng, m.locs[c]));
    case Family::exponential:
        return rnd::exponential_mean(rng, m.locs[c]);
    }
    return 0.0;
}

std::vector<double> density_grid(const StandardParams& ref) {
    std::vector<double> grid;
    if (ref.family == Family::poisson) {
        const double top = *std::max_element(ref.locs.begin(), ref.locs.end());
        const auto n = static_cast<std::size_t>(std::ceil(2.0 * top + 10.0));
        for (std::size_t x = 0; x <= n; ++x) {
            grid.push_back(static_cast<double>(x));
        }
        return grid;
    }
    double lo = 0.0;
    double hi = 0.0;
    if (ref.family == Family::gaussian) {
        lo = INFINITY;
        hi = -INFINITY;
        for (std::size_t i = 0; i < ref.k(); ++i) {
            lo = std::min(lo, ref.locs[i] - 5.0 * ref.scales[i]);
            hi = std::max(hi, ref.locs[i] + 5.0 * ref.scales[i]);
        }
    } else {
        hi = 6.0 * *std::max_element(ref.locs.begin(), ref.locs.end());
    }
    for (std::size_t g = 0; g < kDensityPoints; ++g) {
        grid.push_back(lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(kDensityPoints - 1));
    }
    return grid;
}

void write_density(const fs::path& path, const std::vector<ChainResult>& chains, const StandardParams& ref) {
    std::vector<StandardParams> draws;
    for (const ChainResult& c : chains) {
        for (const ChainRecord& r : c.records) {
            draws.push_back(r.standard);
        }
    }
    const std::vector<double> grid = density_grid(ref);
    const std::vector<double> dens = density_curve(draws, grid);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot write '" + path.string() + "'");
    }
    out << "x,density\n";
    for (std::size_t g = 0; g < grid.size(); ++g) {
        out << format_double(grid[g]) << ',' << format_double(dens[g]) << '\n';
    }
}

json psrf_table(const std::vector<ChainResult>& chains) {
    json table = json::object();
    if (chains.size() < 2) {
        return table;
    }
    std::vector<std::string> names = {"log_posterior"};
    if (chains.front().family == Family::gaussian) {
        names.insert(names.begin(), {"mu", "sigma"});
    } else {
        names.insert(names.begin(), "lambda");
    }
    for (const std::string& n : names) {
        try {
            table[n] = gelman_rubin(chains, select_scalar(n));
        } catch (const NumericalError&) {
            table[n] = nullptr;
        }
    }
    return table;
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

std::vector<ChainResult> run_fit(const Dataset& data, const FitConfig& c) {
    switch (c.family) {
    case Family::gaussian: {
        const bool two = c.k == 2 && c.sampler != "general";
        if (c.sampler == "k2" && c.k != 2) {
            throw ValidationError("the 'k2' sampler needs k = 2");
        }
        return two ? mwg_gaussian_k2(data, c.prior, c.run) : mwg_gaussian(data, c.k, c.prior, c.run);
    }
    case Family::poisson:
        return mwg_poisson(data, c.k, c.prior, c.run);
    case Family::exponential:
        return mwg_exponential(data, c.k, c.prior, c.run);
    }
    throw ValidationError("unknown family");
}

std::vector<fs::path> chain_files(const fs::path& p) {
    std::vector<fs::path> out;
    if (fs::is_directory(p)) {
        for (const auto& e : fs::directory_iterator(p)) {
            const std::string name = e.path().filename().string();
            if (name.rfind("chain_", 0) == 0 && e.path().extension() == ".csv") {
                out.push_back(e.path());
            }
        }
        std::sort(out.begin(), out.end(), [](const fs::path& a, const fs::path& b) {
            const std::string sa = a.stem().string();
            const std::string sb = b.stem().string();
            return sa.size() != sb.size() ? sa.size() < sb.size() : sa < sb;
        });
    } else if (fs::exists(p)) {
        out.push_back(p);
    }
    if (out.empty()) {
        throw ValidationError("no chain CSV files found at '" + p.string() + "'");
    }
    return out;
}

json check(const std::string& name, double value, double reference, double error, double tolerance) {
    return {{"name", name},
            {"value", value},
            {"reference", reference},
            {"error", error},
            {"tolerance", tolerance},
            {"pass", error <= tolerance}};
}

} // namespace

std::string version() {
    return WEAKMIX_VERSION;
}

int cmd_simulate(const CommandOptions& o, std::ostream& log) {
    const FitConfig c = load_config(o);
    if (!c.model) {
        throw ValidationError("simulate needs a 'model' block (weights, locs, scales) in the config");
    }
    StandardParams m = *c.model;
    m.family = c.family;
    m.validate();
    if (!o.n) {
        throw ValidationError("missing required option --n");
    }
    const fs::path out = require(o.out, "--out");
    Rng rng = make_rng(c.run.seed);
    Dataset d;
    d.values.reserve(*o.n);
    for (std::size_t i = 0; i < *o.n; ++i) {
        d.values.push_back(draw_observation(m, rng));
    }
    write_data_csv(out, d);
    log << "wrote " << d.n() << " observations to " << out.string() << '\n';
    return kExitOk;
}

int cmd_fit(const CommandOptions& o, std::ostream& log) {
    const auto start = std::chrono::steady_clock::now();
    const FitConfig c = load_config(o);
    const Dataset data = read_data_csv(require(o.data, "--data"));
    const fs::path out = require(o.out, "--out");
    validate_dataset(data, c.family);

    const std::vector<ChainResult> chains = run_fit(data, c);
    fs::create_directories(out);

    json outputs = json::array();
    json blocks = json::array();
    for (std::size_t i = 0; i < chains.size(); ++i) {
        const fs::path p = out / ("chain_" + std::to_string(i + 1) + ".csv");
        write_chain_csv(p, chains[i]);
        outputs.push_back(p.filename().string());
        json per = json::array();
        for (const ScaleBlock& b : chains[i].bank.blocks) {
            per.push_back({{"block", b.name},
                           {"final_scale", b.scale},
                           {"adaptive", b.adaptive},
                           {"acceptance_rate", b.acceptance_rate()},
                           {"post_adaptation_acceptance_rate", b.post_acceptance_rate()}});
        }
        blocks.push_back({{"chain", i + 1}, {"blocks", per}});
    }

    const Summary summary = summarise_chains(chains, c.run.seed);
    write_json(out / "summary.json", to_json(summary));
    outputs.push_back("summary.json");
    write_density(out / "density.csv", chains, summary.map.params);
    outputs.push_back("density.csv");

    json seeds = {{"base", c.run.seed}, {"chain_streams", json::array()}};
    for (std::size_t i = 0; i < chains.size(); ++i) {
        seeds["chain_streams"].push_back(i);
    }
    const json psrf = psrf_table(chains);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json manifest = {{"version", version()},
                     {"config", config_to_json(c)},
                     {"data", {{"path", *o.data}, {"n", data.n()}}},
                     {"seeds", seeds},
                     {"acceptance", blocks},
                     {"psrf", psrf},
                     {"outputs", outputs},
                     {"timing", {{"wall_clock_seconds", secs}, {"finished_at", utc_now()}}}};
    write_json(out / "manifest.json", manifest);

    log << "fit " << chains.size() << " chain(s), " << summary.draws << " draws kept";
    if (!psrf.empty()) {
        log << ", PSRF " << psrf.dump();
    }
    log << '\n';
    return kExitOk;
}

int cmd_prior_sample(const CommandOptions& o, std::ostream& log) {
    const FitConfig c = load_config(o);
    const std::size_t n = o.n.value_or(20000);
    const fs::path out = require(o.out, "--out");
    fs::create_directories(out);
    const std::vector<PriorDraw> draws = sample_prior(c.prior, c.k, c.family, n, c.run.seed);

    std::ofstream f(out / "prior_draws.csv", std::ios::binary);
    if (!f) {
        throw ValidationError("cannot write prior draws under '" + out.string() + "'");
    }
    const std::size_t k = c.k;
    f << "draw";
    for (std::size_t i = 0; i < k; ++i) {
        f << ",p_" << i + 1;
    }
    if (c.family == Family::gaussian) {
        f << ",phi";
        for (std::size_t i = 0; i + 2 < k; ++i) {
            f << ",varpi_" << i + 1;
        }
        for (std::size_t i = 0; i + 1 < k; ++i) {
            f << ",xi_" << i + 1;
        }
        for (std::size_t i = 0; i < k; ++i) {
            f << ",mu_" << i + 1;
        }
        for (std::size_t i = 0; i < k; ++i) {
            f << ",sigma_" << i + 1;
        }
    } else {
        for (std::size_t i = 0; i < k; ++i) {
            f << ",gamma_" << i + 1;
        }
    }
    f << '\n';
    for (std::size_t t = 0; t < draws.size(); ++t) {
        const PriorDraw& d = draws[t];
        f << t + 1;
        auto put = [&](double v) { f << ',' << format_double(v); };
        for (double v : d.weights) {
            put(v);
        }
        if (c.family == Family::gaussian) {
            put(d.angles.phi);
            for (double v : d.angles.varpi) {
                put(v);
            }
            for (double v : d.angles.xi) {
                put(v);
            }
            const StandardParams sp = compose_standard({0.0, 1.0}, d.weights, d.angles);
            for (double v : sp.locs) {
                put(v);
            }
            for (double v : sp.scales) {
                put(v);
            }
        } else {
            for (double v : d.gamma) {
                put(v);
            }
        }
        f << '\n';
    }
    log << "wrote " << draws.size() << " prior draws to " << (out / "prior_draws.csv").string() << '\n';

    if (c.family == Family::gaussian) {
        const auto table = prior_quantile_study(c.prior, k, n, kQuantileLevels, c.run.seed);
        std::ofstream q(out / "prior_quantiles.csv", std::ios::binary);
        q << "draw";
        for (double l : kQuantileLevels) {
            q << ",q" << format_double(l);
        }
        q << '\n';
        for (std::size_t t = 0; t < table.size(); ++t) {
            q << t + 1;
            for (double v : table[t]) {
                q << ',' << format_double(v);
            }
            q << '\n';
        }
        log << "wrote quantile table to " << (out / "prior_quantiles.csv").string() << '\n';
    }
    return kExitOk;
}

int cmd_summarize(const CommandOptions& o, std::ostream& log) {
    const std::vector<fs::path> files = chain_files(require(o.data, "--data"));
    const fs::path out = require(o.out, "--out");
    std::vector<ChainResult> chains;
    for (const fs::path& p : files) {
        chains.push_back(read_chain_csv(p));
        chains.back().chain_index = chains.size() - 1;
        if (chains.back().family != chains.front().family || chains.back().k != chains.front().k) {
            throw ValidationError("chain files disagree on family or component count");
        }
    }
    fs::create_directories(out);
    const Summary summary = summarise_chains(chains, o.seed.value_or(1));
    write_json(out / "summary.json", to_json(summary));
    write_density(out / "density.csv", chains, summary.map.params);
    log << "summarised " << summary.draws << " draws from " << files.size() << " chain file(s)\n";
    return kExitOk;
}

json oracle_suite(std::size_t n_mc, std::uint64_t seed, bool& passed) {
    json checks = json::array();

    Rng rng = make_rng(seed, 101);
    for (int c = 0; c < 20; ++c) {
        PairTerm t;
        t.p_i = rnd::uniform(rng, 0.05, 1.0);
        t.p_j = rnd::uniform(rng, 0.05, 1.0);
        t.alpha_i = rnd::uniform(rng, -3.0, 3.0);
        t.alpha_j = rnd::uniform(rng, -3.0, 3.0);
        t.tau_i = rnd::uniform(rng, 0.1, 2.0);
        t.tau_j = rnd::uniform(rng, 0.1, 2.0);
        const double gap = rnd::uniform(rng, 0.1, 10.0) * (rnd::uniform(rng) < 0.5 ? -1.0 : 1.0);
        t.x1 = rnd::uniform(rng, -5.0, 5.0);
        t.x2 = t.x1 - gap;
        const double closed = gaussian_pair_closed(t);
        const QuadratureResult q = gaussian_pair_quad(t);
        checks.push_back(check("pair_" + std::to_string(c + 1), q.value, closed,
                               std::abs(q.value - closed) / closed, 1e-5));
    }

    struct Case {
        Family family;
        double x;
    };
    const Case cases[] = {{Family::poisson, 1.0}, {Family::poisson, 3.0}, {Family::poisson, 7.0},
                          {Family::exponential, 0.5}, {Family::exponential, 2.0}};
    std::uint64_t stream = 0;
    for (const Case& cs : cases) {
        for (std::size_t k : {2, 5}) {
            const MonteCarloEstimate m =
                marginal_one_obs_mc(cs.family, k, cs.x, PriorSpec{}, n_mc, seed + 1000 + stream++);
            const std::string name = std::string("marginal_") + std::string(to_string(cs.family)) + "_k" +
                                     std::to_string(k) + "_x" + format_double(cs.x);
            checks.push_back(check(name, m.estimate, 1.0 / cs.x, std::abs(m.estimate - 1.0 / cs.x),
                                   3.0 * m.std_error + m.rounding_error));
        }
    }

    for (double L : {2.0, std::exp(1.0), std::exp(2.0), 10.0}) {
        const double v = n1_divergence_probe(L);
        checks.push_back(check("divergence_L" + format_double(L), v, 2.0 * std::log(L),
                               std::abs(v - 2.0 * std::log(L)), 0.0));
    }
    const double ratio = n1_divergence_probe(4.0) / n1_divergence_probe(2.0);
    checks.push_back(check("divergence_ratio", ratio, 2.0, std::abs(ratio - 2.0), 0.0));

    passed = std::all_of(checks.begin(), checks.end(), [](const json& c) { return c.at("pass").get<bool>(); });
    return {{"checks", checks}, {"passed", passed}};
}

int cmd_oracle_check(const CommandOptions& o, std::ostream& log) {
    bool passed = false;
    const json report = oracle_suite(o.n.value_or(100000), o.seed.value_or(1), passed);
    log << report.dump(2) << '\n';
    if (o.out) {
        write_json(*o.out, report);
    }
    return passed ? kExitOk : kExitNumerical;
}

int run_command(const std::string& name, const CommandOptions& o, std::ostream& log, std::ostream& err) {
    try {
        if (name == "simulate") {
            return cmd_simulate(o, log);
        }
        if (name == "fit") {
            return cmd_fit(o, log);
        }
        if (name == "prior-sample") {
            return cmd_prior_sample(o, log);
        }
        if (name == "summarize") {
            return cmd_summarize(o, log);
        }
        if (name == "oracle-check") {
            return cmd_oracle_check(o, log);
        }
        err << "error: unknown command '" << name << "'\n";
        return kExitValidation;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}

} // namespace weakmix
