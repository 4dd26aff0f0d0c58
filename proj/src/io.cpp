#include "weakmix/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "weakmix/errors.hpp"
#include "weakmix/transforms.hpp"

namespace weakmix {

using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == sep) {
        out.emplace_back();
    }
    return out;
}

std::string strip(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) {
        s.pop_back();
    }
    std::size_t i = 0;
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) {
        ++i;
    }
    return s.substr(i);
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open '" + path.string() + "'");
    }
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot write '" + path.string() + "'");
    }
    return out;
}

void check_keys(const json& j, const std::set<std::string>& allowed, const char* where) {
    if (!j.is_object()) {
        throw ValidationError(std::string(where) + " must be a JSON object");
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.contains(it.key())) {
            throw ValidationError(std::string("unknown key '") + it.key() + "' in " + where);
        }
    }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) {
        return fallback;
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad value for '") + key + "': " + e.what());
    }
}

std::string numbered(const char* stem, std::size_t i) {
    return std::string(stem) + "_" + std::to_string(i + 1);
}

const char* component_stem(Family f) {
    switch (f) {
    case Family::gaussian:
        return "mu";
    case Family::poisson:
        return "lambda";
    case Family::exponential:
        return "mean";
    }
    return "loc";
}

} // namespace

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw ValidationError("not a number: '" + std::string(text) + "'");
    }
    return v;
}

Dataset read_data_csv(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    Dataset d;
    std::string line;
    std::size_t row = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++row;
        line = strip(line);
        if (line.empty()) {
            continue;
        }
        const std::string first = strip(split(line, ',').front());
        if (!header_seen) {
            header_seen = true;
            double probe = 0.0;
            const auto res = std::from_chars(first.data(), first.data() + first.size(), probe);
            if (res.ec != std::errc() || res.ptr != first.data() + first.size()) {
                continue;
            }
        }
        try {
            d.values.push_back(parse_double(first));
        } catch (const ValidationError&) {
            throw ValidationError(path.string() + ":" + std::to_string(row) + ": not a number: '" + first + "'");
        }
    }
    return d;
}

void write_data_csv(const std::filesystem::path& path, const Dataset& data) {
    std::ofstream out = open_out(path);
    out << "x\n";
    for (double v : data.values) {
        out << format_double(v) << '\n';
    }
}

std::vector<std::string> chain_columns(const ChainResult& chain) {
    const std::size_t k = chain.k;
    std::vector<std::string> cols = {"iteration", "log_posterior"};
    if (chain.family == Family::gaussian) {
        cols.insert(cols.end(), {"mu", "sigma", "phi"});
        for (std::size_t i = 0; i + 2 < k; ++i) {
            cols.push_back(numbered("varpi", i));
        }
        for (std::size_t i = 0; i + 1 < k; ++i) {
            cols.push_back(numbered("xi", i));
        }
    } else {
        cols.push_back("lambda");
        for (std::size_t i = 0; i < k; ++i) {
            cols.push_back(numbered("gamma", i));
        }
    }
    for (std::size_t i = 0; i < k; ++i) {
        cols.push_back(numbered("p", i));
    }
    for (std::size_t i = 0; i < k; ++i) {
        cols.push_back(numbered(component_stem(chain.family), i));
    }
    if (chain.family == Family::gaussian) {
        for (std::size_t i = 0; i < k; ++i) {
            cols.push_back(numbered("sigma", i));
        }
    }
    for (const std::string& b : chain.block_names) {
        cols.push_back("acc_" + b);
    }
    return cols;
}

void write_chain_csv(const std::filesystem::path& path, const ChainResult& chain) {
    std::ofstream out = open_out(path);
    const std::vector<std::string> cols = chain_columns(chain);
    for (std::size_t c = 0; c < cols.size(); ++c) {
        out << (c ? "," : "") << cols[c];
    }
    out << '\n';
    for (const ChainRecord& r : chain.records) {
        out << r.iteration << ',' << format_double(r.log_posterior);
        auto put = [&](double v) { out << ',' << format_double(v); };
        if (const auto* g = std::get_if<GaussianState>(&r.state)) {
            put(g->global.mu);
            put(g->global.sigma);
            put(g->angles.phi);
            for (double v : g->angles.varpi) {
                put(v);
            }
            for (double v : g->angles.xi) {
                put(v);
            }
        } else {
            const auto& s = std::get<RateReparam>(r.state);
            put(s.lambda);
            for (double v : s.gamma) {
                put(v);
            }
        }
        for (double v : r.standard.weights) {
            put(v);
        }
        for (double v : r.standard.locs) {
            put(v);
        }
        for (double v : r.standard.scales) {
            put(v);
        }
        for (std::uint8_t a : r.accepted) {
            out << ',' << static_cast<int>(a);
        }
        out << '\n';
    }
}

ChainResult read_chain_csv(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) {
        throw ValidationError("empty chain file '" + path.string() + "'");
    }
    const std::vector<std::string> header = split(strip(line), ',');
    std::map<std::string, std::size_t> col;
    for (std::size_t c = 0; c < header.size(); ++c) {
        col[header[c]] = c;
    }
    ChainResult chain;
    if (col.contains("mu")) {
        chain.family = Family::gaussian;
    } else if (col.contains("lambda_1")) {
        chain.family = Family::poisson;
    } else if (col.contains("mean_1")) {
        chain.family = Family::exponential;
    } else {
        throw ValidationError("unrecognised chain header in '" + path.string() + "'");
    }
    std::size_t k = 0;
    while (col.contains(numbered("p", k))) {
        ++k;
    }
    if (k < 2) {
        throw ValidationError("chain file must have at least two weight columns");
    }
    chain.k = k;
    std::vector<std::size_t> acc_cols;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c].rfind("acc_", 0) == 0) {
            chain.block_names.push_back(header[c].substr(4));
            acc_cols.push_back(c);
        }
    }
    const std::vector<std::string> expected = chain_columns(chain);
    if (expected != header) {
        throw ValidationError("chain header of '" + path.string() + "' does not match the expected column order");
    }

    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        line = strip(line);
        if (line.empty()) {
            continue;
        }
        const std::vector<std::string> f = split(line, ',');
        if (f.size() != header.size()) {
            throw ValidationError(path.string() + ":" + std::to_string(row) + ": wrong field count");
        }
        auto num = [&](const std::string& name) { return parse_double(f[col.at(name)]); };
        ChainRecord r;
        r.iteration = static_cast<std::size_t>(num("iteration"));
        r.log_posterior = num("log_posterior");
        r.standard.family = chain.family;
        for (std::size_t i = 0; i < k; ++i) {
            r.standard.weights.push_back(num(numbered("p", i)));
            r.standard.locs.push_back(num(numbered(component_stem(chain.family), i)));
            if (chain.family == Family::gaussian) {
                r.standard.scales.push_back(num(numbered("sigma", i)));
            }
        }
        if (chain.family == Family::gaussian) {
            GaussianState s;
            s.global = {num("mu"), num("sigma")};
            s.weights = r.standard.weights;
            s.angles.phi = num("phi");
            for (std::size_t i = 0; i + 2 < k; ++i) {
                s.angles.varpi.push_back(num(numbered("varpi", i)));
            }
            for (std::size_t i = 0; i + 1 < k; ++i) {
                s.angles.xi.push_back(num(numbered("xi", i)));
            }
            r.state = std::move(s);
        } else {
            RateReparam s;
            s.lambda = num("lambda");
            for (std::size_t i = 0; i < k; ++i) {
                s.gamma.push_back(num(numbered("gamma", i)));
            }
            s.weights = r.standard.weights;
            r.state = std::move(s);
        }
        for (std::size_t c : acc_cols) {
            r.accepted.push_back(static_cast<std::uint8_t>(parse_double(f[c]) != 0.0));
        }
        chain.records.push_back(std::move(r));
    }
    return chain;
}

FitConfig parse_config(const json& j) {
    check_keys(j, {"family", "k", "prior", "run", "sampler", "model"}, "config");
    FitConfig c;
    c.family = parse_family(get_or<std::string>(j, "family", "gaussian"));
    c.k = get_or<std::size_t>(j, "k", 2);
    c.sampler = get_or<std::string>(j, "sampler", "auto");
    if (c.sampler != "auto" && c.sampler != "general" && c.sampler != "k2") {
        throw ValidationError("sampler must be 'auto', 'general' or 'k2'");
    }
    if (j.contains("prior")) {
        const json& p = j.at("prior");
        check_keys(p, {"kind", "alpha0", "phi_beta", "gamma_dirichlet_alpha"}, "prior");
        c.prior.kind = parse_prior_kind(get_or<std::string>(p, "kind", "double_uniform"));
        c.prior.alpha0 = get_or<double>(p, "alpha0", 1.0);
        const auto beta = get_or<std::vector<double>>(p, "phi_beta", {1.0, 1.0});
        if (beta.size() != 2) {
            throw ValidationError("prior.phi_beta must hold two numbers");
        }
        c.prior.phi_a = beta[0];
        c.prior.phi_b = beta[1];
        c.prior.gamma_alpha = get_or<double>(p, "gamma_dirichlet_alpha", 1.0);
    }
    if (j.contains("run")) {
        const json& r = j.at("run");
        check_keys(r, {"iterations", "burnin", "chains", "seed", "batch_size", "adapt_horizon",
                       "adapt_throughout", "proposal", "lambda_proposal", "target_scalar",
                       "target_vector", "thin", "angle_independent_moves", "angle_walk_moves"},
                   "run");
        RunConfig& rc = c.run;
        rc.iterations = get_or<std::size_t>(r, "iterations", rc.iterations);
        rc.burnin = get_or<std::size_t>(r, "burnin", rc.burnin);
        rc.chains = get_or<std::size_t>(r, "chains", rc.chains);
        rc.seed = get_or<std::uint64_t>(r, "seed", rc.seed);
        rc.batch_size = get_or<std::size_t>(r, "batch_size", rc.batch_size);
        if (r.contains("adapt_horizon") && !r.at("adapt_horizon").is_null()) {
            rc.adapt_horizon = get_or<std::size_t>(r, "adapt_horizon", 0);
        }
        rc.adapt_throughout = get_or<bool>(r, "adapt_throughout", rc.adapt_throughout);
        rc.proposal = get_or<int>(r, "proposal", rc.proposal);
        const std::string lp = get_or<std::string>(r, "lambda_proposal", "independent");
        if (lp == "independent") {
            rc.lambda_proposal = LambdaProposal::independent;
        } else if (lp == "random_walk") {
            rc.lambda_proposal = LambdaProposal::random_walk;
        } else {
            throw ValidationError("lambda_proposal must be 'independent' or 'random_walk'");
        }
        rc.target_scalar = get_or<double>(r, "target_scalar", rc.target_scalar);
        rc.target_vector = get_or<double>(r, "target_vector", rc.target_vector);
        rc.thin = get_or<std::size_t>(r, "thin", rc.thin);
        rc.angle_independent_moves = get_or<bool>(r, "angle_independent_moves", rc.angle_independent_moves);
        rc.angle_walk_moves = get_or<bool>(r, "angle_walk_moves", rc.angle_walk_moves);
    }
    if (j.contains("model") && !j.at("model").is_null()) {
        const json& m = j.at("model");
        check_keys(m, {"weights", "locs", "scales"}, "model");
        StandardParams sp;
        sp.family = c.family;
        sp.weights = get_or<std::vector<double>>(m, "weights", {});
        sp.locs = get_or<std::vector<double>>(m, "locs", {});
        sp.scales = get_or<std::vector<double>>(m, "scales", {});
        c.model = sp;
    }
    return c;
}

FitConfig read_config(const std::filesystem::path& path) {
    return parse_config(read_json(path));
}

json config_to_json(const FitConfig& c) {
    json j;
    j["family"] = std::string(to_string(c.family));
    j["k"] = c.k;
    j["sampler"] = c.sampler;
    j["prior"] = {{"kind", std::string(to_string(c.prior.kind))},
                  {"alpha0", c.prior.alpha0},
                  {"phi_beta", {c.prior.phi_a, c.prior.phi_b}},
                  {"gamma_dirichlet_alpha", c.prior.gamma_alpha}};
    const RunConfig& r = c.run;
    j["run"] = {{"iterations", r.iterations},
                {"burnin", r.burnin},
                {"chains", r.chains},
                {"seed", r.seed},
                {"batch_size", r.batch_size},
                {"adapt_horizon", r.horizon()},
                {"adapt_throughout", r.adapt_throughout},
                {"proposal", r.proposal},
                {"lambda_proposal", r.lambda_proposal == LambdaProposal::independent ? "independent" : "random_walk"},
                {"target_scalar", r.target_scalar},
                {"target_vector", r.target_vector},
                {"thin", r.thin},
                {"angle_independent_moves", r.angle_independent_moves},
                {"angle_walk_moves", r.angle_walk_moves}};
    if (c.model) {
        j["model"] = {{"weights", c.model->weights}, {"locs", c.model->locs}, {"scales", c.model->scales}};
    }
    return j;
}

json to_json(const ParamSummary& s) {
    return {{"mean", s.mean}, {"median", s.median}, {"q2.5", s.q025}, {"q97.5", s.q975}};
}

json to_json(const ComponentTable& t) {
    auto rows = [](const std::vector<ParamSummary>& v) {
        json a = json::array();
        for (const ParamSummary& s : v) {
            a.push_back(to_json(s));
        }
        return a;
    };
    json j = {{"locs", rows(t.locs)}, {"weights", rows(t.weights)}};
    if (!t.scales.empty()) {
        j["scales"] = rows(t.scales);
    }
    return j;
}

json to_json(const StandardParams& p) {
    json j = {{"family", std::string(to_string(p.family))}, {"weights", p.weights}, {"locs", p.locs}};
    if (!p.scales.empty()) {
        j["scales"] = p.scales;
    }
    return j;
}

json to_json(const Summary& s) {
    json global = json::object();
    for (const auto& [name, v] : s.global) {
        global[name] = to_json(v);
    }
    return {{"family", std::string(to_string(s.family))},
            {"k", s.k},
            {"draws", s.draws},
            {"global", global},
            {"map", {{"index", s.map.index}, {"log_posterior", s.map.log_posterior}, {"params", to_json(s.map.params)}}},
            {"components", {{"map_relabel", to_json(s.map_relabelled)}, {"kmeans", to_json(s.kmeans)}}},
            {"switching",
             {{"distinct_permutations", s.switching.distinct},
              {"transitions", s.switching.transitions},
              {"longest_run", s.switching.longest_run}}}};
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out = open_out(path);
    out << j.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("invalid JSON in '" + path.string() + "': " + e.what());
    }
}

} // namespace weakmix
