#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "weakmix/commands.hpp"
#include "weakmix/errors.hpp"
#include "weakmix/likelihood.hpp"
#include "weakmix/oracle.hpp"
#include "weakmix/postprocess.hpp"
#include "weakmix/priors.hpp"
#include "weakmix/sampler.hpp"
#include "weakmix/transforms.hpp"

namespace py = pybind11;
using namespace weakmix;

namespace {

StandardParams make_params(const std::string& family, std::vector<double> weights, std::vector<double> locs,
                           std::vector<double> scales) {
    StandardParams p{parse_family(family), std::move(weights), std::move(locs), std::move(scales)};
    p.validate();
    return p;
}

PriorSpec make_prior(const std::string& kind, double alpha0, double phi_a, double phi_b, double gamma_alpha) {
    PriorSpec s{parse_prior_kind(kind), alpha0, phi_a, phi_b, gamma_alpha};
    s.validate();
    return s;
}

py::dict chain_to_dict(const ChainResult& c) {
    std::vector<double> lp;
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> locs;
    std::vector<std::vector<double>> scales;
    for (const ChainRecord& r : c.records) {
        lp.push_back(r.log_posterior);
        weights.push_back(r.standard.weights);
        locs.push_back(r.standard.locs);
        scales.push_back(r.standard.scales);
    }
    py::dict rates;
    for (const ScaleBlock& b : c.bank.blocks) {
        rates[py::str(b.name)] = b.post_acceptance_rate();
    }
    py::dict d;
    d["log_posterior"] = lp;
    d["weights"] = weights;
    d["locs"] = locs;
    d["scales"] = scales;
    d["acceptance"] = rates;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Moment-anchored reparameterisation of Gaussian, Poisson and exponential mixtures";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    m.def("version", &version);

    m.def(
        "mixture_moments",
        [](const std::string& family, std::vector<double> w, std::vector<double> l, std::vector<double> s) {
            const MixtureMoments mm = mixture_moments(make_params(family, w, l, s));
            return py::make_tuple(mm.mean, mm.variance);
        },
        py::arg("family"), py::arg("weights"), py::arg("locs"), py::arg("scales") = std::vector<double>{});

    m.def(
        "to_angular",
        [](std::vector<double> w, std::vector<double> l, std::vector<double> s) {
            const auto [g, a] = angular_from_standard(make_params("gaussian", w, l, s));
            py::dict d;
            d["mu"] = g.mu;
            d["sigma"] = g.sigma;
            d["phi"] = a.phi;
            d["varpi"] = a.varpi;
            d["xi"] = a.xi;
            return d;
        },
        py::arg("weights"), py::arg("locs"), py::arg("scales"));

    m.def(
        "from_angular",
        [](double mu, double sigma, std::vector<double> w, double phi, std::vector<double> varpi,
           std::vector<double> xi) {
            const StandardParams p = standard_from_angular({mu, sigma}, w, {phi, varpi, xi});
            return py::make_tuple(p.weights, p.locs, p.scales);
        },
        py::arg("mu"), py::arg("sigma"), py::arg("weights"), py::arg("phi"), py::arg("varpi"), py::arg("xi"));

    m.def(
        "build_basis", [](std::vector<double> w) { return build_basis(w).vectors; }, py::arg("weights"));

    m.def(
        "loglik",
        [](const std::string& family, std::vector<double> x, std::vector<double> w, std::vector<double> l,
           std::vector<double> s) { return loglik_standard(Dataset{std::move(x)}, make_params(family, w, l, s)); },
        py::arg("family"), py::arg("data"), py::arg("weights"), py::arg("locs"),
        py::arg("scales") = std::vector<double>{});

    m.def(
        "sample_prior",
        [](std::size_t k, std::size_t n, std::uint64_t seed, const std::string& kind) {
            const std::vector<PriorDraw> draws =
                sample_prior(make_prior(kind, 1.0, 1.0, 1.0, 1.0), k, Family::gaussian, n, seed);
            py::list out;
            for (const PriorDraw& d : draws) {
                const StandardParams p = compose_standard({0.0, 1.0}, d.weights, d.angles);
                out.append(py::make_tuple(p.weights, p.locs, p.scales));
            }
            return out;
        },
        py::arg("k"), py::arg("n"), py::arg("seed") = 1, py::arg("kind") = "double_uniform");

    m.def(
        "fit",
        [](const std::string& family, std::vector<double> x, std::size_t k, std::size_t iterations,
           std::size_t burnin, std::size_t chains, std::uint64_t seed, int proposal) {
            RunConfig cfg;
            cfg.iterations = iterations;
            cfg.burnin = burnin;
            cfg.chains = chains;
            cfg.seed = seed;
            cfg.proposal = proposal;
            const Dataset data{std::move(x)};
            const Family f = parse_family(family);
            std::vector<ChainResult> res;
            {
                py::gil_scoped_release release;
                if (f == Family::gaussian) {
                    res = k == 2 ? mwg_gaussian_k2(data, PriorSpec{}, cfg) : mwg_gaussian(data, k, PriorSpec{}, cfg);
                } else if (f == Family::poisson) {
                    res = mwg_poisson(data, k, PriorSpec{}, cfg);
                } else {
                    res = mwg_exponential(data, k, PriorSpec{}, cfg);
                }
            }
            py::list out;
            for (const ChainResult& c : res) {
                out.append(chain_to_dict(c));
            }
            return out;
        },
        py::arg("family"), py::arg("data"), py::arg("k"), py::arg("iterations") = 10000, py::arg("burnin") = 1000,
        py::arg("chains") = 1, py::arg("seed") = 1, py::arg("proposal") = 1);

    m.def("gelman_rubin", py::overload_cast<const std::vector<std::vector<double>>&>(&gelman_rubin),
          py::arg("chains"));

    m.def(
        "pair_closed",
        [](double pi, double pj, double ai, double aj, double ti, double tj, double x1, double x2) {
            return gaussian_pair_closed({pi, pj, ai, aj, ti, tj, x1, x2});
        },
        py::arg("p_i"), py::arg("p_j"), py::arg("alpha_i"), py::arg("alpha_j"), py::arg("tau_i"), py::arg("tau_j"),
        py::arg("x1"), py::arg("x2"));

    m.def(
        "pair_quad",
        [](double pi, double pj, double ai, double aj, double ti, double tj, double x1, double x2) {
            const QuadratureResult q = gaussian_pair_quad({pi, pj, ai, aj, ti, tj, x1, x2});
            return py::make_tuple(q.value, q.truncation_error);
        },
        py::arg("p_i"), py::arg("p_j"), py::arg("alpha_i"), py::arg("alpha_j"), py::arg("tau_i"), py::arg("tau_j"),
        py::arg("x1"), py::arg("x2"));

    m.def(
        "marginal_one_obs",
        [](const std::string& family, std::size_t k, double x1, std::size_t n_mc, std::uint64_t seed) {
            const MonteCarloEstimate e = marginal_one_obs_mc(parse_family(family), k, x1, PriorSpec{}, n_mc, seed);
            return py::make_tuple(e.estimate, e.std_error, e.rounding_error);
        },
        py::arg("family"), py::arg("k"), py::arg("x1"), py::arg("n_mc") = 100000, py::arg("seed") = 1);

    m.def("n1_divergence_probe", &n1_divergence_probe, py::arg("L"));
}
