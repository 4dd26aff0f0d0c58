#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "weakmix/commands.hpp"

namespace {

void add_common(CLI::App* sub, weakmix::CommandOptions& o) {
    sub->add_option("--config", o.config, "JSON config file");
    sub->add_option("--data", o.data, "data CSV (fit) or chain CSV / fit directory (summarize)");
    sub->add_option("--out", o.out, "output file or directory");
    sub->add_option("--seed", o.seed, "base random seed");
    sub->add_option("--chains", o.chains, "number of chains");
    sub->add_option("--iters", o.iters, "iterations per chain");
    sub->add_option("--burnin", o.burnin, "burn-in iterations");
    sub->add_option("--family", o.family, "gaussian, poisson or exponential");
    sub->add_option("--k", o.k, "number of components");
    sub->add_option("--proposal", o.proposal, "two-component Gaussian proposal (1 or 2)")
        ->check(CLI::IsMember({1, 2}));
    sub->add_option("--n", o.n, "observations, prior draws or Monte Carlo size");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Moment-anchored mixture samplers"};
    app.set_version_flag("--version", weakmix::version());
    app.require_subcommand(1);

    weakmix::CommandOptions opts;
    const char* names[][2] = {
        {"simulate", "simulate a dataset from the config's model"},
        {"fit", "run the adaptive samplers and write chains, manifest and summary"},
        {"prior-sample", "draw from the prior and tabulate implied mixture quantiles"},
        {"summarize", "relabel and summarise chain CSVs"},
        {"oracle-check", "run the numerical oracle suite"},
    };
    for (const auto& n : names) {
        add_common(app.add_subcommand(n[0], n[1]), opts);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : weakmix::kExitValidation;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    return weakmix::run_command(command, opts, std::cout, std::cerr);
}
