#include "asymptolab/experiment.hpp"

#include "CLI11.hpp"

#include <iostream>

using namespace asymptolab;

int main(int argc, char** argv) {
    CLI::App app{"asymptolab: inner/outer solutions of a two-time singularly perturbed problem"};
    app.require_subcommand(1);
    std::string configPath;
    RunOptions ro;
    std::uint64_t seed = 0;
    std::string which;

    auto common = [&](CLI::App* sc) {
        sc->add_option("--config", configPath, "experiment config (JSON)")->required();
        sc->add_option("--out", ro.outDir, "output directory (ASYMPTOLAB_OUT overrides)");
        sc->add_option("--jobs", ro.jobs, "worker threads")->check(CLI::PositiveNumber);
        sc->add_option("--seed", seed, "seed for sampled certification");
        sc->add_flag("--no-solve", ro.noSolve, "read omega from a previous solve");
    };
    auto* val = app.add_subcommand("validate", "hypothesis and covering checks");
    auto* sol = app.add_subcommand("solve", "Borel-plane fixed point per sector and eps");
    auto* inn = app.add_subcommand("inner", "inner solution samples");
    auto* out = app.add_subcommand("outer", "outer solution samples");
    auto* fla = app.add_subcommand("flatness", "consecutive differences and order fits");
    auto* dem = app.add_subcommand("demos", "small divisors, kernel envelopes, special functions");
    for (auto* sc : {val, sol, inn, out, fla, dem}) common(sc);
    fla->add_option("which", which, "inner or outer")->required()->check(CLI::IsMember({"inner", "outer"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    for (auto* sc : {val, sol, inn, out, fla, dem})
        if (sc->parsed() && sc->count("--seed")) ro.seed = seed;

    ExperimentConfig cfg;
    try {
        cfg = load_config(configPath);
    } catch (const ConfigError& e) {
        std::cerr << "config: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "config: " << e.what() << '\n';
        return 2;
    }

    try {
        if (val->parsed()) return cmd_validate(cfg, ro);
        if (sol->parsed()) return cmd_solve(cfg, ro);
        if (inn->parsed()) return cmd_samples(cfg, SolutionKind::inner, ro);
        if (out->parsed()) return cmd_samples(cfg, SolutionKind::outer, ro);
        if (fla->parsed()) return cmd_flatness(cfg, which == "inner" ? SolutionKind::inner : SolutionKind::outer, ro);
        if (dem->parsed()) return cmd_demos(cfg, ro);
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
