#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "poincare/common.hpp"
#include "poincare/config.hpp"
#include "poincare/runner.hpp"

namespace {

constexpr int kExitConfig = 2;

int run(int argc, char** argv) {
    CLI::App app{
        "Monte Carlo toolkit for multivariate normal approximation of Poisson functionals"};
    app.require_subcommand(0, 1);

    std::string config_path;
    std::string out_override;
    std::uint64_t seed_override = 0;
    int workers_override = 1;
    auto* config_opt =
        app.add_option("--config", config_path, "experiment config file (key-tree text)");
    auto* seed_opt = app.add_option("--seed", seed_override, "override the config root seed");
    auto* out_opt = app.add_option("--out", out_override, "override the output directory");
    auto* workers_opt = app.add_option(
        "--workers", workers_override,
        "worker count; every value produces the canonical byte-exact output of workers=1");

    // Subcommands restrict the run to one pipeline stage; without one the
    // config's own run flags decide what executes.
    CLI::App* sub_simulate =
        app.add_subcommand("simulate", "sample the model and write sample/realization files");
    CLI::App* sub_gammas = app.add_subcommand("gammas", "estimate the bound ingredients only");
    CLI::App* sub_bounds =
        app.add_subcommand("bounds", "estimate ingredients and assemble every bound display");
    CLI::App* sub_distances =
        app.add_subcommand("distances", "estimate the empirical distances with witnesses");
    CLI::App* sub_stein =
        app.add_subcommand("stein-checks", "run the interpolant and smoothing check suite");
    CLI::App* sub_rates = app.add_subcommand(
        "rates", "full bound + distance pipeline with rate-slope fits across scales");
    CLI::App* sub_replay =
        app.add_subcommand("replay", "re-evaluate a stored witness on a stored samples file");
    std::string witness_path, samples_path;
    sub_replay->add_option("--witness", witness_path, "witness file from a distance run")
        ->required();
    sub_replay->add_option("--samples", samples_path, "samples file (stored or fresh)")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitConfig;
    }

    if (sub_replay->parsed()) return poincare::replay_witness_files(witness_path, samples_path,
                                                                    std::cout);

    if (config_opt->count() == 0)
        throw poincare::config_error("a --config file is required for this command");
    poincare::ExperimentConfig cfg = poincare::load_experiment_config(config_path);
    if (seed_opt->count() > 0) cfg.root_seed = seed_override;
    if (out_opt->count() > 0) cfg.out_dir = out_override;
    if (workers_opt->count() > 0) cfg.workers = workers_override;
    cfg.validate();

    std::string stage;
    if (sub_simulate->parsed()) stage = "simulate";
    if (sub_gammas->parsed()) stage = "gammas";
    if (sub_bounds->parsed()) stage = "bounds";
    if (sub_distances->parsed()) stage = "distances";
    if (sub_stein->parsed()) stage = "stein";
    if (sub_rates->parsed()) stage = "rates";
    return poincare::run_experiment(cfg, stage, &std::cout);
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const poincare::config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
