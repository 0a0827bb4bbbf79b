#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

using namespace lrsi::cli;

int main(int argc, char** argv) {
    CLI::App app{"Direct imaging of locally rough surfaces from phaseless near-field data"};
    app.require_subcommand(1);

    std::string config;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string out;
    std::string suite = "all";

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config, "JSON run configuration")->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "random seed (overrides the config)");
        sub->add_option("--threads", threads, "worker threads, 0 = all cores (overrides the config)");
        sub->add_option("--out", out, "output directory (overrides the config)");
    };
    auto* forward = app.add_subcommand("forward", "solve the forward problem and write field tables");
    auto* synth = app.add_subcommand("synth", "synthesize phaseless and/or far-field datasets");
    auto* reconstruct = app.add_subcommand("reconstruct", "evaluate an imaging indicator on a grid");
    auto* verify = app.add_subcommand("verify", "run property suites and print a JSON report");
    std::string dataset;
    for (auto* s : {forward, synth, reconstruct, verify}) common(s);
    forward->get_option("--config")->required();
    synth->get_option("--config")->required();
    reconstruct->add_option("dataset", dataset, "dataset file (.pld or .ffd)");
    verify->add_option("suite", suite, "flat, reciprocity, boundary, farfield, stationary_phase or all");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigError;
    }

    auto* sub = app.get_subcommands().front();
    return guarded(
        [&]() {
            Overrides ov;
            if (sub->count("--seed")) ov.seed = seed;
            if (sub->count("--threads")) ov.threads = threads;
            if (sub->count("--out")) ov.out = out;
            auto cfg = load_config(config, ov);
            if (sub == forward) return cmd_forward(cfg, std::cout);
            if (sub == synth) return cmd_synth(cfg, std::cout);
            if (sub == reconstruct) {
                if (!dataset.empty()) cfg["dataset"] = dataset;
                return cmd_reconstruct(cfg, std::cout);
            }
            return cmd_verify(cfg, suite, std::cout);
        },
        std::cerr);
}
