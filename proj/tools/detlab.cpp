/*
 * Copyright (c) 2026 detlab contributors
 * SPDX-License-Identifier: Apache-2.0
 */

// Link-level MIMO detection experiments from a key-value config file:
//   detlab <ber|per|learn|gap> --config <file> [--out <path>] [--seed N] [--workers N]

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "detlab/detlab.hpp"

namespace {

struct CliArgs {
    std::string config_path;
    std::string out_path;
    std::int64_t seed = -1;
    int workers = -1;
};

void add_common(CLI::App* cmd, CliArgs& args) {
    cmd->add_option("--config", args.config_path, "experiment config file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out_path, "output path (overrides the config 'out' key)");
    cmd->add_option("--seed", args.seed, "seed override");
    cmd->add_option("--workers", args.workers, "worker thread count override (0 = auto)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"detlab: uncoded MIMO detection link simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(detlab::version));

    CliArgs args;
    const char* names[] = {"ber", "per", "learn", "gap"};
    const char* descs[] = {"fast-fading BER sweep", "quasi-static packet error rate sweep",
                           "adaptive-detector BER learning curve", "dB gap between two BER curves"};
    for (int i = 0; i < 4; ++i)
        add_common(app.add_subcommand(names[i], descs[i]), args);

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        detlab::RunConfig cfg = detlab::parse_config(detlab::detail::read_file(args.config_path));
        if (detlab::to_string(cfg.command) != command)
            throw detlab::ValidationError("config 'command' is '" +
                                          detlab::to_string(cfg.command) +
                                          "' but the subcommand is '" + command + "'");
        if (!args.out_path.empty())
            cfg.output_path = args.out_path;
        if (args.seed >= 0) {
            cfg.sweep.seed = static_cast<std::uint64_t>(args.seed);
            cfg.learn.seed = cfg.sweep.seed;
        }
        if (args.workers >= 0) {
            cfg.sweep.workers = args.workers;
            cfg.learn.workers = args.workers;
        }
        return detlab::run(cfg);
    } catch (const detlab::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
