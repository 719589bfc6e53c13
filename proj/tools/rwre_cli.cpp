#include "rwre/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Random walk in random environment: simulation and reconstruction from corrupted observations"};
    app.require_subcommand(1);

    rwre::cli::Options opt;
    bool no_timing = false;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "experiment config (JSON)")->required();
        sub->add_option("--out", opt.out, "output directory (default: output.dir of the config)");
        sub->add_flag("--eval", opt.eval, "keep ground truth and score the result against it");
    };
    auto* simulate = app.add_subcommand("simulate", "simulate the walk and write the corrupted stream");
    add_common(simulate);
    auto* law = app.add_subcommand("reconstruct-law", "estimate the environment law from a stream");
    add_common(law);
    law->add_option("--chi", opt.chi, "stream CSV (default: <out>/chi.csv)");
    auto* env = app.add_subcommand("reconstruct-env", "reconstruct the environment up to translation");
    add_common(env);
    env->add_option("--chi", opt.chi, "stream CSV (default: <out>/chi.csv)");
    auto* sw = app.add_subcommand("sweep", "run a grid of replicas and write one CSV row per replica");
    add_common(sw);
    sw->add_option("--grid", opt.grid, "\"n1,n2,...xS\": walk lengths times S seeds")->required();
    sw->add_flag("--no-timing", no_timing, "write wall_ms as 0 for byte-identical reruns");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : rwre::cli::ValidationFailure;
    }
    opt.timing = !no_timing;
    return rwre::cli::run(app.get_subcommands().front()->get_name(), opt, std::cout, std::cerr);
}
