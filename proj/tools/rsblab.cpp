#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"

#include "rsb/cli/config.hpp"
#include "rsb/cli/runner.hpp"
#include "rsb/core/error.hpp"

int main(int argc, char** argv) {
    CLI::App app{"rsblab: transverse+longitudinal random-field Ising laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int workers = 0;
    bool seed_set = false, out_set = false, workers_set = false;

    const std::vector<std::string> commands = {"ed-check", "trotter-scan", "mc-run",
                                               "fkg-check", "bound-check", "gg-check", "scan"};
    for (const auto& name : commands) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "key=value configuration file")->required();
        sub->add_option("--seed", seed, "override ensemble.master_seed")
            ->each([&](const std::string&) { seed_set = true; });
        sub->add_option("--out", out_dir, "override output directory")
            ->each([&](const std::string&) { out_set = true; });
        sub->add_option("--workers", workers, "override worker count")
            ->each([&](const std::string&) { workers_set = true; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        rsb::cli::RunConfig cfg = rsb::cli::parse_config_file(config_path);
        rsb::cli::Overrides ov;
        ov.command = app.get_subcommands().front()->get_name();
        if (seed_set) ov.seed = seed;
        if (out_set) ov.out_dir = out_dir;
        if (workers_set) ov.workers = workers;
        rsb::cli::apply_overrides(cfg, ov);
        return rsb::cli::run(cfg);
    } catch (const rsb::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const rsb::CapExceeded& e) {
        std::fprintf(stderr, "resource cap: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
