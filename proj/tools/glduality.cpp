#include "glduality/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace cli = glduality::cli;

int main(int argc, char **argv) {
    CLI::App app{"Ginzburg-Landau solver and duality certificates"};
    app.require_subcommand(1, 1);
    app.footer("Exit status: 0 success, 1 usage or configuration error, 2 solver did not converge,\n"
               "3 certificate precondition failed.");

    std::string config_path, out_dir;
    std::int64_t seed = -1;
    for (const char *name : {"solve", "certify", "sweep", "export"}) {
        CLI::App *sub = app.add_subcommand(name, std::string(name) + " as described by the config");
        sub->add_option("--config", config_path, "INI run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides run.out)");
        sub->add_option("--seed", seed, "random seed (overrides run.seed)")->check(CLI::NonNegativeNumber);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::Usage;
    }

    try {
        cli::RunConfig config = cli::load_config(config_path);
        config.command = *cli::parse_command(app.get_subcommands().front()->get_name());
        if (!out_dir.empty()) config.out = out_dir;
        if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
        return cli::run_command(config, std::cout);
    } catch (const cli::ConfigError &e) {
        std::cerr << "configuration error:\n";
        for (const auto &p : e.problems) std::cerr << "  " << p << '\n';
        return cli::Usage;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::Usage;
    }
}
