#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "annulus/commands.hpp"

/*
 * annulus-neumann constants|check|solve|nonexist|example
 *     [--config FILE] [--out DIR] [--strict] [--threads K]
 *
 * exit codes: 0 ok, 2 config/parse error, 3 solve-count shortfall,
 * 4 hypothesis FAIL with --strict, 1 unexpected failure.
 */
int main(int argc, char** argv)
{
    CLI::App app{"non-negative radial solutions of gradient-dependent Neumann "
                 "elliptic systems on annuli"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    bool strict = false;
    int threads = 0;

    auto* c_constants = app.add_subcommand("constants", "kernel and geometry constants");
    c_constants->add_option("--config", config_path, "problem config (TOML subset)")
        ->required();
    c_constants->add_option("--out", out_dir, "output directory for constants.json");

    auto* c_check = app.add_subcommand("check", "sample the theorem hypotheses");
    c_check->add_option("--config", config_path)->required();
    c_check->add_option("--out", out_dir, "output directory for check.json");
    c_check->add_flag("--strict", strict, "exit 4 when a hypothesis fails");

    auto* c_solve = app.add_subcommand("solve", "multistart solve and classify");
    c_solve->add_option("--config", config_path)->required();
    c_solve->add_option("--out", out_dir, "output directory")->required();
    c_solve->add_option("--threads", threads, "worker thread cap (0 = all cores)");

    auto* c_nonexist = app.add_subcommand("nonexist", "non-existence sign check and sweep");
    c_nonexist->add_option("--config", config_path)->required();
    c_nonexist->add_option("--out", out_dir, "output directory for nonexist.json");
    c_nonexist->add_option("--threads", threads);

    auto* c_example = app.add_subcommand("example", "run the built-in worked example");
    c_example->add_option("--out", out_dir, "output directory")->required();
    c_example->add_option("--threads", threads);

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_constants->parsed())
            return annulus::cmd_constants(annulus::ProblemConfig::load(config_path), out_dir,
                                          std::cout);
        if (c_check->parsed())
            return annulus::cmd_check(annulus::ProblemConfig::load(config_path), out_dir,
                                      strict, std::cout);
        if (c_solve->parsed())
            return annulus::cmd_solve(annulus::ProblemConfig::load(config_path), out_dir,
                                      threads, std::cout);
        if (c_nonexist->parsed())
            return annulus::cmd_nonexist(annulus::ProblemConfig::load(config_path), out_dir,
                                         threads, std::cout);
        if (c_example->parsed())
            return annulus::cmd_example(out_dir, threads, std::cout);
    } catch (const annulus::ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const annulus::ParseError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const annulus::LadderError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
