#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "radshoot/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"radial shooting, wall-image degree, and ball-identity toolkit"};
    app.require_subcommand(1);

    radshoot::CliOptions opts;

    const std::pair<const char*, const char*> commands[] = {
        {"shoot", "integrate one trajectory from an initial point"},
        {"sweep", "evaluate the wall image over a simplex grid"},
        {"degree", "Brouwer degree of the wall-image map"},
        {"find", "search the level set for a no-return initial value"},
        {"dirichlet", "shoot for a ball solution vanishing at radius R"},
        {"pohozaev", "identity residuals and the nonexistence certificate"},
        {"check", "structural assumption checks for the nonlinearity"},
    };
    for (const auto& [name, blurb] : commands) {
        auto* sub = app.add_subcommand(name, blurb);
        sub->add_option("--config", opts.config_path, "config file path")
            ->required();
        sub->add_option("--set", opts.overrides,
                        "override, section.key=value (repeatable)");
        sub->add_option_function<std::string>(
            "--out", [&](const std::string& v) { opts.out_dir = v; },
            "output directory (overrides output.dir)");
        sub->add_option_function<long long>(
            "--seed", [&](long long v) { opts.seed = v; },
            "sampling seed (overrides output.seed)");
        sub->add_option_function<int>(
            "--threads", [&](int v) { opts.threads = v; },
            "worker threads (overrides output.threads)");
        sub->add_option_function<std::string>(
                "--format", [&](const std::string& v) { opts.format = v; },
                "csv | json | both (overrides output.format)")
            ->check(CLI::IsMember({"csv", "json", "both"}));
        sub->callback([&opts, name = std::string(name)] {
            opts.subcommand = name;
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    return radshoot::run(opts, std::cout, std::cerr);
}
