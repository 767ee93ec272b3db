#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace radshoot {

struct CliOptions {
    std::string subcommand;
    std::string config_path;
    std::vector<std::string> overrides;    // --set section.key=value
    std::optional<std::string> out_dir;    // --out
    std::optional<long long> seed;         // --seed
    std::optional<int> threads;            // --threads
    std::optional<std::string> format;     // --format csv|json|both
};

// Executes one subcommand against the config, writing artifacts into the
// output directory and structured diagnostics to err. Exit codes: 0 success,
// 2 configuration error, 3 numerical failure, 4 failed check.
int run(const CliOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace radshoot
