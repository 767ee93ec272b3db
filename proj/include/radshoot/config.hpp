#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "radshoot/integrator.hpp"
#include "radshoot/system.hpp"

namespace radshoot {

// [system] — a builtin name plus parameters, or name = custom with quoted
// component expressions f1..fL (and optionally a potential).
struct SystemSection {
    std::string name;
    std::vector<std::string> f_texts;     // custom systems only
    std::string potential_text;           // optional, custom systems
    std::string potential_kind;           // "", "type1", "type2"
    std::map<std::string, double> params; // includes n when given
};

// [experiment] — knobs consumed by the subcommands that need them.
struct ExperimentSection {
    double a = 1.0;                  // simplex mass
    std::vector<double> alpha;       // shoot: initial heights
    int k = 16;                      // sweep/degree grid resolution
    std::vector<double> deltas{1e-2, 1e-3};  // estimate sweeps
    std::vector<double> radii{1.0};  // dirichlet/pohozaev ball radii
    long budget = 1000;              // search budgets
    std::vector<double> target;      // degree: target point (default center)
    long samples = 10000;            // check: sample count
    double box_max = 10.0;           // check: sampling box edge
    double a_lo = 0.1;               // dirichlet: level search range
    double a_hi = 100.0;
};

// [output]
struct OutputSection {
    std::string dir = ".";
    std::string format = "both";     // csv | json | both
    std::uint64_t seed = 0;
    int threads = 0;                 // 0 = leave the runtime default
    int points = 401;                // trajectory CSV sample count
};

struct RunConfig {
    SystemSection system;
    ShotConfig shot;
    ExperimentSection experiment;
    OutputSection output;
};

// Sectioned key = value text. Sections: [system], [shot], [experiment],
// [output]. Values: numbers, comma-separated number lists, bare words, or
// double-quoted strings (required for expressions). '#' starts a full-line
// comment. Unknown sections/keys and duplicate keys are rejected; overrides
// ("section.key=value") are applied before validation.
RunConfig load_config(const std::string& path,
                      const std::vector<std::string>& overrides = {});
RunConfig parse_config(std::istream& in,
                       const std::vector<std::string>& overrides = {});

// Instantiate the [system] section (builtin lookup or expression parsing).
SystemSpec build_system(const SystemSection& sec);

}  // namespace radshoot
