#include "radshoot/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "radshoot/errors.hpp"

namespace radshoot {

namespace {

struct RawValue {
    std::string text;
    bool quoted = false;
};

using RawSection = std::map<std::string, RawValue>;
using RawConfig = std::map<std::string, RawSection>;

const std::set<std::string> kSections = {"system", "shot", "experiment",
                                         "output"};

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(k[0])) && k[0] != '_')
        return false;
    return std::all_of(k.begin(), k.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_';
    });
}

RawValue parse_value(const std::string& raw, int line_no) {
    std::string v = trim(raw);
    if (v.empty()) throw ParseError(line_no, "missing value");
    if (v.front() != '"') return {v, false};
    std::string out;
    std::size_t i = 1;
    for (; i < v.size(); ++i) {
        char c = v[i];
        if (c == '\\') {
            if (i + 1 >= v.size())
                throw ParseError(line_no, "dangling escape in string");
            char e = v[++i];
            if (e != '"' && e != '\\')
                throw ParseError(line_no, "unsupported escape in string");
            out += e;
        } else if (c == '"') {
            break;
        } else {
            out += c;
        }
    }
    if (i >= v.size()) throw ParseError(line_no, "unterminated string");
    if (!trim(v.substr(i + 1)).empty())
        throw ParseError(line_no, "trailing text after string");
    return {out, true};
}

RawConfig parse_raw(std::istream& in) {
    RawConfig cfg;
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ParseError(line_no, "malformed section header");
            std::string name = trim(t.substr(1, t.size() - 2));
            if (!valid_key(name))
                throw ParseError(line_no, "malformed section name");
            if (!kSections.count(name))
                throw ValidationError(name, "unknown section");
            section = name;
            cfg[section];  // a section may legitimately stay empty
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ParseError(line_no, "expected key = value");
        if (section.empty())
            throw ParseError(line_no, "key outside any section");
        std::string key = trim(t.substr(0, eq));
        if (!valid_key(key)) throw ParseError(line_no, "malformed key");
        if (cfg[section].count(key))
            throw ValidationError(section + "." + key, "duplicate key");
        cfg[section][key] = parse_value(t.substr(eq + 1), line_no);
    }
    return cfg;
}

void apply_overrides(RawConfig& cfg, const std::vector<std::string>& overrides) {
    for (const auto& ov : overrides) {
        auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw ValidationError(ov, "override must look like section.key=value");
        std::string path = trim(ov.substr(0, eq));
        auto dot = path.find('.');
        if (dot == std::string::npos)
            throw ValidationError(path, "override key needs a section prefix");
        std::string section = path.substr(0, dot);
        std::string key = path.substr(dot + 1);
        if (!kSections.count(section))
            throw ValidationError(section, "unknown section");
        if (!valid_key(key)) throw ValidationError(path, "malformed key");
        cfg[section][key] = parse_value(ov.substr(eq + 1), 0);
    }
}

double to_number(const std::string& path, const RawValue& v) {
    const std::string& s = v.text;
    double out = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw ValidationError(path, "expected a number, got '" + s + "'");
    return out;
}

long long to_integer(const std::string& path, const RawValue& v) {
    double d = to_number(path, v);
    if (std::nearbyint(d) != d || std::fabs(d) > 9e15)
        throw ValidationError(path, "expected an integer, got '" + v.text + "'");
    return static_cast<long long>(d);
}

std::vector<double> to_list(const std::string& path, const RawValue& v) {
    std::vector<double> out;
    std::stringstream ss(v.text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw ValidationError(path, "empty entry in number list");
        out.push_back(to_number(path, RawValue{item, false}));
    }
    if (out.empty()) throw ValidationError(path, "empty number list");
    return out;
}

// pull a key out of the section, so leftovers can be flagged as unknown
template <typename T, typename Fn>
void take(RawSection& sec, const std::string& section, const std::string& key,
          T& slot, Fn convert) {
    auto it = sec.find(key);
    if (it == sec.end()) return;
    slot = convert(section + "." + key, it->second);
    sec.erase(it);
}

void reject_leftovers(const RawSection& sec, const std::string& section) {
    if (!sec.empty())
        throw ValidationError(section + "." + sec.begin()->first, "unknown key");
}

SystemSection build_system_section(RawSection sec) {
    SystemSection out;
    auto name_it = sec.find("name");
    if (name_it == sec.end())
        throw ValidationError("system.name", "required key missing");
    out.name = name_it->second.text;
    if (out.name.empty()) throw ValidationError("system.name", "empty name");
    sec.erase(name_it);

    const bool custom = out.name == "custom";
    long long declared_L = 0;
    if (auto it = sec.find("L"); it != sec.end()) {
        declared_L = to_integer("system.L", it->second);
        sec.erase(it);
        if (!custom)
            throw ValidationError("system.L", "only custom systems take L");
    }
    if (auto it = sec.find("potential_kind"); it != sec.end()) {
        out.potential_kind = it->second.text;
        sec.erase(it);
        if (out.potential_kind != "type1" && out.potential_kind != "type2")
            throw ValidationError("system.potential_kind",
                                  "expected type1 or type2");
    }
    if (auto it = sec.find("potential"); it != sec.end()) {
        if (!it->second.quoted)
            throw ValidationError("system.potential",
                                  "expression must be double-quoted");
        out.potential_text = it->second.text;
        sec.erase(it);
    }

    // collect f1, f2, ... contiguously
    for (int i = 1;; ++i) {
        std::string key = "f" + std::to_string(i);
        auto it = sec.find(key);
        if (it == sec.end()) break;
        if (!it->second.quoted)
            throw ValidationError("system." + key,
                                  "expression must be double-quoted");
        out.f_texts.push_back(it->second.text);
        sec.erase(it);
    }

    if (custom) {
        if (out.f_texts.empty())
            throw ValidationError("system.f1",
                                  "custom systems need f1, f2, ... expressions");
        if (declared_L && declared_L != static_cast<long long>(out.f_texts.size()))
            throw ValidationError("system.L",
                                  "L disagrees with the number of expressions");
        if (!out.potential_text.empty() && out.potential_kind.empty())
            throw ValidationError("system.potential_kind",
                                  "a potential needs potential_kind");
        if (out.potential_text.empty() && !out.potential_kind.empty())
            throw ValidationError("system.potential",
                                  "potential_kind without a potential");
    } else {
        if (!out.f_texts.empty())
            throw ValidationError("system.f1",
                                  "only custom systems take expressions");
        if (!out.potential_text.empty() || !out.potential_kind.empty())
            throw ValidationError("system.potential",
                                  "only custom systems take a potential");
    }

    // every remaining key is a numeric parameter
    for (auto& [key, value] : sec)
        out.params[key] = to_number("system." + key, value);
    return out;
}

ShotConfig build_shot_section(RawSection sec) {
    ShotConfig out;
    auto num = [](const std::string& p, const RawValue& v) {
        return to_number(p, v);
    };
    take(sec, "shot", "eps_start", out.eps_start, num);
    take(sec, "shot", "r_max", out.r_max, num);
    take(sec, "shot", "rel_tol", out.rel_tol, num);
    take(sec, "shot", "abs_tol", out.abs_tol, num);
    take(sec, "shot", "wall_tol", out.wall_tol, num);
    take(sec, "shot", "max_steps", out.max_steps,
         [](const std::string& p, const RawValue& v) {
             return static_cast<long>(to_integer(p, v));
         });
    reject_leftovers(sec, "shot");
    if (out.eps_start <= 0) throw ValidationError("shot.eps_start", "must be positive");
    if (out.r_max <= 0) throw ValidationError("shot.r_max", "must be positive");
    if (out.rel_tol <= 0) throw ValidationError("shot.rel_tol", "must be positive");
    if (out.abs_tol <= 0) throw ValidationError("shot.abs_tol", "must be positive");
    if (out.wall_tol <= 0) throw ValidationError("shot.wall_tol", "must be positive");
    if (out.max_steps < 1) throw ValidationError("shot.max_steps", "must be positive");
    return out;
}

ExperimentSection build_experiment_section(RawSection sec) {
    ExperimentSection out;
    auto num = [](const std::string& p, const RawValue& v) {
        return to_number(p, v);
    };
    auto integer = [](const std::string& p, const RawValue& v) {
        return to_integer(p, v);
    };
    auto list = [](const std::string& p, const RawValue& v) {
        return to_list(p, v);
    };
    long long k = out.k, budget = out.budget, samples = out.samples;
    take(sec, "experiment", "a", out.a, num);
    take(sec, "experiment", "alpha", out.alpha, list);
    take(sec, "experiment", "k", k, integer);
    take(sec, "experiment", "delta", out.deltas, list);
    take(sec, "experiment", "R", out.radii, list);
    take(sec, "experiment", "budget", budget, integer);
    take(sec, "experiment", "target", out.target, list);
    take(sec, "experiment", "samples", samples, integer);
    take(sec, "experiment", "box_max", out.box_max, num);
    take(sec, "experiment", "a_lo", out.a_lo, num);
    take(sec, "experiment", "a_hi", out.a_hi, num);
    reject_leftovers(sec, "experiment");

    if (!(out.a > 0)) throw ValidationError("experiment.a", "must be positive");
    if (k < 1) throw ValidationError("experiment.k", "must be at least 1");
    if (budget < 1) throw ValidationError("experiment.budget", "must be positive");
    if (samples < 1) throw ValidationError("experiment.samples", "must be positive");
    if (!(out.box_max > 0))
        throw ValidationError("experiment.box_max", "must be positive");
    if (!(out.a_lo > 0)) throw ValidationError("experiment.a_lo", "must be positive");
    if (!(out.a_hi >= out.a_lo))
        throw ValidationError("experiment.a_hi", "must be at least a_lo");
    for (double d : out.deltas)
        if (!(d > 0)) throw ValidationError("experiment.delta", "must be positive");
    for (double r : out.radii)
        if (!(r > 0)) throw ValidationError("experiment.R", "must be positive");
    for (double x : out.alpha)
        if (x < 0)
            throw ValidationError("experiment.alpha", "must be nonnegative");
    out.k = static_cast<int>(k);
    out.budget = static_cast<long>(budget);
    out.samples = static_cast<long>(samples);
    return out;
}

OutputSection build_output_section(RawSection sec) {
    OutputSection out;
    long long seed = 0, threads = 0, points = out.points;
    take(sec, "output", "dir", out.dir,
         [](const std::string&, const RawValue& v) { return v.text; });
    take(sec, "output", "format", out.format,
         [](const std::string&, const RawValue& v) { return v.text; });
    take(sec, "output", "seed", seed,
         [](const std::string& p, const RawValue& v) { return to_integer(p, v); });
    take(sec, "output", "threads", threads,
         [](const std::string& p, const RawValue& v) { return to_integer(p, v); });
    take(sec, "output", "points", points,
         [](const std::string& p, const RawValue& v) { return to_integer(p, v); });
    reject_leftovers(sec, "output");
    if (out.format != "csv" && out.format != "json" && out.format != "both")
        throw ValidationError("output.format", "expected csv, json, or both");
    if (out.dir.empty()) throw ValidationError("output.dir", "empty directory");
    if (seed < 0) throw ValidationError("output.seed", "must be nonnegative");
    if (threads < 0) throw ValidationError("output.threads", "must be nonnegative");
    if (points < 2) throw ValidationError("output.points", "need at least 2");
    out.seed = static_cast<std::uint64_t>(seed);
    out.threads = static_cast<int>(threads);
    out.points = static_cast<int>(points);
    return out;
}

}  // namespace

RunConfig parse_config(std::istream& in,
                       const std::vector<std::string>& overrides) {
    RawConfig raw = parse_raw(in);
    apply_overrides(raw, overrides);

    RunConfig out;
    if (!raw.count("system"))
        throw ValidationError("system", "required section missing");
    out.system = build_system_section(std::move(raw["system"]));
    if (raw.count("shot")) out.shot = build_shot_section(std::move(raw["shot"]));
    if (raw.count("experiment"))
        out.experiment = build_experiment_section(std::move(raw["experiment"]));
    if (raw.count("output"))
        out.output = build_output_section(std::move(raw["output"]));
    return out;
}

RunConfig load_config(const std::string& path,
                      const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open config file: " + path);
    return parse_config(in, overrides);
}

SystemSpec build_system(const SystemSection& sec) {
    if (sec.name != "custom") return builtin(sec.name, sec.params);

    int n = 3;
    auto params = sec.params;
    if (auto it = params.find("n"); it != params.end()) {
        double v = it->second;
        if (std::nearbyint(v) != v || v < 3)
            throw ValidationError("system.n", "must be an integer >= 3");
        n = static_cast<int>(v);
        params.erase(it);
    }
    PotentialKind kind = PotentialKind::None;
    if (sec.potential_kind == "type1") kind = PotentialKind::TypeI;
    if (sec.potential_kind == "type2") kind = PotentialKind::TypeII;
    return make_custom_system("custom", static_cast<int>(sec.f_texts.size()), n,
                              params, sec.f_texts, sec.potential_text, kind);
}

}  // namespace radshoot
