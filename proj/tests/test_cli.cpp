#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "schema_check.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* cli_path() {
    const char* p = std::getenv("RADSHOOT_CLI");
    REQUIRE_MESSAGE(p != nullptr, "RADSHOOT_CLI must point at the binary");
    return p;
}

fs::path schema_dir() {
    const char* p = std::getenv("RADSHOOT_SCHEMAS");
    REQUIRE_MESSAGE(p != nullptr, "RADSHOOT_SCHEMAS must point at schemas/");
    return fs::path(p);
}

ordered_json load_schema(const std::string& name) {
    auto text = slurp(schema_dir() / (name + ".schema.json"));
    REQUIRE(!text.empty());
    return ordered_json::parse(text);
}

void check_against(const std::string& schema_name, const ordered_json& value) {
    auto errors = schema_check::validate(load_schema(schema_name), value);
    CHECK_MESSAGE(errors.empty(), schema_check::join_errors(errors));
}

// scratch space per test case; recreated to keep runs independent
fs::path fresh_dir(const std::string& tag) {
    auto dir = fs::temp_directory_path() / ("radshoot_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    auto path = dir / "run.ini";
    std::ofstream out(path);
    out << text;
    return path;
}

RunResult run_cli(const fs::path& dir, const std::string& args) {
    auto out_file = dir / "stdout.txt";
    auto err_file = dir / "stderr.txt";
    std::string cmd = std::string(cli_path()) + " " + args + " > " +
                      out_file.string() + " 2> " + err_file.string();
    int raw = std::system(cmd.c_str());
    RunResult res;
    res.code = raw == -1 ? -1 : WEXITSTATUS(raw);
    res.out = slurp(out_file);
    res.err = slurp(err_file);
    return res;
}

ordered_json read_json(const fs::path& p) {
    auto text = slurp(p);
    REQUIRE_MESSAGE(!text.empty(), ("missing artifact " + p.string()));
    return ordered_json::parse(text);
}

std::size_t line_count(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += (c == '\n');
    return n;
}

const std::string kZeroConfig =
    "[system]\n"
    "name = zero\n"
    "n = 3\n"
    "[shot]\n"
    "r_max = 5\n"
    "[experiment]\n"
    "alpha = 1, 2\n";

const std::string kSignChanging =
    "[system]\n"
    "name = sign_changing\n"
    "p = 5\n"
    "n = 3\n"
    "[experiment]\n"
    "a = 2\n";

}  // namespace

TEST_CASE("shoot writes the trajectory, outcome, and plot stub") {
    auto dir = fresh_dir("shoot");
    auto cfg = write_config(dir, kZeroConfig);
    auto res = run_cli(dir, "shoot --config " + cfg.string() + " --out " +
                                (dir / "out").string());
    CHECK(res.code == 0);
    CHECK(res.out.find("done: shoot") != std::string::npos);
    CHECK(res.err.empty());

    auto outcome = read_json(dir / "out" / "outcome.json");
    check_against("outcome", outcome);
    CHECK(outcome["outcome"] == "no_hit");
    CHECK(outcome["no_hit"] == true);
    CHECK(outcome["r_reached"] == 5.0);

    auto csv = slurp(dir / "out" / "trajectory.csv");
    CHECK(csv.rfind("r,u1,u2,du1,du2\n", 0) == 0);
    CHECK(line_count(csv) == 402);  // default points plus header

    auto stub = slurp(dir / "out" / "plot.py");
    CHECK(stub.rfind("#!/usr/bin/env python3", 0) == 0);
}

TEST_CASE("set overrides reach the integrator") {
    auto dir = fresh_dir("override");
    auto cfg = write_config(dir, kZeroConfig);
    auto res = run_cli(dir, "shoot --config " + cfg.string() +
                                " --set shot.r_max=7 --out " +
                                (dir / "out").string());
    CHECK(res.code == 0);
    auto outcome = read_json(dir / "out" / "outcome.json");
    CHECK(outcome["r_reached"] == 7.0);
}

TEST_CASE("config mistakes exit 2 with a structured diagnostic") {
    auto dir = fresh_dir("badkey");
    // reopened sections merge, so only the unknown key is the failure here
    auto cfg = write_config(dir, kZeroConfig + "[shot]\nbogus = 1\n");
    auto res = run_cli(dir, "shoot --config " + cfg.string());
    CHECK(res.code == 2);
    auto err = ordered_json::parse(res.err);
    check_against("error", err);
    CHECK(err["error"]["type"] == "validation_error");
    CHECK(err["error"]["key"] == "shot.bogus");

    auto dir2 = fresh_dir("badvalue");
    auto cfg2 = write_config(dir2, "[system]\nname = zero\nn = 3\n"
                                   "[output]\nformat = yaml\n");
    auto res2 = run_cli(dir2, "shoot --config " + cfg2.string());
    CHECK(res2.code == 2);
    auto err2 = ordered_json::parse(res2.err);
    CHECK(err2["error"]["type"] == "validation_error");
    CHECK(err2["error"]["key"] == "output.format");

    auto dir3 = fresh_dir("badexpr");
    auto cfg3 = write_config(dir3, "[system]\nname = custom\nn = 3\n"
                                   "f1 = \"u2 + q\"\nf2 = \"u1\"\n");
    auto res3 = run_cli(dir3, "shoot --config " + cfg3.string());
    CHECK(res3.code == 2);
    auto err3 = ordered_json::parse(res3.err);
    CHECK(err3["error"]["type"] == "unknown_identifier");
    CHECK(err3["error"]["name"] == "q");
}

TEST_CASE("usage errors from the argument parser also exit 2") {
    auto dir = fresh_dir("usage");
    CHECK(run_cli(dir, "shoot").code == 2);           // missing --config
    CHECK(run_cli(dir, "frobnicate").code == 2);      // unknown subcommand
    CHECK(run_cli(dir, "").code == 2);                // missing subcommand
    auto help = run_cli(dir, "--help");
    CHECK(help.code == 0);
    CHECK(help.out.find("shoot") != std::string::npos);
    CHECK(help.out.find("pohozaev") != std::string::npos);
}

TEST_CASE("numerical failures exit 3") {
    // blow-up: the state runs away before any wall contact
    auto dir = fresh_dir("blowup");
    auto cfg = write_config(dir,
                            "[system]\n"
                            "name = custom\n"
                            "n = 3\n"
                            "f1 = \"0 - u1^3\"\n"
                            "[experiment]\n"
                            "alpha = 2\n");
    auto res = run_cli(dir, "shoot --config " + cfg.string() + " --out " +
                                (dir / "out").string());
    CHECK(res.code == 3);
    auto err = ordered_json::parse(res.err);
    CHECK(err["error"]["type"] == "blowup");
    // the outcome artifact is still written for post-mortems
    auto outcome = read_json(dir / "out" / "outcome.json");
    check_against("outcome", outcome);
    CHECK(outcome["outcome"] == "blowup");

    // budget exhaustion in the dirichlet search
    auto dir2 = fresh_dir("budget");
    auto cfg2 = write_config(dir2,
                             "[system]\n"
                             "name = hls\n"
                             "p = 3\n"
                             "q = 3\n"
                             "n = 3\n"
                             "[experiment]\n"
                             "budget = 100\n"
                             "a_lo = 0.5\n"
                             "a_hi = 50\n");
    auto res2 = run_cli(dir2, "dirichlet --config " + cfg2.string() +
                                  " --out " + (dir2 / "out").string());
    CHECK(res2.code == 3);
    auto err2 = ordered_json::parse(res2.err);
    CHECK(err2["error"]["type"] == "budget_exhausted");
    auto dj = read_json(dir2 / "out" / "dirichlet.json");
    check_against("dirichlet", dj);
    CHECK(dj["found"] == false);
    CHECK(dj["reason"] == "budget exhausted");
}

TEST_CASE("failed structural checks exit 4") {
    auto dir = fresh_dir("check4");
    auto cfg = write_config(dir,
                            "[system]\n"
                            "name = custom\n"
                            "n = 3\n"
                            "f1 = \"0 - 1\"\n"
                            "f2 = \"1\"\n"
                            "[experiment]\n"
                            "samples = 2000\n");
    auto res = run_cli(dir, "check --config " + cfg.string() + " --out " +
                                (dir / "out").string());
    CHECK(res.code == 4);
    auto rep = read_json(dir / "out" / "assumptions.json");
    check_against("assumptions", rep);
    CHECK(rep["ok"] == false);

    auto dir2 = fresh_dir("check0");
    auto cfg2 = write_config(dir2, kSignChanging + "samples = 2000\n");
    auto res2 = run_cli(dir2, "check --config " + cfg2.string() + " --out " +
                                  (dir2 / "out").string());
    CHECK(res2.code == 0);
    auto rep2 = read_json(dir2 / "out" / "assumptions.json");
    check_against("assumptions", rep2);
    CHECK(rep2["ok"] == true);
}

TEST_CASE("find produces a no-return candidate with a tight bracket") {
    auto dir = fresh_dir("find");
    auto cfg = write_config(dir, kSignChanging + "budget = 200\n");
    auto res = run_cli(dir, "find --config " + cfg.string() + " --out " +
                                (dir / "out").string());
    CHECK(res.code == 0);
    auto cand = read_json(dir / "out" / "candidate.json");
    check_against("candidate", cand);
    CHECK(cand["no_hit"] == true);
    CHECK(cand["achieved_r"].get<double>() >= 50.0);
    CHECK(cand["shots"].get<int>() <= 200);
    double width = cand["bracket_hi"].get<double>() -
                   cand["bracket_lo"].get<double>();
    CHECK(width <= 2.0 * 1e-10 * 2.0);
    CHECK(cand["a"] == 2.0);

    auto trace = slurp(dir / "out" / "trace.csv");
    CHECK(trace.rfind("iter,t_lo,t_hi,t_mid,r_mid,hit_index\n", 0) == 0);
    CHECK(line_count(trace) == cand["trace_rows"].get<std::size_t>() + 1);
}

TEST_CASE("degree of the certified sign-changing map is one") {
    auto dir = fresh_dir("degree");
    auto cfg = write_config(dir, kSignChanging + "k = 16\n");
    auto res = run_cli(dir, "degree --config " + cfg.string() + " --out " +
                                (dir / "out").string());
    CHECK(res.code == 0);
    auto deg = read_json(dir / "out" / "degree.json");
    check_against("degree", deg);
    CHECK(deg["degree"] == 1);
    CHECK(deg["certified"] == true);
}

TEST_CASE("sweep grids the wall image") {
    auto dir = fresh_dir("sweep");
    auto cfg2 = write_config(dir,
                             "[system]\n"
                             "name = zero\n"
                             "n = 3\n"
                             "[shot]\n"
                             "r_max = 5\n"
                             "[experiment]\n"
                             "k = 4\n"
                             "a = 2\n");
    auto res = run_cli(dir, "sweep --config " + cfg2.string() + " --out " +
                                (dir / "out").string());
    CHECK(res.code == 0);
    auto sweep = read_json(dir / "out" / "sweep.json");
    check_against("sweep", sweep);
    CHECK(sweep["k"] == 4);
    CHECK(sweep["rows"].size() == 5);
    int wall = 0, nohit = 0;
    for (const auto& row : sweep["rows"]) {
        if (row["outcome"] == "wall_hit") ++wall;
        if (row["outcome"] == "no_hit") ++nohit;
    }
    CHECK(wall == 2);   // the two boundary points are fixed immediately
    CHECK(nohit == 3);  // the zero field never returns from the interior
    auto csv = slurp(dir / "out" / "sweep.csv");
    CHECK(line_count(csv) == 6);
}

TEST_CASE("pohozaev emits the certificate text and identity reports") {
    auto dir = fresh_dir("poh_cert");
    auto cfg = write_config(dir, kSignChanging + "samples = 2000\n");
    auto res = run_cli(dir, "pohozaev --config " + cfg.string() + " --out " +
                                (dir / "out").string());
    CHECK(res.code == 0);
    auto poh = read_json(dir / "out" / "pohozaev.json");
    check_against("pohozaev", poh);
    CHECK(poh["certificate"]["certified"] == true);
    CHECK(poh["certificate"]["lemma"] == "sign-changing merged identity");
    CHECK(poh["identities"].empty());  // nothing to verify once certified

    auto text = slurp(dir / "out" / "certificate.txt");
    CHECK(text.find("Certified -- Lemma: sign-changing merged identity") !=
          std::string::npos);

    // the subcritical scalar problem is not certified, so the ball solution
    // is computed and both identity residuals land in the report
    auto dir2 = fresh_dir("poh_scalar");
    auto cfg2 = write_config(dir2,
                             "[system]\n"
                             "name = lane_emden_scalar\n"
                             "p = 3\n"
                             "n = 3\n"
                             "[experiment]\n"
                             "R = 1\n"
                             "samples = 2000\n");
    auto res2 = run_cli(dir2, "pohozaev --config " + cfg2.string() + " --out " +
                                  (dir2 / "out").string());
    CHECK(res2.code == 0);
    auto poh2 = read_json(dir2 / "out" / "pohozaev.json");
    check_against("pohozaev", poh2);
    CHECK(poh2["certificate"]["certified"] == false);
    REQUIRE(poh2["identities"].size() == 2);
    CHECK(poh2["identities"][0]["identity"] == "rellich_single");
    CHECK(poh2["identities"][1]["identity"] == "scalar_merged");
    CHECK(poh2["identities"][1]["rel_residual"].get<double>() <= 1e-6);
}

TEST_CASE("reruns are byte-identical") {
    auto dir = fresh_dir("determinism");
    auto cfg = write_config(dir, kSignChanging + "samples = 2000\n");
    auto a = dir / "a";
    auto b = dir / "b";
    CHECK(run_cli(dir, "pohozaev --config " + cfg.string() + " --out " +
                           a.string())
              .code == 0);
    CHECK(run_cli(dir, "pohozaev --config " + cfg.string() + " --out " +
                           b.string())
              .code == 0);
    CHECK(slurp(a / "pohozaev.json") == slurp(b / "pohozaev.json"));
    CHECK(slurp(a / "certificate.txt") == slurp(b / "certificate.txt"));
    CHECK(!slurp(a / "pohozaev.json").empty());

    auto zc = write_config(dir, kZeroConfig);
    auto c = dir / "c";
    auto d = dir / "d";
    CHECK(run_cli(dir, "shoot --config " + zc.string() + " --out " + c.string())
              .code == 0);
    CHECK(run_cli(dir, "shoot --config " + zc.string() + " --out " + d.string())
              .code == 0);
    CHECK(slurp(c / "trajectory.csv") == slurp(d / "trajectory.csv"));
    CHECK(slurp(c / "outcome.json") == slurp(d / "outcome.json"));
}

TEST_CASE("format selection controls which artifacts appear") {
    auto dir = fresh_dir("format");
    auto cfg = write_config(dir, kZeroConfig);
    auto res = run_cli(dir, "shoot --config " + cfg.string() +
                                " --format json --out " +
                                (dir / "json_only").string());
    CHECK(res.code == 0);
    CHECK(fs::exists(dir / "json_only" / "outcome.json"));
    CHECK(!fs::exists(dir / "json_only" / "trajectory.csv"));
    CHECK(!fs::exists(dir / "json_only" / "plot.py"));

    auto res2 = run_cli(dir, "shoot --config " + cfg.string() +
                                 " --format csv --out " +
                                 (dir / "csv_only").string());
    CHECK(res2.code == 0);
    CHECK(!fs::exists(dir / "csv_only" / "outcome.json"));
    CHECK(fs::exists(dir / "csv_only" / "trajectory.csv"));
    CHECK(fs::exists(dir / "csv_only" / "plot.py"));
}

TEST_CASE("the shipped example configs load and run") {
    auto dir = fresh_dir("examples");
    auto root = schema_dir().parent_path();  // schemas/ sits in the repo root
    auto res = run_cli(dir, "shoot --config " +
                                (root / "configs" / "custom_system.ini").string() +
                                " --out " + (dir / "out").string());
    CHECK(res.code == 0);
    auto outcome = read_json(dir / "out" / "outcome.json");
    check_against("outcome", outcome);
    CHECK(outcome["outcome"] == "wall_hit");
}
