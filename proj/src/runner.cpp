#include "radshoot/runner.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>

#include "radshoot/config.hpp"
#include "radshoot/io.hpp"
#include "radshoot/parallel.hpp"

namespace radshoot {

namespace {

namespace fs = std::filesystem;

struct Emitter {
    fs::path dir;
    bool csv;
    bool json;

    explicit Emitter(const OutputSection& out)
        : dir(out.dir),
          csv(out.format == "csv" || out.format == "both"),
          json(out.format == "json" || out.format == "both") {
        fs::create_directories(dir);
    }

    std::ofstream open(const std::string& name) const {
        std::ofstream os(dir / name, std::ios::binary);
        if (!os) throw InvalidInput("cannot write " + (dir / name).string());
        return os;
    }

    void emit_json(const std::string& name, const ordered_json& j) const {
        if (!json) return;
        auto os = open(name);
        os << j.dump(2) << "\n";
    }

    void emit_text(const std::string& name, const std::string& text) const {
        auto os = open(name);
        os << text;
    }

    void emit_plot_stub() const {
        if (csv) emit_text("plot.py", plot_stub());
    }
};

std::vector<double> default_center(double a, int L) {
    return std::vector<double>(static_cast<std::size_t>(L), a / L);
}

int run_shoot(const RunConfig& cfg, const SystemSpec& spec, const Emitter& em,
              std::ostream& err) {
    std::vector<double> alpha = cfg.experiment.alpha.empty()
                                    ? default_center(cfg.experiment.a, spec.L)
                                    : cfg.experiment.alpha;
    if (static_cast<int>(alpha.size()) != spec.L)
        throw ValidationError("experiment.alpha",
                              "needs one entry per component");
    ShotResult res = integrate(spec, alpha, cfg.shot);
    if (em.csv) {
        auto os = em.open("trajectory.csv");
        write_trajectory_csv(os, res.trajectory, cfg.output.points);
    }
    em.emit_json("outcome.json", outcome_json(res.outcome, res));
    em.emit_plot_stub();
    if (is_blowup(res.outcome) || std::holds_alternative<StepLimit>(res.outcome)) {
        ordered_json j;
        j["error"] = {{"type", outcome_name(res.outcome)},
                      {"message", "integration did not reach the wall or r_max"}};
        err << j.dump(2) << "\n";
        return 3;
    }
    return 0;
}

int run_sweep(const RunConfig& cfg, const SystemSpec& spec, const Emitter& em) {
    SimplexGrid grid =
        SimplexGrid::create(cfg.experiment.a, spec.L, cfg.experiment.k);
    std::vector<SweepRow> rows = sweep_psi(spec, grid, cfg.shot);
    if (em.csv) {
        auto os = em.open("sweep.csv");
        write_sweep_csv(os, rows, spec.L);
    }
    if (em.json) {
        ordered_json j;
        j["a"] = json_num(cfg.experiment.a);
        j["L"] = spec.L;
        j["k"] = cfg.experiment.k;
        ordered_json arr = ordered_json::array();
        for (const auto& row : rows) {
            ordered_json r;
            r["alpha"] = json_vec(row.alpha);
            r["r_alpha"] = json_num(row.r_alpha);
            r["hit_mask"] = row.hit_mask;
            r["value"] = json_vec(row.value);
            r["outcome"] = row.outcome;
            arr.push_back(std::move(r));
        }
        j["rows"] = std::move(arr);
        em.emit_json("sweep.json", j);
    }
    em.emit_plot_stub();
    return 0;
}

int run_degree(const RunConfig& cfg, const SystemSpec& spec, const Emitter& em) {
    std::vector<double> target = cfg.experiment.target.empty()
                                     ? default_center(cfg.experiment.a, spec.L)
                                     : cfg.experiment.target;
    SimplexPoint target_point = SimplexPoint::create(target, cfg.experiment.a);
    SimplexGrid grid =
        SimplexGrid::create(cfg.experiment.a, spec.L, cfg.experiment.k);
    DegreeReport rep = degree(phi_map(spec, cfg.shot), grid, target_point);
    em.emit_json("degree.json", degree_json(rep));
    return 0;
}

int run_find(const RunConfig& cfg, const SystemSpec& spec, const Emitter& em) {
    SolutionCandidate cand =
        find_zero(spec, cfg.experiment.a, cfg.shot,
                  static_cast<int>(cfg.experiment.budget));
    em.emit_json("candidate.json", candidate_json(cand));
    if (em.csv) {
        auto os = em.open("trace.csv");
        write_trace_csv(os, cand);
    }
    em.emit_plot_stub();
    return 0;
}

int run_dirichlet(const RunConfig& cfg, const SystemSpec& spec,
                  const Emitter& em, std::ostream& err) {
    const double R = cfg.experiment.radii.front();
    DirichletResult res;
    if (spec.kind == SystemKind::LaneEmdenScalar) {
        res = solve_dirichlet_scalar(spec.param("p"), spec.n, R, cfg.shot);
    } else if (spec.L == 2) {
        res = solve_dirichlet_system(spec, cfg.experiment.a_lo,
                                     cfg.experiment.a_hi, R, cfg.shot,
                                     cfg.experiment.budget);
    } else {
        throw UnsupportedSystem(
            "dirichlet search needs the scalar power system or two components");
    }
    em.emit_json("dirichlet.json", dirichlet_json(res));
    if (const auto* found = std::get_if<DirichletFound>(&res)) {
        if (em.csv) {
            auto os = em.open("profile.csv");
            write_ball_csv(os, found->solution, cfg.output.points);
        }
        em.emit_plot_stub();
        return 0;
    }
    const auto& nf = std::get<DirichletNotFound>(res);
    if (nf.reason == "budget exhausted") {
        ordered_json j;
        j["error"] = {{"type", "budget_exhausted"},
                      {"message", "search budget exhausted; best gap " +
                                      format_full(nf.best_gap)}};
        err << j.dump(2) << "\n";
        return 3;
    }
    return 0;
}

int run_pohozaev(const RunConfig& cfg, const SystemSpec& spec,
                 const Emitter& em) {
    Certificate cert = nonexistence_certificate(
        spec, cfg.experiment.box_max, cfg.experiment.samples, cfg.output.seed);

    // when a ball solution is reachable, also evaluate the identities on it
    ordered_json identities = ordered_json::array();
    const double R = cfg.experiment.radii.front();
    if (spec.kind == SystemKind::LaneEmdenScalar) {
        DirichletResult res =
            solve_dirichlet_scalar(spec.param("p"), spec.n, R, cfg.shot);
        if (const auto* found = std::get_if<DirichletFound>(&res)) {
            identities.push_back(
                identity_json(verify_rellich_identity(found->solution)));
            identities.push_back(identity_json(
                verify_scalar_identity(found->solution, spec.param("p"))));
        }
    } else if (!cert.certified &&
               (spec.kind == SystemKind::Hls ||
                spec.kind == SystemKind::SignChanging ||
                spec.kind == SystemKind::SignChangingPq)) {
        DirichletResult res =
            solve_dirichlet_system(spec, cfg.experiment.a_lo,
                                   cfg.experiment.a_hi, R, cfg.shot,
                                   cfg.experiment.budget);
        if (const auto* found = std::get_if<DirichletFound>(&res)) {
            identities.push_back(
                identity_json(verify_cross_identity(found->solution)));
            if (spec.kind == SystemKind::SignChanging)
                identities.push_back(identity_json(verify_merged_identity(
                    found->solution, spec.param("p"))));
            if (spec.kind == SystemKind::SignChangingPq)
                identities.push_back(identity_json(verify_merged_identity(
                    found->solution, spec.param("p"), spec.param("q"))));
        }
    }

    ordered_json j;
    j["certificate"] = certificate_json(cert);
    j["identities"] = identities;
    em.emit_json("pohozaev.json", j);
    em.emit_text("certificate.txt", cert.text);
    return 0;
}

int run_check(const RunConfig& cfg, const SystemSpec& spec, const Emitter& em) {
    AssumptionReport rep =
        check_assumptions(spec, cfg.experiment.box_max, cfg.experiment.a,
                          cfg.experiment.samples, cfg.output.seed);
    ordered_json j = assumptions_json(rep);
    em.emit_json("assumptions.json", j);
    return j["ok"].get<bool>() ? 0 : 4;
}

int dispatch(const CliOptions& opts, std::ostream& out, std::ostream& err) {
    std::vector<std::string> overrides = opts.overrides;
    if (opts.out_dir) overrides.push_back("output.dir=" + *opts.out_dir);
    if (opts.seed)
        overrides.push_back("output.seed=" + std::to_string(*opts.seed));
    if (opts.threads)
        overrides.push_back("output.threads=" + std::to_string(*opts.threads));
    if (opts.format) overrides.push_back("output.format=" + *opts.format);

    RunConfig cfg = load_config(opts.config_path, overrides);
    if (cfg.output.threads > 0) set_num_threads(cfg.output.threads);
    SystemSpec spec = build_system(cfg.system);
    Emitter em(cfg.output);

    const std::string& sub = opts.subcommand;
    int code;
    if (sub == "shoot")
        code = run_shoot(cfg, spec, em, err);
    else if (sub == "sweep")
        code = run_sweep(cfg, spec, em);
    else if (sub == "degree")
        code = run_degree(cfg, spec, em);
    else if (sub == "find")
        code = run_find(cfg, spec, em);
    else if (sub == "dirichlet")
        code = run_dirichlet(cfg, spec, em, err);
    else if (sub == "pohozaev")
        code = run_pohozaev(cfg, spec, em);
    else if (sub == "check")
        code = run_check(cfg, spec, em);
    else
        throw ValidationError(sub, "unknown subcommand");
    out << "done: " << sub << " -> " << cfg.output.dir << "\n";
    return code;
}

}  // namespace

int run(const CliOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(opts, out, err);
    } catch (const ParseError& e) {
        err << error_json(e).dump(2) << "\n";
        return 2;
    } catch (const ValidationError& e) {
        err << error_json(e).dump(2) << "\n";
        return 2;
    } catch (const SyntaxError& e) {
        err << error_json(e).dump(2) << "\n";
        return 2;
    } catch (const UnknownIdentifier& e) {
        err << error_json(e).dump(2) << "\n";
        return 2;
    } catch (const UnknownSystem& e) {
        err << error_json(e).dump(2) << "\n";
        return 2;
    } catch (const MissingParam& e) {
        err << error_json(e).dump(2) << "\n";
        return 2;
    } catch (const InvalidBoundaryPoint& e) {
        err << error_json(e).dump(2) << "\n";
        return 2;
    } catch (const InvalidInput& e) {
        err << error_json(e).dump(2) << "\n";
        return 2;
    } catch (const UnsupportedSystem& e) {
        err << error_json(e).dump(2) << "\n";
        return 2;
    } catch (const Error& e) {
        // numerical failures: blow-up, stalled integration, degree grid
        // trouble, missing index switch, quadrature breakdown, ...
        err << error_json(e).dump(2) << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << error_json(e).dump(2) << "\n";
        return 3;
    }
}

}  // namespace radshoot
