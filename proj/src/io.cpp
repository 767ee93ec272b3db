#include "radshoot/io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "radshoot/errors.hpp"

namespace radshoot {

std::string format_full(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

ordered_json json_num(double v) {
    if (std::isfinite(v)) return v;
    return format_full(v);  // "inf" / "-inf" / "nan"
}

ordered_json json_vec(const std::vector<double>& v) {
    ordered_json arr = ordered_json::array();
    for (double x : v) arr.push_back(json_num(x));
    return arr;
}

namespace {

void write_profile_rows(std::ostream& os, int L,
                        const std::function<void(double, std::span<double>,
                                                 std::span<double>)>& eval,
                        double r_end, int points) {
    os << "r";
    for (int i = 1; i <= L; ++i) os << ",u" << i;
    for (int i = 1; i <= L; ++i) os << ",du" << i;
    os << "\n";
    std::vector<double> u(static_cast<std::size_t>(L)),
        du(static_cast<std::size_t>(L));
    for (int j = 0; j < points; ++j) {
        double r = r_end * j / (points - 1);
        eval(r, u, du);
        os << format_full(r);
        for (double x : u) os << "," << format_full(x);
        for (double x : du) os << "," << format_full(x);
        os << "\n";
    }
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          int points) {
    if (points < 2) throw InvalidInput("need at least two sample points");
    write_profile_rows(
        os, traj.components(),
        [&](double r, std::span<double> u, std::span<double> du) {
            traj.eval(r, u, du);
        },
        traj.r_end(), points);
}

void write_ball_csv(std::ostream& os, const BallSolution& sol, int points) {
    if (points < 2) throw InvalidInput("need at least two sample points");
    os << "# R=" << format_full(sol.R) << " n=" << sol.n << "\n";
    write_profile_rows(
        os, sol.L,
        [&](double r, std::span<double> u, std::span<double> du) {
            sol.profile.eval(r, u, du);
        },
        sol.R, points);
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows,
                     int L) {
    for (int i = 1; i <= L; ++i) os << (i > 1 ? "," : "") << "alpha" << i;
    os << ",r_alpha,hit_mask";
    for (int i = 1; i <= L; ++i) os << ",psi" << i;
    os << ",outcome\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.alpha.size(); ++i)
            os << (i ? "," : "") << format_full(row.alpha[i]);
        os << "," << format_full(row.r_alpha) << "," << row.hit_mask;
        for (double v : row.value) os << "," << format_full(v);
        os << "," << row.outcome << "\n";
    }
}

void write_trace_csv(std::ostream& os, const SolutionCandidate& cand) {
    os << "iter,t_lo,t_hi,t_mid,r_mid,hit_index\n";
    for (const auto& row : cand.trace) {
        os << row.iter << "," << format_full(row.t_lo) << ","
           << format_full(row.t_hi) << "," << format_full(row.t_mid) << ","
           << format_full(row.r_mid) << "," << row.hit_index << "\n";
    }
}

ordered_json outcome_json(const ShotOutcome& outcome, const ShotResult& res) {
    ordered_json j;
    j["outcome"] = outcome_name(outcome);
    if (const auto* hit = std::get_if<WallHit>(&outcome)) {
        j["r_alpha"] = json_num(hit->r_alpha);
        j["hit_set"] = hit->hit_set;
        j["u_end"] = json_vec(hit->u_end);
        j["du_end"] = json_vec(hit->du_end);
    } else if (const auto* nh = std::get_if<NoHitUpTo>(&outcome)) {
        j["no_hit"] = true;
        j["r_reached"] = json_num(nh->r_reached);
    } else if (const auto* bl = std::get_if<Blowup>(&outcome)) {
        j["r_stop"] = json_num(bl->r_stop);
    } else if (const auto* sl = std::get_if<StepLimit>(&outcome)) {
        j["r_stop"] = json_num(sl->r_stop);
    }
    j["steps_accepted"] = res.steps_accepted;
    j["steps_rejected"] = res.steps_rejected;
    j["rhs_evals"] = res.rhs_evals;
    return j;
}

ordered_json degree_json(const DegreeReport& rep) {
    ordered_json j;
    j["degree"] = rep.degree;
    j["method"] = degree_method_name(rep.method);
    j["resolution"] = rep.resolution;
    j["certified"] = rep.certified;
    j["excluded"] = rep.excluded;
    j["map_evals"] = rep.map_evals;
    j["target"] = json_vec(rep.target);
    return j;
}

ordered_json candidate_json(const SolutionCandidate& cand) {
    ordered_json j;
    j["alpha"] = json_vec(cand.alpha0.alpha);
    j["a"] = json_num(cand.alpha0.a);
    j["achieved_r"] = json_num(cand.achieved_r);
    j["score"] = json_num(cand.score);
    j["bracket_lo"] = json_num(cand.bracket_lo);
    j["bracket_hi"] = json_num(cand.bracket_hi);
    j["shots"] = cand.shots;
    j["no_hit"] = cand.no_hit;
    j["trace_rows"] = cand.trace.size();
    return j;
}

ordered_json dirichlet_json(const DirichletResult& res) {
    ordered_json j;
    if (const auto* found = std::get_if<DirichletFound>(&res)) {
        j["found"] = true;
        j["R"] = json_num(found->solution.R);
        j["n"] = found->solution.n;
        j["L"] = found->solution.L;
        j["shots"] = found->shots;
        j["boundary_derivative"] = json_vec(found->solution.boundary_deriv());
    } else {
        const auto& nf = std::get<DirichletNotFound>(res);
        j["found"] = false;
        j["best_gap"] = json_num(nf.best_gap);
        j["attempts"] = nf.attempts;
        j["reason"] = nf.reason;
    }
    return j;
}

ordered_json identity_json(const IdentityReport& rep) {
    ordered_json j;
    j["identity"] = rep.identity;
    j["lhs"] = json_num(rep.lhs);
    j["rhs"] = json_num(rep.rhs);
    j["rel_residual"] = json_num(rep.rel_residual);
    j["quadrature_error"] = json_num(rep.quadrature_error);
    return j;
}

ordered_json certificate_json(const Certificate& cert) {
    ordered_json j;
    j["certified"] = cert.certified;
    j["lemma"] = cert.lemma;
    j["reason"] = cert.reason;
    j["margin"] = json_num(cert.margin);
    j["sample_count"] = cert.sample_count;
    j["text"] = cert.text;
    return j;
}

namespace {

ordered_json control_json(const ControlEntry& e) {
    ordered_json j;
    j["zero_set"] = e.zero_set;
    j["base_point"] = json_vec(e.base_point);
    j["delta0"] = json_num(e.delta0);
    j["ok"] = e.ok;
    j["c_est"] = json_num(e.c_est);
    j["worst_ratio"] = json_num(e.worst_ratio);
    j["worst_point"] = json_vec(e.worst_point);
    j["sample_count"] = e.sample_count;
    return j;
}

}  // namespace

ordered_json assumptions_json(const AssumptionReport& rep) {
    bool ok = rep.decay.ok;
    for (const auto& e : rep.control_entries) ok = ok && e.ok;
    const bool potential_checked = rep.potential.sample_count > 0;
    if (potential_checked) ok = ok && rep.potential.ok;

    ordered_json j;
    j["ok"] = ok;
    ordered_json dec;
    dec["ok"] = rep.decay.ok;
    dec["worst_value"] = json_num(rep.decay.worst_value);
    dec["worst_point"] = json_vec(rep.decay.worst_point);
    dec["sample_count"] = rep.decay.sample_count;
    j["decay"] = dec;
    ordered_json entries = ordered_json::array();
    for (const auto& e : rep.control_entries) entries.push_back(control_json(e));
    j["control"] = entries;
    ordered_json pot;
    pot["checked"] = potential_checked;
    pot["ok"] = rep.potential.ok;
    pot["worst_rel_err"] = json_num(rep.potential.worst_rel_err);
    pot["worst_point"] = json_vec(rep.potential.worst_point);
    pot["sample_count"] = rep.potential.sample_count;
    j["potential"] = pot;
    j["sample_count"] = rep.sample_count;
    return j;
}

ordered_json error_json(const std::exception& e) {
    ordered_json detail;
    const char* type = "error";
    if (auto* x = dynamic_cast<const ParseError*>(&e)) {
        type = "parse_error";
        detail["line"] = x->line;
    } else if (auto* x = dynamic_cast<const ValidationError*>(&e)) {
        type = "validation_error";
        detail["key"] = x->key;
    } else if (auto* x = dynamic_cast<const SyntaxError*>(&e)) {
        type = "syntax_error";
        detail["position"] = x->position;
    } else if (auto* x = dynamic_cast<const UnknownIdentifier*>(&e)) {
        type = "unknown_identifier";
        detail["name"] = x->name;
    } else if (dynamic_cast<const DomainError*>(&e)) {
        type = "domain_error";
    } else if (dynamic_cast<const UnknownSystem*>(&e)) {
        type = "unknown_system";
    } else if (dynamic_cast<const MissingParam*>(&e)) {
        type = "missing_param";
    } else if (dynamic_cast<const InvalidBoundaryPoint*>(&e)) {
        type = "invalid_boundary_point";
    } else if (dynamic_cast<const InvalidInput*>(&e)) {
        type = "invalid_input";
    } else if (auto* x = dynamic_cast<const BlowupError*>(&e)) {
        type = "blowup";
        detail["r_stop"] = json_num(x->r_stop);
    } else if (dynamic_cast<const IntegrationError*>(&e)) {
        type = "integration_error";
    } else if (dynamic_cast<const NotAWallHit*>(&e)) {
        type = "not_a_wall_hit";
    } else if (dynamic_cast<const GridTooCoarse*>(&e)) {
        type = "grid_too_coarse";
    } else if (dynamic_cast<const TargetOnBoundaryImage*>(&e)) {
        type = "target_on_boundary_image";
    } else if (dynamic_cast<const NoSwitchFound*>(&e)) {
        type = "no_switch_found";
    } else if (auto* x = dynamic_cast<const QuadratureFailure*>(&e)) {
        type = "quadrature_failure";
        detail["error_estimate"] = json_num(x->error_estimate);
    } else if (dynamic_cast<const NotADirichletSolution*>(&e)) {
        type = "not_a_dirichlet_solution";
    } else if (dynamic_cast<const UnsupportedSystem*>(&e)) {
        type = "unsupported_system";
    }
    ordered_json j;
    ordered_json err;
    err["type"] = type;
    err["message"] = e.what();
    for (auto& [k, v] : detail.items()) err[k] = v;
    j["error"] = err;
    return j;
}

std::string plot_stub() {
    return R"(#!/usr/bin/env python3
"""Plot whichever CSV files this run produced (requires matplotlib)."""
import csv
import os
import sys

import matplotlib.pyplot as plt


def read_csv(path):
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    header, body = rows[0], rows[1:]
    cols = {name: [] for name in header}
    for row in body:
        for name, cell in zip(header, row):
            try:
                cols[name].append(float(cell))
            except ValueError:
                cols[name].append(float("nan"))
    return cols


def main(run_dir="."):
    made = False
    for name in ("trajectory.csv", "profile.csv"):
        path = os.path.join(run_dir, name)
        if not os.path.exists(path):
            continue
        cols = read_csv(path)
        plt.figure()
        for key in cols:
            if key.startswith("u"):
                plt.plot(cols["r"], cols[key], label=key)
        plt.xlabel("r")
        plt.legend()
        plt.title(name)
        plt.savefig(os.path.join(run_dir, name.replace(".csv", ".png")))
        made = True
    path = os.path.join(run_dir, "sweep.csv")
    if os.path.exists(path):
        cols = read_csv(path)
        plt.figure()
        plt.scatter(cols["alpha1"], cols["r_alpha"], s=4)
        plt.xlabel("alpha1")
        plt.ylabel("r_alpha")
        plt.title("wall radius over the level set")
        plt.savefig(os.path.join(run_dir, "sweep.png"))
        made = True
    path = os.path.join(run_dir, "trace.csv")
    if os.path.exists(path):
        cols = read_csv(path)
        plt.figure()
        plt.plot(cols["iter"], cols["r_mid"], marker="o")
        plt.xlabel("iteration")
        plt.ylabel("r at bracket midpoint")
        plt.title("bisection trace")
        plt.savefig(os.path.join(run_dir, "trace.png"))
        made = True
    if not made:
        print("no plottable CSV files found", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1] if len(sys.argv) > 1 else "."))
)";
}

}  // namespace radshoot
