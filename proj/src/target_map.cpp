#include "radshoot/target_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "radshoot/sampling.hpp"

namespace radshoot {

TargetResult psi(const SystemSpec& spec, const SimplexPoint& p,
                 const ShotConfig& cfg) {
    if (p.dim() != spec.L)
        throw InvalidInput("point dimension does not match the system");

    TargetResult out;
    if (p.on_boundary(cfg.wall_tol)) {
        // boundary points are fixed by definition; no integration
        out.value = p.alpha;
        out.r_alpha = 0.0;
        for (int i = 0; i < p.dim(); ++i)
            if (p.alpha[static_cast<std::size_t>(i)] <= cfg.wall_tol)
                out.hit_set.push_back(i);
        WallHit hit;
        hit.r_alpha = 0.0;
        hit.hit_set = out.hit_set;
        hit.u_end = p.alpha;
        hit.du_end.assign(p.alpha.size(), 0.0);
        out.outcome = hit;
        return out;
    }

    auto shot = integrate(spec, p.alpha, cfg);
    out.outcome = shot.outcome;
    if (const auto* hit = std::get_if<WallHit>(&shot.outcome)) {
        std::vector<double> v = hit->u_end;
        for (double& x : v) x = std::max(x, 0.0);  // wall round-off
        out.value = std::move(v);
        out.r_alpha = hit->r_alpha;
        out.hit_set = hit->hit_set;
        return out;
    }
    if (std::holds_alternative<NoHitUpTo>(shot.outcome)) {
        out.r_alpha = std::numeric_limits<double>::infinity();
        return out;
    }
    if (const auto* blow = std::get_if<Blowup>(&shot.outcome))
        throw BlowupError(blow->r_stop);
    throw IntegrationError("shot stalled before reaching the wall or r_max");
}

std::optional<SimplexPoint> phi(const SystemSpec& spec, const SimplexPoint& p,
                                const ShotConfig& cfg) {
    TargetResult t = psi(spec, p, cfg);
    if (t.no_hit()) return std::nullopt;
    return pi_map(*t.value, p.a);
}

EstimateCheck dynamic_estimate_check(const SystemSpec& spec,
                                     std::span<const double> abar,
                                     double c_control, double delta,
                                     int samples, const ShotConfig& cfg,
                                     ExecPolicy policy) {
    const int L = spec.L;
    if (static_cast<int>(abar.size()) != L)
        throw InvalidInput("base point dimension does not match the system");
    if (delta <= 0) throw InvalidInput("delta must be positive");
    if (c_control < 1.0) throw InvalidInput("control constant must be >= 1");
    if (samples < 1) throw InvalidInput("need at least one sample");

    double a = 0.0;
    std::vector<int> zero_set, pos_set;
    for (int i = 0; i < L; ++i) {
        double v = abar[static_cast<std::size_t>(i)];
        if (v < 0) throw InvalidBoundaryPoint("negative coordinate in base point");
        a += v;
        if (v <= kClampTol)
            zero_set.push_back(i);
        else
            pos_set.push_back(i);
    }
    if (zero_set.empty() || pos_set.empty())
        throw InvalidBoundaryPoint(
            "base point must have some, but not all, coordinates zero");

    const double bound_claim = 2.0 * (3.0 + L) * c_control * delta;
    const double bound_chain = (3.0 + c_control) * L * delta;
    const double bound = std::max(bound_claim, bound_chain);

    struct Slot {
        double m = -1.0;  // sup_r |u - abar|_inf; negative = skipped
    };
    std::vector<Slot> slots(static_cast<std::size_t>(samples));
    Halton seq(static_cast<int>(zero_set.size()), /*seed=*/17);

    parallel_for(
        static_cast<std::size_t>(samples),
        [&](std::size_t idx) {
            // lift the zero coordinates by up to delta, shrink the positive
            // ones proportionally so the mass stays at a
            std::vector<double> t;
            seq.point_into(idx, t);
            double lifted = 0.0;
            for (double& v : t) {
                v *= delta;
                lifted += v;
            }
            std::vector<double> alpha(abar.begin(), abar.end());
            double shrink = (a - lifted) / a;
            if (shrink <= 0) return;  // skipped (degenerate level)
            for (int i : pos_set)
                alpha[static_cast<std::size_t>(i)] *= shrink;
            for (std::size_t z = 0; z < zero_set.size(); ++z)
                alpha[static_cast<std::size_t>(zero_set[z])] = t[z];
            // stay within the delta ball
            for (int i = 0; i < L; ++i) {
                double dev = std::fabs(alpha[static_cast<std::size_t>(i)] -
                                       abar[static_cast<std::size_t>(i)]);
                if (dev > delta) return;  // skipped
            }

            ShotResult shot;
            try {
                shot = integrate(spec, alpha, cfg);
            } catch (const Error&) {
                return;  // skipped
            }
            if (!is_wall_hit(shot.outcome)) return;  // skipped (NoHit/blow-up/stall)

            double m = 0.0;
            for (const auto& node : shot.trajectory.nodes()) {
                for (int i = 0; i < L; ++i) {
                    double dev = std::fabs(node.u[static_cast<std::size_t>(i)] -
                                           abar[static_cast<std::size_t>(i)]);
                    m = std::max(m, dev);
                }
            }
            slots[idx].m = m;
        },
        policy);

    EstimateCheck check;
    check.sample_count = samples;
    check.bound_used = bound;
    for (const auto& slot : slots) {
        if (slot.m < 0) {
            ++check.skipped;
            continue;
        }
        check.worst_m = std::max(check.worst_m, slot.m);
    }
    check.ratio_claim = check.worst_m / bound_claim;
    check.ratio_chain = check.worst_m / bound_chain;
    check.ok = check.skipped < samples && check.worst_m <= bound;
    return check;
}

Transversality transversality_check(const SystemSpec& spec,
                                    const SimplexPoint& p,
                                    const ShotConfig& cfg) {
    TargetResult t = psi(spec, p, cfg);
    if (t.no_hit() || t.hit_set.empty())
        throw NotAWallHit("shot did not reach the wall");
    if (t.r_alpha == 0.0)
        throw NotAWallHit("boundary start has no incoming trajectory");

    const auto* hit = std::get_if<WallHit>(&t.outcome);
    Transversality out;
    out.r_alpha = t.r_alpha;
    out.hit_set = t.hit_set;
    // left derivative of min_i u_i at contact: minimum over the contact set
    double slope = std::numeric_limits<double>::infinity();
    for (int i : t.hit_set)
        slope = std::min(slope, hit->du_end[static_cast<std::size_t>(i)]);
    out.omega_slope = slope;
    double slope_tol = 1e-8 * std::max(1.0, p.a / std::max(t.r_alpha, 1e-30));
    out.transversal = slope < -slope_tol;
    return out;
}

std::vector<SweepRow> sweep_psi(const SystemSpec& spec, const SimplexGrid& grid,
                                const ShotConfig& cfg, ExecPolicy policy) {
    std::vector<SweepRow> rows(grid.size());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    parallel_for(
        grid.size(),
        [&](std::size_t i) {
            const SimplexPoint& p = grid.points[i];
            SweepRow& row = rows[i];
            row.alpha = p.alpha;
            try {
                TargetResult t = psi(spec, p, cfg);
                row.outcome = outcome_name(t.outcome);
                if (t.no_hit()) {
                    row.r_alpha = std::numeric_limits<double>::infinity();
                    row.value.assign(p.alpha.size(), nan);
                } else {
                    row.r_alpha = t.r_alpha;
                    row.value = *t.value;
                    for (int b : t.hit_set) row.hit_mask |= 1u << b;
                }
            } catch (const BlowupError&) {
                row.outcome = "blowup";
                row.r_alpha = nan;
                row.value.assign(p.alpha.size(), nan);
            } catch (const IntegrationError&) {
                row.outcome = "step_limit";
                row.r_alpha = nan;
                row.value.assign(p.alpha.size(), nan);
            }
        },
        policy);
    return rows;
}

}  // namespace radshoot
