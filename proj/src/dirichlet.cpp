#include "radshoot/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace radshoot {

namespace {

struct BudgetedShooter {
    const SystemSpec& spec;
    ShotConfig cfg;
    long budget;
    long used = 0;

    bool exhausted() const { return used >= budget; }

    ShotResult shoot(std::span<const double> alpha) {
        ++used;
        return integrate(spec, alpha, cfg);
    }
};

// max_i |u_i| at the hit radius
double value_gap_of(const WallHit& hit) {
    double g = 0.0;
    for (double v : hit.u_end) g = std::max(g, std::fabs(v));
    return g;
}

}  // namespace

DirichletResult solve_dirichlet_scalar(double p, int n, double R,
                                       const ShotConfig& cfg) {
    if (n < 3) throw InvalidInput("dimension must be at least 3");
    if (R <= 0) throw InvalidInput("ball radius must be positive");
    const double critical = static_cast<double>(n + 2) / (n - 2);
    if (!(p > 1.0) || p >= critical) {
        return DirichletNotFound{std::numeric_limits<double>::infinity(), 0,
                                 "certified nonexistent"};
    }
    SystemSpec spec =
        builtin("lane_emden_scalar", {{"p", p}, {"n", static_cast<double>(n)}});
    // tighten the event tolerance so the rescaled boundary value still clears
    // the caller's wall_tol after multiplication by the value scale
    ShotConfig tight = cfg;
    tight.wall_tol = std::min(cfg.wall_tol, 1e-12);

    const double alpha[1] = {1.0};
    ShotResult res = integrate(spec, alpha, tight);
    if (!is_wall_hit(res.outcome)) {
        return DirichletNotFound{std::numeric_limits<double>::infinity(), 1,
                                 std::string("shot ended in ") +
                                     outcome_name(res.outcome)};
    }
    const auto& hit = std::get<WallHit>(res.outcome);
    const double r0 = hit.r_alpha;
    const double lambda = r0 / R;

    BallSolution sol;
    sol.R = R;
    sol.n = n;
    sol.L = 1;
    sol.profile.traj =
        std::make_shared<const Trajectory>(std::move(res.trajectory));
    sol.profile.arg_scale = lambda;
    sol.profile.value_scale = std::pow(lambda, 2.0 / (p - 1.0));
    return DirichletFound{std::move(sol), 1};
}

namespace {

struct SwitchPoint {
    bool valid = false;       // a wall-hit switch was localized at this level
    double r_hat = 0.0;       // hit radius at the switch midpoint
    double split = 0.0;       // alpha_1 at the midpoint
    double value_gap = std::numeric_limits<double>::infinity();
    std::shared_ptr<const Trajectory> traj;

    // search objective: component gap plus radius mismatch
    double gap(double R) const { return value_gap + std::fabs(r_hat - R); }
};

// at mass level s, bisect the splitting alpha = (x, s-x) on the curve where
// the first-hit index flips, and report the hit at the midpoint
SwitchPoint locate_switch(BudgetedShooter& shooter, double s) {
    SwitchPoint out;
    auto first_index = [&](double x,
                           ShotResult* keep = nullptr) -> int {  // -1: no hit
        double alpha[2] = {x, s - x};
        ShotResult res = shooter.shoot(alpha);
        int idx = -1;
        if (is_wall_hit(res.outcome)) {
            const auto& hit = std::get<WallHit>(res.outcome);
            idx = hit.hit_set.empty() ? -1 : hit.hit_set.front();
        }
        if (keep) *keep = std::move(res);
        return idx;
    };

    double lo = 1e-6 * s, hi = (1.0 - 1e-6) * s;
    if (shooter.exhausted()) return out;
    int idx_lo = first_index(lo);
    if (shooter.exhausted()) return out;
    int idx_hi = first_index(hi);
    if (idx_lo < 0 || idx_hi < 0 || idx_lo == idx_hi) {
        // scan for a flip before giving up
        bool found = false;
        const int m = 8;
        double prev_x = lo;
        int prev_idx = idx_lo;
        for (int j = 1; j <= m && !found && !shooter.exhausted(); ++j) {
            double x = lo + j * (hi - lo) / (m + 1);
            int idx = first_index(x);
            if (prev_idx >= 0 && idx >= 0 && idx != prev_idx) {
                lo = prev_x;
                hi = x;
                idx_lo = prev_idx;
                found = true;
            }
            prev_x = x;
            prev_idx = idx;
        }
        if (!found) {
            if (prev_idx >= 0 && idx_hi >= 0 && prev_idx != idx_hi) {
                lo = prev_x;
                idx_lo = prev_idx;
            } else {
                return out;
            }
        }
    }

    while (hi - lo > 1e-13 * s && !shooter.exhausted()) {
        double mid = 0.5 * (lo + hi);
        int idx = first_index(mid);
        if (idx < 0) return out;
        if (idx == idx_lo)
            lo = mid;
        else
            hi = mid;
    }
    if (shooter.exhausted()) return out;

    double mid = 0.5 * (lo + hi);
    ShotResult res;
    int idx = first_index(mid, &res);
    if (idx < 0) return out;
    const auto& hit = std::get<WallHit>(res.outcome);
    out.valid = true;
    out.r_hat = hit.r_alpha;
    out.split = mid;
    out.value_gap = value_gap_of(hit);
    out.traj = std::make_shared<const Trajectory>(std::move(res.trajectory));
    return out;
}

}  // namespace

DirichletResult solve_dirichlet_system(const SystemSpec& spec, double a_lo,
                                       double a_hi, double R,
                                       const ShotConfig& cfg, long budget) {
    if (spec.L != 2)
        throw UnsupportedSystem("simultaneous-hit search handles two components");
    if (budget < 100) throw InvalidInput("budget must be at least 100");
    if (!(a_lo > 0) || !(a_hi >= a_lo))
        throw InvalidInput("need 0 < a_lo <= a_hi");
    if (R <= 0) throw InvalidInput("ball radius must be positive");

    BudgetedShooter shooter{spec, cfg, budget};
    double best_gap = std::numeric_limits<double>::infinity();
    auto not_found = [&](const std::string& reason) {
        return DirichletNotFound{best_gap, shooter.used, reason};
    };
    auto note = [&](const SwitchPoint& sp) {
        if (sp.valid) best_gap = std::min(best_gap, sp.gap(R));
    };

    // probe levels until one carries a hit-index switch
    double s0 = std::sqrt(a_lo * a_hi);
    SwitchPoint sp0 = locate_switch(shooter, s0);
    note(sp0);
    for (double factor : {4.0, 0.25, 16.0, 0.0625}) {
        if (sp0.valid || shooter.exhausted()) break;
        double s = std::clamp(s0 * factor, a_lo, a_hi);
        sp0 = locate_switch(shooter, s);
        note(sp0);
        if (sp0.valid) s0 = s;
    }
    if (!sp0.valid)
        return not_found(shooter.exhausted() ? "budget exhausted"
                                             : "no hit-index switch found");

    // bracket r_hat(s) = R; the hit radius shrinks as the level grows
    double s_lo = s0, s_hi = s0;
    SwitchPoint sp_lo = sp0, sp_hi = sp0;
    while (sp_lo.valid && sp_lo.r_hat < R && s_lo > a_lo * (1 + 1e-12)) {
        s_lo = std::max(a_lo, 0.5 * s_lo);
        sp_lo = locate_switch(shooter, s_lo);
        note(sp_lo);
        if (shooter.exhausted()) return not_found("budget exhausted");
    }
    while (sp_hi.valid && sp_hi.r_hat > R && s_hi < a_hi * (1 - 1e-12)) {
        s_hi = std::min(a_hi, 2.0 * s_hi);
        sp_hi = locate_switch(shooter, s_hi);
        note(sp_hi);
        if (shooter.exhausted()) return not_found("budget exhausted");
    }
    if (!sp_lo.valid || !sp_hi.valid)
        return not_found("switch curve lost while bracketing");
    if (!(sp_lo.r_hat >= R && sp_hi.r_hat <= R))
        return not_found("hit radius does not bracket R inside [a_lo, a_hi]");

    // outer bisection in log s
    SwitchPoint best = sp_lo.gap(R) <= sp_hi.gap(R) ? sp_lo : sp_hi;
    while (std::fabs(best.r_hat / R - 1.0) > 1e-6 && !shooter.exhausted() &&
           s_hi / s_lo - 1.0 > 1e-14) {
        double s_mid = std::sqrt(s_lo * s_hi);
        SwitchPoint sp = locate_switch(shooter, s_mid);
        note(sp);
        if (!sp.valid) return not_found(shooter.exhausted()
                                            ? "budget exhausted"
                                            : "switch curve lost in bisection");
        if (sp.gap(R) < best.gap(R)) best = sp;
        if (sp.r_hat > R)
            s_lo = s_mid;
        else
            s_hi = s_mid;
    }

    if (!(best.value_gap <= 10.0 * cfg.wall_tol))
        return not_found("components do not vanish together");
    if (!(std::fabs(best.r_hat / R - 1.0) <= 1e-6))
        return not_found(shooter.exhausted() ? "budget exhausted"
                                             : "hit radius missed R");

    BallSolution sol;
    sol.R = best.r_hat;
    sol.n = spec.n;
    sol.L = 2;
    sol.profile.traj = best.traj;
    return DirichletFound{std::move(sol), shooter.used};
}

}  // namespace radshoot
