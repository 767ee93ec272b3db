#pragma once

#include <span>
#include <variant>
#include <vector>

#include "radshoot/system.hpp"

namespace radshoot {

struct ShotConfig {
    double eps_start = 1e-6;  // handoff radius for the series start
    double r_max = 1e4;       // give up (NoHit) beyond this radius
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double wall_tol = 1e-10;  // wall-hit localization tolerance
    long max_steps = 1000000;
};

// First contact with the boundary of the positive orthant.
struct WallHit {
    double r_alpha;
    std::vector<int> hit_set;    // components with |u_i(r_alpha)| <= wall_tol
    std::vector<double> u_end;
    std::vector<double> du_end;
};
// All components stayed positive up to r_max.
struct NoHitUpTo {
    double r_reached;
};
// |u|_inf crossed the blow-up threshold (or went non-finite).
struct Blowup {
    double r_stop;
};
// Step budget exhausted or the step size underflowed.
struct StepLimit {
    double r_stop;
};
using ShotOutcome = std::variant<WallHit, NoHitUpTo, Blowup, StepLimit>;

bool is_wall_hit(const ShotOutcome& o);
bool is_no_hit(const ShotOutcome& o);
bool is_blowup(const ShotOutcome& o);
const char* outcome_name(const ShotOutcome& o);

// Dense numerical solution of u'' + (n-1)/r u' = -f(u), u(0) = alpha,
// u'(0) = 0 on [0, r_end]. Piecewise: a series segment on [0, eps] and one
// quartic interpolant per accepted step beyond that. Evaluable anywhere in
// [0, r_end]; queries outside are clamped.
class Trajectory {
public:
    struct Node {
        double r;
        std::vector<double> u;
        std::vector<double> du;
    };

    int components() const { return dim_; }
    double r_end() const { return r_end_; }
    double eps() const { return eps_; }
    const std::vector<double>& alpha() const { return alpha_; }
    const std::vector<Node>& nodes() const { return nodes_; }

    // Any of the output spans may be empty to skip that quantity.
    void eval(double r, std::span<double> u, std::span<double> du,
              std::span<double> d2u = {}) const;
    std::vector<double> value(double r) const;
    std::vector<double> deriv(double r) const;
    std::vector<double> second_deriv(double r) const;

private:
    friend class ShotIntegrator;

    struct Segment {
        double r0, h;
        // contiguous quartic interpolant coefficients, 5 blocks of 2*dim
        std::vector<double> rcont;
    };

    int dim_ = 0;          // number of components L (state is 2L)
    int n_ = 3;
    double eps_ = 0.0;
    double r_end_ = 0.0;
    std::vector<double> alpha_;
    std::vector<double> series_slope_;  // f(alpha)/n, one per component
    std::vector<Segment> segments_;
    std::vector<Node> nodes_;

    const Segment* find_segment(double r) const;
    void eval_series(double r, std::span<double> u, std::span<double> du,
                     std::span<double> d2u) const;
};

// Series start at radius eps: u_i = alpha_i - f_i(alpha) eps^2 / (2n),
// u_i' = -f_i(alpha) eps / n. Returns (u, du).
std::pair<std::vector<double>, std::vector<double>> taylor_start(
    const SystemSpec& spec, std::span<const double> alpha, double eps);

struct ShotResult {
    Trajectory trajectory;
    ShotOutcome outcome;
    long steps_accepted = 0;
    long steps_rejected = 0;
    long rhs_evals = 0;
};

// Integrates the radial system from alpha until wall contact, blow-up,
// r_max, or the step budget. alpha must be componentwise >= 0; boundary
// starts return an immediate zero-radius WallHit.
ShotResult integrate(const SystemSpec& spec, std::span<const double> alpha,
                     const ShotConfig& cfg);

// Max-norm defect of the trajectory in the ODE, probed at interior points;
// u'' is reconstructed by fourth-order central differences of the dense u'.
double residual(const Trajectory& traj, const SystemSpec& spec,
                int probe_count = 64);

}  // namespace radshoot
