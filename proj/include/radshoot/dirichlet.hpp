#pragma once

#include <limits>
#include <string>
#include <variant>

#include "radshoot/pohozaev.hpp"

namespace radshoot {

struct DirichletFound {
    BallSolution solution;
    long shots = 0;
};

struct DirichletNotFound {
    double best_gap = std::numeric_limits<double>::infinity();
    long attempts = 0;
    std::string reason;
};

using DirichletResult = std::variant<DirichletFound, DirichletNotFound>;

inline bool dirichlet_found(const DirichletResult& r) {
    return std::holds_alternative<DirichletFound>(r);
}

// Positive radial solution of -(u'' + (n-1)/r u') = u^p on the ball of radius
// R with u(R) = 0, by shooting from height 1 and rescaling the first zero to
// R.  Subcritical exponents only: for p outside (1, (n+2)/(n-2)) the problem
// has no positive solution and NotFound{"certified nonexistent"} comes back
// without any integration.
DirichletResult solve_dirichlet_scalar(double p, int n, double R,
                                       const ShotConfig& cfg = {});

// Simultaneous-vanishing search for a two-component system: walk the curve
// where the first-hit index switches (inner bisection over the splitting of
// mass s between the components), then adjust the level s until the common
// hit radius lands on R (outer bisection in log s over [a_lo, a_hi]).  Found
// requires both components below 10*wall_tol at the hit radius, the radius
// within 1e-6 relative of R, and positivity inside.  Every trajectory
// integration counts against the budget; exhaustion folds into NotFound with
// the best gap seen.
DirichletResult solve_dirichlet_system(const SystemSpec& spec, double a_lo,
                                       double a_hi, double R,
                                       const ShotConfig& cfg = {},
                                       long budget = 1000);

}  // namespace radshoot
