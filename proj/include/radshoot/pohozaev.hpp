#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "radshoot/integrator.hpp"

namespace radshoot {

// Surface area of the unit sphere in R^n.
double sphere_area(int n);

// Integral of the radial function g over the ball of radius R in R^n:
// sigma_{n-1} * int_0^R g(r) r^(n-1) dr, by adaptive composite 10-point
// Gauss-Legendre quadrature. err_est receives the accumulated estimate.
double radial_integral(const std::function<double(double)>& g, int n, double R,
                       double rel_tol = 1e-12, double* err_est = nullptr);

// A trajectory viewed through the scaling u(r) = value_scale * w(arg_scale*r)
// (which maps solutions of the power equation to solutions on other balls).
struct RadialProfile {
    std::shared_ptr<const Trajectory> traj;
    double value_scale = 1.0;
    double arg_scale = 1.0;

    int components() const { return traj ? traj->components() : 0; }
    void eval(double r, std::span<double> u, std::span<double> du,
              std::span<double> d2u = {}) const;
    std::vector<double> value(double r) const;
    std::vector<double> deriv(double r) const;
};

// A radial Dirichlet candidate on the ball of radius R: components positive
// inside, zero on the boundary.
struct BallSolution {
    double R = 0.0;
    int n = 3;
    int L = 0;
    RadialProfile profile;

    std::vector<double> boundary_deriv() const;  // u'(R)
    // quadrature knots: trajectory nodes pulled back to [0, R]
    std::vector<double> knots() const;
};

// Max-norm defect of the profile in -(u'' + (n-1)/r u') = f(u), probed away
// from the endpoints (u'' by fourth-order differences of the profile slope).
double ball_residual(const BallSolution& sol, const SystemSpec& spec,
                     int probe_count = 64);

struct IdentityReport {
    std::string identity;
    double lhs = 0.0;
    double rhs = 0.0;
    double rel_residual = 0.0;   // |lhs-rhs| / max(|lhs|, |rhs|, 1e-30)
    double quadrature_error = 0.0;
};

// Integration-by-parts identity for one component (no equation involved):
//   int [Du (r u') - (n-2)/2 u'^2] dmu  =  1/2 R^n sigma u'(R)^2,
// with Du = u'' + (n-1)/r u' and dmu = sigma r^(n-1) dr.
IdentityReport verify_rellich_identity(const BallSolution& sol, int component = 0);

// Two-component counterpart:
//   int [Du (r v') + Dv (r u') - (n-2) u'v'] dmu = sigma R^n u'(R) v'(R).
IdentityReport verify_cross_identity(const BallSolution& sol);

// Scalar power nonlinearity: for -Du = u^p, u(R) = 0,
//   sigma (n/(p+1) - (n-2)/2) int u^(p+1) r^(n-1) dr = 1/2 sigma R^n u'(R)^2.
// Requires the profile to actually solve the equation (residual <= 1e-4).
IdentityReport verify_scalar_identity(const BallSolution& sol, double p,
                                      bool enforce_residual = true);

// Merged identity for the sign-changing pair -Du = v^p (+ v^q) - u^p,
// -Dv = u^p with zero boundary values:
//   sigma [ c_p int (u^(p+1)+v^(p+1)) + c_q int v^(q+1) ] r^(n-1) dr
//     = sigma R^n (1/2 v'(R)^2 + u'(R) v'(R)),   c_s = n/(s+1) - (n-2)/2.
IdentityReport verify_merged_identity(const BallSolution& sol, double p,
                                      std::optional<double> q = std::nullopt,
                                      bool enforce_residual = true);

// Nonexistence certificate for the Dirichlet problem on every ball.
struct Certificate {
    bool certified = false;
    std::string lemma;    // triggering condition, empty when inconclusive
    std::string reason;
    double margin = 0.0;  // decisive coefficient / minimum sampled value
    long sample_count = 0;
    std::string text;     // human-readable block
};
Certificate nonexistence_certificate(const SystemSpec& spec,
                                     double box_max = 10.0,
                                     long samples = 20000,
                                     std::uint64_t seed = 7);

}  // namespace radshoot
