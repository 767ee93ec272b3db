#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "radshoot/errors.hpp"
#include "radshoot/parallel.hpp"

namespace radshoot {

// state components this close to zero from below are treated as exactly zero
inline constexpr double kClampTol = 1e-12;
// slack used by the structural-assumption checkers
inline constexpr double kAssumeTol = 1e-9;

enum class SystemKind {
    Zero,
    LaneEmdenScalar,
    Hls,
    SignChanging,
    SignChangingPq,
    PotentialType1,
    PotentialType2,
    Custom,
};

// How f is linked to a scalar potential F(u), if at all. TypeI means
// f_i = dF/du_i; TypeII (two components only) means f_1 = dF/du_2 and
// f_2 = dF/du_1.
enum class PotentialKind { None, TypeI, TypeII };

// A first-order description of the reaction term f of -Δu_i = f_i(u) on the
// positive orthant, plus everything the checkers and reports need to know
// about it.
struct SystemSpec {
    std::string name;
    SystemKind kind = SystemKind::Custom;
    int L = 0;  // number of components
    int n = 3;  // space dimension
    std::map<std::string, double> params;
    PotentialKind potential_kind = PotentialKind::None;

    // raw field; callers are responsible for domain handling
    std::function<void(std::span<const double>, std::span<double>)> f;
    // scalar potential; empty unless potential_kind != None
    std::function<double(std::span<const double>)> potential;
    // printable component definitions, for reports
    std::vector<std::string> f_text;
    std::string potential_text;

    // Evaluates f with the domain contract: components in [-kClampTol, 0)
    // are snapped to 0, anything below -kClampTol is a DomainError.
    std::vector<double> eval_f(std::span<const double> u) const;
    void eval_f_into(std::span<const double> u, std::span<double> out) const;

    // Continuous extension used by the integrator while a trial step pokes
    // past the wall: all negative components are projected to 0, no error.
    void eval_f_projected(std::span<const double> u, std::span<double> out) const;

    double eval_potential(std::span<const double> u) const;

    double param(const std::string& key) const;
    bool has_param(const std::string& key) const;
};

// Built-in families. Every family understands an optional integer "n"
// parameter (space dimension, default 3, must be >= 3):
//   zero                -- L=2, f == 0
//   lane_emden_scalar   -- L=1, f = u1^p              (param p)
//   hls                 -- L=2, f = (u2^p, u1^q)      (params p, q)
//   sign_changing       -- L=2, f = (u2^p - u1^p, u1^p)          (param p)
//   sign_changing_pq    -- L=2, f = (u2^p + u2^q - u1^p, u1^p)   (params p, q)
//   potential_type1     -- L=2, F = -(u1-u2)^2 + u2^(p-1)*u1 + u1^(p-1)*u2,
//                          f_i = dF/du_i              (param p)
//   potential_type2     -- L=2, F = -(u1-u2)^2 + u1^p + u2^p,
//                          f_1 = dF/du2, f_2 = dF/du1 (param p)
SystemSpec builtin(const std::string& name,
                   const std::map<std::string, double>& params);

// Builds a system from expression strings over u1..uL and the given named
// parameters. potential_expr may be empty (kind must then be None).
SystemSpec make_custom_system(const std::string& name, int L, int n,
                              const std::map<std::string, double>& params,
                              const std::vector<std::string>& f_exprs,
                              const std::string& potential_expr = "",
                              PotentialKind potential_kind = PotentialKind::None);

// --- structural assumption checkers ----------------------------------------

// Does sum_i f_i(u) >= -kAssumeTol hold on [0, box_max]^L? Samples the open
// box and every boundary face (each proper zero-pattern of coordinates),
// low-discrepancy, deterministic in seed.
struct DecayReport {
    bool ok = false;
    double worst_value = 0.0;        // min of sum_i f_i over all samples
    std::vector<double> worst_point;
    long sample_count = 0;
};
DecayReport check_decay(const SystemSpec& spec, double box_max, long samples,
                        std::uint64_t seed,
                        ExecPolicy policy = ExecPolicy::Parallel);

// Near a boundary point abar (some coordinates zero, the rest positive),
// checks that the field components at the positive coordinates are dominated
// by the components at the zero coordinates:
//     sum_{abar_i > 0} |f_i(beta)|  <=  C * sum_{abar_i = 0} f_i(beta)
// for all beta in the closed orthant with |beta - abar|_inf <= delta0.
// c_est is the smallest admissible C, normalized to >= 1.
struct ControlEntry {
    std::vector<int> zero_set;       // coordinates where abar vanishes
    std::vector<double> base_point;  // abar
    double delta0 = 0.0;
    bool ok = false;
    double c_est = 1.0;
    double worst_ratio = 0.0;        // sup of the sampled ratios
    std::vector<double> worst_point;
    long sample_count = 0;
};
ControlEntry check_control_inequality(const SystemSpec& spec,
                                      std::span<const double> abar,
                                      double delta0, long samples,
                                      std::uint64_t seed,
                                      ExecPolicy policy = ExecPolicy::Parallel);

// Largest delta0 (halving sweep from delta0_start, floor 1e-4) for which
// check_control_inequality holds at abar; 0 if even the floor fails.
double certify_delta0(const SystemSpec& spec, std::span<const double> abar,
                      double delta0_start, long samples, std::uint64_t seed);

// Central finite differences of the declared potential against f, sampled on
// interior points (all coordinates >= 0.01). Relative tolerance 1e-5.
struct PotentialCheck {
    bool ok = false;
    double worst_rel_err = 0.0;
    std::vector<double> worst_point;
    long sample_count = 0;
};
PotentialCheck validate_potential(const SystemSpec& spec, long samples,
                                  std::uint64_t seed);

// Bundled report: decay on [0, box_max]^L plus one control entry per
// single-zero boundary pattern (base point = mass spread evenly over the
// nonzero coordinates, delta0 found by certify_delta0 from 0.25).
struct AssumptionReport {
    DecayReport decay;
    std::vector<ControlEntry> control_entries;
    PotentialCheck potential;  // only meaningful when a potential is declared
    long sample_count = 0;
};
AssumptionReport check_assumptions(const SystemSpec& spec, double box_max,
                                   double level_mass, long samples,
                                   std::uint64_t seed,
                                   ExecPolicy policy = ExecPolicy::Parallel);

}  // namespace radshoot
