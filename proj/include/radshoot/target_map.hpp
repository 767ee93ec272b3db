#pragma once

#include <optional>

#include "radshoot/integrator.hpp"
#include "radshoot/simplex.hpp"

namespace radshoot {

// Where the shot from alpha first meets the orthant boundary. Boundary
// starts are their own wall contact: psi fixes them with r_alpha = 0.
struct TargetResult {
    std::optional<std::vector<double>> value;  // empty on NoHit
    double r_alpha = 0.0;                      // +inf on NoHit
    std::vector<int> hit_set;
    ShotOutcome outcome;

    bool no_hit() const { return !value.has_value(); }
};

// Throws BlowupError when the shot blows up and IntegrationError when it
// stalls; NoHit is reported in-band.
TargetResult psi(const SystemSpec& spec, const SimplexPoint& p,
                 const ShotConfig& cfg);

// pi o psi: the wall image pushed back onto the level set. Empty on NoHit.
std::optional<SimplexPoint> phi(const SystemSpec& spec, const SimplexPoint& p,
                                const ShotConfig& cfg);

// Checks that shots started delta-close (max-norm, on the level set) to the
// boundary point abar stay B*delta-close to it for all radii up to wall
// contact, with B = max(2*(3+L)*C, (3+C)*L).
struct EstimateCheck {
    bool ok = false;
    double bound_used = 0.0;    // B * delta
    double worst_m = 0.0;       // sup over samples of sup_r |u - abar|_inf
    double ratio_claim = 0.0;   // worst_m / (2*(3+L)*C*delta)
    double ratio_chain = 0.0;   // worst_m / ((3+C)*L*delta)
    int sample_count = 0;
    int skipped = 0;            // NoHit or blow-up samples
};
EstimateCheck dynamic_estimate_check(const SystemSpec& spec,
                                     std::span<const double> abar,
                                     double c_control, double delta,
                                     int samples, const ShotConfig& cfg,
                                     ExecPolicy policy = ExecPolicy::Parallel);

// Sign of d/dr min_i u_i at wall contact; transversal means the trajectory
// crosses the wall with negative slope rather than grazing it.
struct Transversality {
    double omega_slope = 0.0;
    bool transversal = false;
    double r_alpha = 0.0;
    std::vector<int> hit_set;
};
Transversality transversality_check(const SystemSpec& spec,
                                    const SimplexPoint& p,
                                    const ShotConfig& cfg);

// One psi evaluation per grid point, ready for CSV export.
struct SweepRow {
    std::vector<double> alpha;
    double r_alpha = 0.0;       // inf for no-hit, nan for blow-up/stall
    unsigned hit_mask = 0;      // bit i set when component i is in the hit set
    std::vector<double> value;  // psi; NaNs when absent
    std::string outcome;
};
std::vector<SweepRow> sweep_psi(const SystemSpec& spec, const SimplexGrid& grid,
                                const ShotConfig& cfg,
                                ExecPolicy policy = ExecPolicy::Parallel);

}  // namespace radshoot
