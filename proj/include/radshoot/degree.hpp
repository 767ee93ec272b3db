#pragma once

#include <functional>
#include <optional>

#include "radshoot/target_map.hpp"

namespace radshoot {

// A self-map of the level set; empty result means "undefined here" (NoHit).
using SimplexMap = std::function<std::optional<SimplexPoint>(const SimplexPoint&)>;

// Adaptor: the wall-image map of a system as a SimplexMap.
SimplexMap phi_map(const SystemSpec& spec, const ShotConfig& cfg);

enum class DegreeMethod { IntervalSignCount, BoundaryWinding, HeuristicPreimage };

const char* degree_method_name(DegreeMethod m);

struct DegreeReport {
    int degree = 0;
    DegreeMethod method = DegreeMethod::IntervalSignCount;
    int resolution = 0;
    bool certified = false;  // the L >= 4 path is a flagged heuristic
    int excluded = 0;        // lattice points where the map was undefined
    long map_evals = 0;
    std::vector<double> target;
};

// Brouwer degree of the map over the open level set with respect to target.
// Dispatches on dimension: a signed-crossing count of the first image
// coordinate (two components), the winding number of the boundary image
// (three components), or a flagged preimage-counting heuristic (more).
// The target must be interior and at least two cells away from every
// boundary image; violations throw TargetOnBoundaryImage / GridTooCoarse.
DegreeReport degree(const SimplexMap& map, const SimplexGrid& grid,
                    const SimplexPoint& target,
                    ExecPolicy policy = ExecPolicy::Parallel);

struct SolutionCandidate {
    SimplexPoint alpha0;
    double achieved_r = 0.0;  // wall radius at the candidate (r_max if no hit)
    double score = 0.0;       // sum of the wall image; 0 at a ground state
    double bracket_lo = 0.0, bracket_hi = 0.0;  // final bracket (L=2)
    int shots = 0;
    bool no_hit = false;  // a shot never reached the wall: candidate found

    struct TraceRow {
        int iter;
        double t_lo, t_hi, t_mid;
        double r_mid;
        int hit_index;
    };
    std::vector<TraceRow> trace;  // bisection history (L=2)
};

// Searches the level set for an initial value whose shot never returns to
// the wall. Two components: bisection on the index of the first component
// to hit; a NoHit midpoint recenters the bracket on itself and the halving
// continues down to a relative width of 1e-10. More components: coarse scan
// plus local pattern search on the best cells. A NoHit shot during the
// coarse scan ends the search immediately (that is the candidate). Throws
// NoSwitchFound when the two-component scan sees a constant hit index.
SolutionCandidate find_zero(const SystemSpec& spec, double a,
                            const ShotConfig& cfg, int budget);

struct OntoResult {
    bool found = false;
    SimplexPoint alpha;        // best preimage found
    std::vector<double> image; // psi at alpha (empty if no-hit)
    double residual = 0.0;     // |psi(alpha) - target|_inf
    int shots = 0;
};

// Finds alpha with psi(alpha) within 1e-4 * a (max-norm) of the requested
// wall point. Boundary targets are returned directly (psi fixes them).
OntoResult onto_witness(const SystemSpec& spec, double a,
                        std::span<const double> target, const ShotConfig& cfg,
                        int budget);

}  // namespace radshoot
