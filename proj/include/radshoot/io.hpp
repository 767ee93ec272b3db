#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "radshoot/degree.hpp"
#include "radshoot/dirichlet.hpp"

namespace radshoot {

using ordered_json = nlohmann::ordered_json;

// 17 significant digits: round-trips every double
std::string format_full(double v);

// non-finite doubles serialize as the strings "inf" / "-inf" / "nan"
ordered_json json_num(double v);
ordered_json json_vec(const std::vector<double>& v);

// CSV is RFC-4180-flavored: header row, comma separator, "\n" line ends,
// full-precision numbers; non-finite values spell as inf / -inf / nan.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, int points);
// trajectory schema plus a leading "# R=<R> n=<n>" annotation line
void write_ball_csv(std::ostream& os, const BallSolution& sol, int points);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, int L);
void write_trace_csv(std::ostream& os, const SolutionCandidate& cand);

ordered_json outcome_json(const ShotOutcome& outcome, const ShotResult& res);
ordered_json degree_json(const DegreeReport& rep);
ordered_json candidate_json(const SolutionCandidate& cand);
ordered_json dirichlet_json(const DirichletResult& res);
ordered_json identity_json(const IdentityReport& rep);
ordered_json certificate_json(const Certificate& cert);
ordered_json assumptions_json(const AssumptionReport& rep);

// structured diagnostic for the error stream: stable type tags plus the
// carried detail fields
ordered_json error_json(const std::exception& e);

// python stub that plots whichever of a run's CSV files are present
std::string plot_stub();

}  // namespace radshoot
