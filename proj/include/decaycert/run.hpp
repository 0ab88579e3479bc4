// Scenario execution pipeline and report/CSV/SVG emission.

#ifndef DECAYCERT_RUN_HPP
#define DECAYCERT_RUN_HPP

#include <optional>
#include <string>

#include "decaycert/certifier.hpp"
#include "decaycert/comparison.hpp"
#include "decaycert/scenario.hpp"

namespace decaycert {

/// Exit statuses shared between the library pipeline and the CLI process.
namespace exit_code {
constexpr int ok = 0;               // certified and dominated
constexpr int usage = 1;            // unreadable/invalid scenario or bad flags
constexpr int refuted = 2;          // certification refuted or infeasible
constexpr int dominance_broken = 3; // certificate passed, trajectory violated it
}  // namespace exit_code

struct RunReport {
    std::string scenario;
    Certificate certificate;
    FeasibilityReport feasibility;
    bool dominance_checked = false;
    /// what was verified against the envelope: "system-norm" or "extremal-scalar"
    std::string dominance_subject;
    DominanceReport dominance;
    ode::StepStats integrator;
    int exit_status = exit_code::ok;
    std::string error;
};

/// Canonical serialized form; byte-stable under parse + re-serialize.
std::string report_to_string(const RunReport& report);
RunReport report_from_string(const std::string& text);

struct RunOptions {
    bool simulate = true;  // false: certification only
    std::optional<double> horizon_override;
    std::optional<double> rtol_override;
    std::optional<double> atol_override;
    std::optional<int> grid_points_override;
};

/// parse -> certify (closed form when applicable, grid otherwise) ->
/// simulate + dominance check -> emit files. Never throws for refutations or
/// dominance failures; those land in the report and its exit status.
RunReport run_scenario(const Scenario& scenario, const RunOptions& options = {});

/// Columns t, g, bound, margin at the trajectory nodes (17 significant
/// digits, RFC-4180 quoting). Without a trajectory, g and margin are empty
/// and the envelope is sampled on a log grid.
void emit_csv(const ScalarTrajectory* traj, const Envelope& env, double horizon,
              const std::string& path);

/// Self-contained SVG decay plot: log-scale vertical axis, trajectory and
/// envelope curves, a marker at the worst violation when dominance failed.
/// Output is deterministic for fixed inputs.
void emit_svg(const ScalarTrajectory* traj, const Envelope& env, double horizon,
              const DominanceReport* dominance, const std::string& path);

}  // namespace decaycert

#endif
