// decay-cert: certify decay envelopes for dissipative evolution equations
// and cross-check them against direct numerical integration.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "decaycert/run.hpp"

namespace {

void print_summary(const decaycert::RunReport& r) {
    using decaycert::CertStatus;
    const auto& c = r.certificate;
    std::printf("certificate: %s", decaycert::to_string(c.status).c_str());
    if (c.status == CertStatus::CertifiedClosedForm || c.status == CertStatus::CertifiedGrid) {
        const auto& e = c.envelope;
        if (e.kind() == decaycert::Envelope::Kind::Exponential)
            std::printf("  bound(t) = %.6g * exp(-%.6g t)", 1.0 / e.lambda(), e.rate());
        else if (e.kind() == decaycert::Envelope::Kind::PowerLaw)
            std::printf("  bound(t) = %.6g * (1+t)^-%.6g", 1.0 / e.lambda(), e.rate());
        else
            std::printf("  bound(t) = tabulated, %zu nodes", e.grid().size());
        if (c.sampled) std::printf("  [sampled grid check, margin_min = %.3e]", c.margin_min);
    } else if (!c.failed_constraint.empty()) {
        std::printf("  (%s)", c.failed_constraint.c_str());
    }
    std::printf("\n");
    if (r.dominance_checked) {
        std::printf("dominance (%s): %s  worst margin %.3e at t = %.6g over %zu points\n",
                    r.dominance_subject.c_str(), r.dominance.pass ? "pass" : "VIOLATED",
                    r.dominance.worst_margin, r.dominance.worst_time,
                    r.dominance.points_checked);
        std::printf("integrator: %ld steps (%ld accepted, %ld rejected), %ld rhs evaluations\n",
                    r.integrator.steps, r.integrator.accepted, r.integrator.rejected,
                    r.integrator.rhs_evaluations);
    }
    if (!r.error.empty()) std::printf("note: %s\n", r.error.c_str());
    std::printf("exit status: %d\n", r.exit_status);
}

int run_command(const std::string& path, const decaycert::RunOptions& opts) {
    try {
        const decaycert::Scenario sc = decaycert::load_scenario(path);
        const decaycert::RunReport report = decaycert::run_scenario(sc, opts);
        print_summary(report);
        return report.exit_status;
    } catch (const decaycert::ScenarioError& e) {
        std::cerr << e.what() << "\n";
        return decaycert::exit_code::usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return decaycert::exit_code::usage;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"certified decay envelopes for dissipative evolution equations"};
    app.require_subcommand(1);

    std::string scenario_path;
    decaycert::RunOptions opts;
    double horizon = 0, rtol = 0, atol = 0;
    int grid_points = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("scenario", scenario_path, "scenario file (JSON)")->required();
        cmd->add_option("--horizon", horizon, "override the time horizon");
        cmd->add_option("--rtol", rtol, "override the relative tolerance");
        cmd->add_option("--atol", atol, "override the absolute tolerance");
        cmd->add_option("--grid-points", grid_points, "override the certification grid size");
    };

    CLI::App* run = app.add_subcommand("run", "certify, simulate and verify dominance");
    add_common(run);
    CLI::App* certify = app.add_subcommand("certify", "certification only, no simulation");
    add_common(certify);
    CLI::App* gal = app.add_subcommand("gallery", "list built-in systems");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : decaycert::exit_code::usage;
    }

    if (gal->parsed()) {
        for (const auto& e : decaycert::gallery_catalog()) {
            std::printf("%-16s %s\n", e.name.c_str(), e.description.c_str());
            std::printf("%-16s parameters: %s\n", "", e.params.c_str());
        }
        return 0;
    }

    if (horizon > 0) opts.horizon_override = horizon;
    if (rtol > 0) opts.rtol_override = rtol;
    if (atol > 0) opts.atol_override = atol;
    if (grid_points > 0) opts.grid_points_override = grid_points;
    opts.simulate = run->parsed();
    return run_command(scenario_path, opts);
}
