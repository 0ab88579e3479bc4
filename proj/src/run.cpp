#include "decaycert/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace decaycert {

using nlohmann::json;

namespace {

std::string fmt17(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

json number_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

double nan_or_number(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null())
        return std::numeric_limits<double>::quiet_NaN();
    return j.at(key).get<double>();
}

json envelope_to_json(const Envelope& env) {
    json j;
    j["family"] = env.family_name();
    if (env.kind() == Envelope::Kind::Tabulated) {
        j["times"] = env.grid();
        j["values"] = env.values();
    } else {
        j["lambda"] = env.lambda();
        j["rate"] = env.rate();
    }
    return j;
}

Envelope envelope_from_json(const json& j) {
    const std::string family = j.at("family").get<std::string>();
    if (family == "exponential")
        return Envelope::exponential(j.at("lambda").get<double>(), j.at("rate").get<double>());
    if (family == "power-law")
        return Envelope::power_law(j.at("lambda").get<double>(), j.at("rate").get<double>());
    return Envelope::tabulated(j.at("times").get<std::vector<double>>(),
                               j.at("values").get<std::vector<double>>());
}

CertStatus status_from_string(const std::string& s) {
    if (s == "certified-closed-form") return CertStatus::CertifiedClosedForm;
    if (s == "certified-grid") return CertStatus::CertifiedGrid;
    if (s == "refuted") return CertStatus::Refuted;
    return CertStatus::Inconclusive;
}

}  // namespace

std::string report_to_string(const RunReport& r) {
    json doc;
    doc["scenario"] = r.scenario;

    json cert;
    cert["status"] = to_string(r.certificate.status);
    cert["envelope"] = envelope_to_json(r.certificate.envelope);
    cert["margin_min"] = number_or_null(r.certificate.margin_min);
    cert["grid"] = r.certificate.grid;
    cert["initial_ok"] = r.certificate.initial_ok;
    cert["strictness"] = to_string(r.certificate.strictness);
    cert["sampled"] = r.certificate.sampled;
    cert["failed_constraint"] = r.certificate.failed_constraint;
    cert["witness_time"] = number_or_null(r.certificate.witness_time);
    doc["certificate"] = cert;

    json feas;
    feas["lambda"] = number_or_null(r.feasibility.lambda);
    feas["rate"] = number_or_null(r.feasibility.rate);
    json checks = json::array();
    for (const auto& c : r.feasibility.constraints) {
        json jc;
        jc["name"] = c.name;
        jc["lhs"] = c.lhs;
        jc["rhs"] = c.rhs;
        jc["satisfied"] = c.satisfied;
        checks.push_back(jc);
    }
    feas["constraints"] = checks;
    doc["feasibility"] = feas;

    json dom;
    dom["checked"] = r.dominance_checked;
    if (r.dominance_checked) {
        dom["subject"] = r.dominance_subject;
        dom["pass"] = r.dominance.pass;
        dom["worst_margin"] = number_or_null(r.dominance.worst_margin);
        dom["worst_time"] = number_or_null(r.dominance.worst_time);
        dom["tolerance"] = r.dominance.tolerance;
        dom["points_checked"] = r.dominance.points_checked;
        dom["transformed_margin"] = number_or_null(r.dominance.transformed_margin);
    }
    doc["dominance"] = dom;

    json integ;
    integ["steps"] = r.integrator.steps;
    integ["accepted"] = r.integrator.accepted;
    integ["rejected"] = r.integrator.rejected;
    integ["rhs_evaluations"] = r.integrator.rhs_evaluations;
    doc["integrator"] = integ;

    doc["exit_status"] = r.exit_status;
    doc["error"] = r.error;
    return doc.dump(2) + "\n";
}

RunReport report_from_string(const std::string& text) {
    const json doc = json::parse(text);
    RunReport r;
    r.scenario = doc.at("scenario").get<std::string>();

    const json& cert = doc.at("certificate");
    r.certificate.status = status_from_string(cert.at("status").get<std::string>());
    r.certificate.envelope = envelope_from_json(cert.at("envelope"));
    r.certificate.margin_min = nan_or_number(cert, "margin_min");
    r.certificate.grid = cert.at("grid").get<std::vector<double>>();
    r.certificate.initial_ok = cert.at("initial_ok").get<bool>();
    r.certificate.strictness = cert.at("strictness").get<std::string>() == "strict"
                                   ? Strictness::Strict
                                   : Strictness::NonStrict;
    r.certificate.sampled = cert.at("sampled").get<bool>();
    r.certificate.failed_constraint = cert.at("failed_constraint").get<std::string>();
    r.certificate.witness_time = nan_or_number(cert, "witness_time");

    const json& feas = doc.at("feasibility");
    r.feasibility.lambda = nan_or_number(feas, "lambda");
    r.feasibility.rate = nan_or_number(feas, "rate");
    for (const auto& jc : feas.at("constraints")) {
        ConstraintCheck c;
        c.name = jc.at("name").get<std::string>();
        c.lhs = jc.at("lhs").get<double>();
        c.rhs = jc.at("rhs").get<double>();
        c.satisfied = jc.at("satisfied").get<bool>();
        r.feasibility.constraints.push_back(std::move(c));
    }

    const json& dom = doc.at("dominance");
    r.dominance_checked = dom.at("checked").get<bool>();
    if (r.dominance_checked) {
        r.dominance_subject = dom.at("subject").get<std::string>();
        r.dominance.pass = dom.at("pass").get<bool>();
        r.dominance.worst_margin = nan_or_number(dom, "worst_margin");
        r.dominance.worst_time = nan_or_number(dom, "worst_time");
        r.dominance.tolerance = dom.at("tolerance").get<double>();
        r.dominance.points_checked = dom.at("points_checked").get<std::size_t>();
        r.dominance.transformed_margin = nan_or_number(dom, "transformed_margin");
    }

    const json& integ = doc.at("integrator");
    r.integrator.steps = integ.at("steps").get<long>();
    r.integrator.accepted = integ.at("accepted").get<long>();
    r.integrator.rejected = integ.at("rejected").get<long>();
    r.integrator.rhs_evaluations = integ.at("rhs_evaluations").get<long>();

    r.exit_status = doc.at("exit_status").get<int>();
    r.error = doc.at("error").get<std::string>();
    return r;
}

// ---------------------------------------------------------------------------
// CSV

void emit_csv(const ScalarTrajectory* traj, const Envelope& env, double horizon,
              const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_csv: cannot open '" + path + "' for writing");
    out << csv_quote("t") << ',' << csv_quote("g") << ',' << csv_quote("bound") << ','
        << csv_quote("margin") << '\n';
    if (traj) {
        for (std::size_t i = 0; i < traj->times().size(); ++i) {
            const double t = traj->times()[i];
            const double g = traj->values()[i];
            const double b = env.bound(t);
            out << fmt17(t) << ',' << fmt17(g) << ',' << fmt17(b) << ',' << fmt17(b - g)
                << '\n';
        }
    } else {
        const int n = 257;
        const double span = std::log1p(horizon);
        for (int i = 0; i < n; ++i) {
            double t = std::expm1(span * static_cast<double>(i) / (n - 1));
            if (i == n - 1) t = horizon;
            out << fmt17(t) << ",," << fmt17(env.bound(t)) << ",\n";
        }
    }
}

// ---------------------------------------------------------------------------
// SVG

namespace {

struct PlotFrame {
    double x0 = 70, x1 = 830, y0 = 460, y1 = 40;  // SVG pixels; y grows downward
    double t_max = 1.0;
    double log_min = -2.0, log_max = 0.0;

    double x(double t) const { return x0 + (x1 - x0) * (t / t_max); }
    double y(double v) const {
        const double lv = std::log10(std::max(v, 1e-300));
        const double c = std::clamp((lv - log_min) / (log_max - log_min), 0.0, 1.0);
        return y0 + (y1 - y0) * c;
    }
};

std::string coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string label(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void polyline(std::ostream& os, const PlotFrame& f, const std::vector<double>& ts,
              const std::vector<double>& vs, const char* color) {
    os << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (i) os << ' ';
        os << coord(f.x(ts[i])) << ',' << coord(f.y(vs[i]));
    }
    os << "\"/>\n";
}

}  // namespace

void emit_svg(const ScalarTrajectory* traj, const Envelope& env, double horizon,
              const DominanceReport* dominance, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_svg: cannot open '" + path + "' for writing");

    // sample the envelope on a log grid; trajectory at its own nodes
    std::vector<double> ets, evs;
    const int n_env = 256;
    const double span = std::log1p(horizon);
    for (int i = 0; i < n_env; ++i) {
        double t = std::expm1(span * static_cast<double>(i) / (n_env - 1));
        if (i == n_env - 1) t = horizon;
        ets.push_back(t);
        evs.push_back(env.bound(t));
    }
    std::vector<double> tts, tvs;
    if (traj) {
        for (std::size_t i = 0; i < traj->times().size(); ++i) {
            if (traj->times()[i] > horizon) break;
            tts.push_back(traj->times()[i]);
            tvs.push_back(traj->values()[i]);
        }
    }

    double vmin = std::numeric_limits<double>::infinity(), vmax = 0.0;
    for (double v : evs) {
        if (v > 0) vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    for (double v : tvs) {
        if (v > 0) vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    if (!(vmax > 0)) vmax = 1.0;
    if (!std::isfinite(vmin) || vmin <= 0) vmin = vmax * 1e-6;

    PlotFrame f;
    f.t_max = horizon;
    f.log_min = std::floor(std::log10(vmin));
    f.log_max = std::ceil(std::log10(vmax));
    if (f.log_max <= f.log_min) f.log_max = f.log_min + 1;

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"860\" "
           "height=\"520\" viewBox=\"0 0 860 520\">\n"
        << "  <rect width=\"860\" height=\"520\" fill=\"white\"/>\n"
        << "  <rect x=\"70\" y=\"40\" width=\"760\" height=\"420\" fill=\"none\" "
           "stroke=\"black\"/>\n";

    // x ticks (linear)
    for (int i = 0; i <= 5; ++i) {
        const double t = horizon * i / 5.0;
        const double px = f.x(t);
        out << "  <line x1=\"" << coord(px) << "\" y1=\"460\" x2=\"" << coord(px)
            << "\" y2=\"465\" stroke=\"black\"/>\n"
            << "  <text x=\"" << coord(px) << "\" y=\"480\" font-size=\"12\" "
               "text-anchor=\"middle\" font-family=\"sans-serif\">" << label(t) << "</text>\n";
    }
    // y ticks (decades)
    int dec_step = 1;
    while ((f.log_max - f.log_min) / dec_step > 12) dec_step *= 2;
    for (double e = f.log_min; e <= f.log_max + 0.5; e += dec_step) {
        const double py = f.y(std::pow(10.0, e));
        out << "  <line x1=\"65\" y1=\"" << coord(py) << "\" x2=\"70\" y2=\"" << coord(py)
            << "\" stroke=\"black\"/>\n"
            << "  <text x=\"62\" y=\"" << coord(py + 4) << "\" font-size=\"12\" "
               "text-anchor=\"end\" font-family=\"sans-serif\">1e" << label(e) << "</text>\n";
    }
    out << "  <text x=\"450\" y=\"505\" font-size=\"13\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\">t</text>\n"
        << "  <text x=\"18\" y=\"250\" font-size=\"13\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" transform=\"rotate(-90 18 250)\">norm, bound</text>\n";

    polyline(out, f, ets, evs, "#d62728");
    if (!tts.empty()) polyline(out, f, tts, tvs, "#1f77b4");

    // legend
    out << "  <line x1=\"640\" y1=\"58\" x2=\"668\" y2=\"58\" stroke=\"#d62728\" "
           "stroke-width=\"1.5\"/>\n"
        << "  <text x=\"674\" y=\"62\" font-size=\"12\" font-family=\"sans-serif\">bound "
           "1/mu(t)</text>\n";
    if (!tts.empty())
        out << "  <line x1=\"640\" y1=\"76\" x2=\"668\" y2=\"76\" stroke=\"#1f77b4\" "
               "stroke-width=\"1.5\"/>\n"
            << "  <text x=\"674\" y=\"80\" font-size=\"12\" "
               "font-family=\"sans-serif\">trajectory</text>\n";

    if (traj && dominance && !dominance->pass) {
        const double tm = dominance->worst_time;
        const double vm = traj->value_at(tm);
        out << "  <circle cx=\"" << coord(f.x(tm)) << "\" cy=\"" << coord(f.y(vm))
            << "\" r=\"5\" fill=\"none\" stroke=\"red\" stroke-width=\"2\"/>\n"
            << "  <text x=\"" << coord(f.x(tm) + 8) << "\" y=\"" << coord(f.y(vm) - 8)
            << "\" font-size=\"12\" fill=\"red\" font-family=\"sans-serif\">violation t="
            << label(tm) << "</text>\n";
    }
    out << "</svg>\n";
}

// ---------------------------------------------------------------------------
// Pipeline

RunReport run_scenario(const Scenario& sc, const RunOptions& options) {
    RunReport report;
    report.scenario = sc.label;
    const double horizon = options.horizon_override.value_or(sc.horizon);
    const double rtol = options.rtol_override.value_or(sc.rtol);
    const double atol = options.atol_override.value_or(sc.atol);
    const int grid_points = options.grid_points_override.value_or(sc.grid_points);

    // 1. envelope selection
    Envelope env = Envelope::exponential(1.0, 1.0);
    bool have_env = false;
    try {
        if (sc.envelope_mode == Scenario::EnvelopeMode::Explicit) {
            if (!sc.envelope)
                throw std::invalid_argument("run_scenario: explicit mode without an envelope");
            env = *sc.envelope;
        } else if (sc.eps) {
            if (sc.gamma.kind() == DissipationProfile::Kind::Constant) {
                const auto r =
                    exponential_params(sc.bound.c0(), sc.bound.p(), sc.gamma.kappa_abs(), *sc.eps);
                env = Envelope::exponential(r.lambda, r.b);
            } else {
                const auto r = powerlaw_params(sc.bound.c0(), sc.bound.p(), sc.gamma.c1(),
                                               sc.gamma.q(), *sc.eps);
                env = Envelope::power_law(r.lambda, r.nu);
            }
        } else {
            env = optimize_rate(sc.bound, sc.gamma, sc.g0).envelope;
        }
        have_env = true;
    } catch (const infeasibility_error& e) {
        report.certificate.status = CertStatus::Refuted;
        report.certificate.failed_constraint = e.constraint();
        report.error = e.what();
    } catch (const std::exception& e) {
        report.certificate.status = CertStatus::Refuted;
        report.error = e.what();
    }

    // 2. certification: closed form when the families line up, grid otherwise
    if (have_env) {
        auto cf = certify_closed_form(sc.bound, sc.gamma, env, sc.g0, sc.strictness);
        if (cf.certificate.status == CertStatus::Inconclusive) {
            report.certificate =
                certify_grid(sc.bound, sc.gamma, env, sc.g0, horizon, grid_points,
                             /*refine=*/true, sc.strictness);
        } else {
            report.certificate = cf.certificate;
            report.feasibility = cf.feasibility;
        }
    }

    const bool certified = report.certificate.certified();
    if (!certified) report.exit_status = exit_code::refuted;

    // 3. simulation + dominance
    std::optional<ScalarTrajectory> traj;
    if (certified && options.simulate) {
        try {
            if (sc.system) {
                System sys = gallery(sc.system->gallery_name, sc.system->params);
                Vector u0;
                if (sc.state) {
                    u0 = Eigen::Map<const Vector>(sc.state->data(),
                                                  static_cast<Eigen::Index>(sc.state->size()));
                } else {
                    u0 = sys.default_initial(sc.g0);
                }
                VectorTrajectory vt = integrate(sys, u0, horizon, rtol, atol);
                traj = norm_trajectory(vt);
                report.dominance_subject = "system-norm";
            } else {
                traj = solve_extremal(sc.bound, sc.gamma, sc.g0, horizon, rtol, atol);
                report.dominance_subject = "extremal-scalar";
            }
            report.integrator = traj->stats();
            report.dominance = verify_envelope(*traj, env, sc.gamma);
            report.dominance_checked = true;
            report.exit_status =
                report.dominance.pass ? exit_code::ok : exit_code::dominance_broken;
        } catch (const std::exception& e) {
            report.error = e.what();
            report.exit_status = exit_code::dominance_broken;
        }
    }

    // 4. outputs
    if (have_env && !sc.csv_path.empty())
        emit_csv(traj ? &*traj : nullptr, env, horizon, sc.csv_path);
    if (have_env && !sc.svg_path.empty())
        emit_svg(traj ? &*traj : nullptr, env, horizon,
                 report.dominance_checked ? &report.dominance : nullptr, sc.svg_path);
    if (!sc.report_path.empty()) {
        std::ofstream out(sc.report_path, std::ios::binary);
        if (!out)
            throw std::runtime_error("run_scenario: cannot open '" + sc.report_path + "'");
        out << report_to_string(report);
    }
    return report;
}

}  // namespace decaycert
