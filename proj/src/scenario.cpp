#include "decaycert/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace decaycert {

using nlohmann::json;

ScenarioError::ScenarioError(std::vector<std::string> issues)
    : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

std::string ScenarioError::join(const std::vector<std::string>& issues) {
    std::ostringstream os;
    os << "invalid scenario (" << issues.size() << " issue" << (issues.size() == 1 ? "" : "s")
       << "):";
    for (const auto& m : issues) os << "\n  - " << m;
    return os.str();
}

namespace {

class Collector {
public:
    template <class Fn>
    void section(const std::string& where, Fn&& fn) {
        try {
            fn();
        } catch (const ScenarioError&) {
            throw;  // already aggregated
        } catch (const std::exception& e) {
            issues_.push_back(where + ": " + e.what());
        }
    }
    void add(const std::string& msg) { issues_.push_back(msg); }
    void throw_if_any() const {
        if (!issues_.empty()) throw ScenarioError(issues_);
    }

private:
    std::vector<std::string> issues_;
};

double need_number(const json& j, const char* key) {
    if (!j.contains(key)) throw std::runtime_error(std::string("missing key '") + key + "'");
    if (!j.at(key).is_number()) throw std::runtime_error(std::string("'") + key + "' must be a number");
    return j.at(key).get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw std::runtime_error(std::string("'") + key + "' must be a number");
    return j.at(key).get<double>();
}

std::vector<double> need_array(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_array())
        throw std::runtime_error(std::string("missing numeric array '") + key + "'");
    return j.at(key).get<std::vector<double>>();
}

DissipationProfile parse_gamma(const json& j) {
    const std::string type = j.value("type", "");
    if (type == "constant") return DissipationProfile::constant(need_number(j, "kappa"));
    if (type == "power-law")
        return DissipationProfile::power_law(need_number(j, "c1"), need_number(j, "q"));
    if (type == "tabulated")
        return DissipationProfile::tabulated(need_array(j, "times"), need_array(j, "values"));
    throw std::runtime_error("'type' must be one of constant|power-law|tabulated");
}

NonlinearityBound parse_bound(const json& j) {
    if (j.value("zero", false)) return NonlinearityBound::zero();
    return NonlinearityBound::power(need_number(j, "c0"), need_number(j, "p"));
}

Envelope parse_explicit_envelope(const json& j) {
    const std::string family = j.value("family", "");
    if (family == "exponential")
        return Envelope::exponential(need_number(j, "lambda"), need_number(j, "b"));
    if (family == "power-law")
        return Envelope::power_law(need_number(j, "lambda"), need_number(j, "nu"));
    if (family == "tabulated")
        return Envelope::tabulated(need_array(j, "times"), need_array(j, "values"));
    throw std::runtime_error("'family' must be one of exponential|power-law|tabulated");
}

std::vector<Complex> parse_state(const json& arr) {
    std::vector<Complex> out;
    out.reserve(arr.size());
    for (const auto& e : arr) {
        if (e.is_number()) {
            out.emplace_back(e.get<double>(), 0.0);
        } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
            out.emplace_back(e[0].get<double>(), e[1].get<double>());
        } else {
            throw std::runtime_error("state entries must be numbers or [re, im] pairs");
        }
    }
    if (out.empty()) throw std::runtime_error("state must be non-empty");
    return out;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const std::exception& e) {
        throw ScenarioError({origin + ": not valid JSON: " + e.what()});
    }
    if (!doc.is_object()) throw ScenarioError({origin + ": top level must be an object"});

    Collector issues;
    Scenario sc;
    sc.label = origin;

    issues.section("system", [&] {
        if (!doc.contains("system") || doc.at("system").is_null()) return;
        const json& j = doc.at("system");
        if (j.is_string() && j.get<std::string>() == "scalar-only") return;
        if (!j.is_object() || !j.contains("gallery"))
            throw std::runtime_error("must be \"scalar-only\" or {\"gallery\": ..., \"params\": ...}");
        ScenarioSystem ss;
        ss.gallery_name = j.at("gallery").get<std::string>();
        if (j.contains("params")) {
            for (const auto& [key, value] : j.at("params").items()) {
                if (key == "rates") {
                    ss.params.rates = value.get<std::vector<double>>();
                } else if (value.is_number()) {
                    ss.params.scalars[key] = value.get<double>();
                } else {
                    throw std::runtime_error("param '" + key + "' must be a number");
                }
            }
        }
        gallery(ss.gallery_name, ss.params);  // rejects unknown names/params now
        sc.system = std::move(ss);
    });

    issues.section("nonlinearity", [&] {
        if (!doc.contains("nonlinearity"))
            throw std::runtime_error("missing section");
        sc.bound = parse_bound(doc.at("nonlinearity"));
    });

    issues.section("gamma", [&] {
        if (!doc.contains("gamma")) throw std::runtime_error("missing section");
        sc.gamma = parse_gamma(doc.at("gamma"));
    });

    issues.section("envelope", [&] {
        if (!doc.contains("envelope")) return;  // defaults to auto
        const json& j = doc.at("envelope");
        const std::string mode = j.value("mode", j.contains("family") ? "explicit" : "auto");
        if (mode == "auto") {
            sc.envelope_mode = Scenario::EnvelopeMode::Auto;
            if (j.contains("eps")) sc.eps = need_number(j, "eps");
        } else if (mode == "explicit") {
            sc.envelope_mode = Scenario::EnvelopeMode::Explicit;
            sc.envelope = parse_explicit_envelope(j);
        } else {
            throw std::runtime_error("'mode' must be auto or explicit");
        }
    });

    issues.section("initial", [&] {
        if (!doc.contains("initial")) throw std::runtime_error("missing section");
        const json& j = doc.at("initial");
        if (j.contains("state")) {
            sc.state = parse_state(j.at("state"));
            double n2 = 0.0;
            for (const auto& z : *sc.state) n2 += std::norm(z);
            sc.g0 = std::sqrt(n2);
        } else {
            sc.g0 = need_number(j, "g0");
            if (!(sc.g0 >= 0.0)) throw std::runtime_error("g0 must be nonnegative");
        }
    });

    issues.section("time", [&] {
        if (!doc.contains("time")) throw std::runtime_error("missing section");
        const json& j = doc.at("time");
        sc.horizon = need_number(j, "horizon");
        if (!(sc.horizon > 0.0)) throw std::runtime_error("horizon must be positive");
        sc.rtol = number_or(j, "rtol", 1e-9);
        sc.atol = number_or(j, "atol", 1e-12);
        if (!(sc.rtol > 0.0) || !(sc.atol > 0.0))
            throw std::runtime_error("tolerances must be positive");
        const double gp = number_or(j, "grid_points", 512.0);
        sc.grid_points = static_cast<int>(gp);
        if (sc.grid_points < 2) throw std::runtime_error("grid_points must be at least 2");
    });

    issues.section("strictness", [&] {
        if (!doc.contains("strictness")) return;
        const std::string s = doc.at("strictness").get<std::string>();
        if (s == "strict") sc.strictness = Strictness::Strict;
        else if (s == "non-strict") sc.strictness = Strictness::NonStrict;
        else throw std::runtime_error("must be strict or non-strict");
    });

    issues.section("outputs", [&] {
        if (!doc.contains("outputs")) return;
        const json& j = doc.at("outputs");
        sc.csv_path = j.value("csv", "");
        sc.svg_path = j.value("svg", "");
        sc.report_path = j.value("report", "");
    });

    // cross-field checks
    issues.section("consistency", [&] {
        if (sc.system) {
            const auto sys = gallery(sc.system->gallery_name, sc.system->params);
            if (sc.state && static_cast<int>(sc.state->size()) != sys.dim())
                throw std::runtime_error("state dimension does not match the system");
            // the certified majorants must be the ones the system declares,
            // otherwise the dominance check would test a different claim
            auto close = [](double a, double b) {
                return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
            };
            if (sys.declared_bound()) {
                const auto& db = *sys.declared_bound();
                if (!sc.bound.is_power() || !close(db.c0(), sc.bound.c0()) ||
                    !close(db.p(), sc.bound.p()))
                    throw std::runtime_error(
                        "nonlinearity section disagrees with the system's declared bound");
            } else if (!sc.bound.is_zero()) {
                throw std::runtime_error(
                    "system is linear; use {\"zero\": true} for the nonlinearity");
            }
            if (sys.declared_gamma()) {
                const auto& dg = *sys.declared_gamma();
                const bool same =
                    dg.kind() == sc.gamma.kind() &&
                    (dg.kind() == DissipationProfile::Kind::Constant
                         ? close(dg.kappa_abs(), sc.gamma.kappa_abs())
                         : close(dg.c1(), sc.gamma.c1()) && close(dg.q(), sc.gamma.q()));
                if (!same)
                    throw std::runtime_error(
                        "gamma section disagrees with the system's declared profile");
            } else {
                // no declared profile: test the scenario's dissipativity claim
                // through the numerical abscissa at sampled times
                for (int k = 0; k < 8; ++k) {
                    const double t = sc.horizon > 0 ? sc.horizon * k / 7.0 : k / 7.0;
                    if (dissipativity_estimate(sys.A(t), 0) > -sc.gamma.value(t) + 1e-9)
                        throw std::runtime_error(
                            "the system does not satisfy the claimed dissipation profile "
                            "(numerical abscissa too large at t=" + std::to_string(t) + ")");
                }
            }
        }
        if (sc.state && !sc.system)
            throw std::runtime_error("a state vector needs a system; scalar-only runs use g0");
        if (sc.gamma.max_time() < sc.horizon)
            throw std::runtime_error("tabulated gamma does not cover the horizon");
        if (sc.envelope && sc.envelope->max_time() < sc.horizon)
            throw std::runtime_error("tabulated envelope does not cover the horizon");
        if (sc.envelope_mode == Scenario::EnvelopeMode::Auto && !sc.bound.is_power())
            throw std::runtime_error("auto envelopes need a power nonlinearity; "
                                     "specify an explicit envelope instead");
        if (sc.envelope_mode == Scenario::EnvelopeMode::Auto &&
            sc.gamma.kind() == DissipationProfile::Kind::Tabulated)
            throw std::runtime_error("auto envelopes need a constant or power-law gamma");
    });

    issues.throw_if_any();
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError({path + ": cannot open scenario file"});
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path);
}

}  // namespace decaycert
