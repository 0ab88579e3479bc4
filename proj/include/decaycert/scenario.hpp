// Scenario files: a single JSON document describing the system (or
// scalar-only problem), the scalar majorants, the envelope request, initial
// data, integration window and output paths. Parsing validates everything
// up front and reports all violations in one aggregated error.

#ifndef DECAYCERT_SCENARIO_HPP
#define DECAYCERT_SCENARIO_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "decaycert/certifier.hpp"
#include "decaycert/dynamics.hpp"
#include "decaycert/scalar_model.hpp"

namespace decaycert {

class ScenarioError : public std::runtime_error {
public:
    explicit ScenarioError(std::vector<std::string> issues);
    const std::vector<std::string>& issues() const { return issues_; }

private:
    static std::string join(const std::vector<std::string>& issues);
    std::vector<std::string> issues_;
};

struct ScenarioSystem {
    std::string gallery_name;
    GalleryParams params;
};

struct Scenario {
    std::string label;                     // origin path or caller-given name
    std::optional<ScenarioSystem> system;  // absent: scalar-only run
    NonlinearityBound bound = NonlinearityBound::zero();
    DissipationProfile gamma = DissipationProfile::constant(1.0);

    enum class EnvelopeMode { Auto, Explicit };
    EnvelopeMode envelope_mode = EnvelopeMode::Auto;
    std::optional<double> eps;           // Auto with eps: closed-form recipe;
                                         // Auto without: tightest-rate search
    std::optional<Envelope> envelope;    // Explicit only

    double g0 = 0.0;
    std::optional<std::vector<Complex>> state;

    double horizon = 0.0;
    double rtol = 1e-9;
    double atol = 1e-12;
    int grid_points = 512;
    Strictness strictness = Strictness::NonStrict;

    std::string csv_path;     // empty: skip
    std::string svg_path;     // empty: skip
    std::string report_path;  // empty: skip
};

/// Parses and fully validates a scenario file. Throws ScenarioError listing
/// every violation at once.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& text, const std::string& origin = "<memory>");

}  // namespace decaycert

#endif
