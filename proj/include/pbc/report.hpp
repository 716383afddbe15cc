#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pbc/scenarios.hpp"
#include "pbc/verification.hpp"

namespace pbc {

Json vector_json(const Vector& v);
Json to_json(const CheckResult& c);
Json to_json(const VerificationReport& r);

struct LimitPeak {
    std::string label;
    double peak = 0.0;
    double bound = 0.0;
    bool ok() const { return peak <= bound; }
};

struct RunSummary {
    Metrics metrics;
    Vector final_state;
    Vector final_input;
    std::vector<double> max_abs_input;
    std::vector<LimitPeak> limits;
    std::optional<CheckResult> lyapunov;  // only when the storage is certified
    double runtime_seconds = 0.0;
};

// Throws InvariantViolation when an input leaves its saturation interval.
RunSummary summarize_run(const Scenario& sc, const SimulationTrace& tr, double runtime_seconds = 0.0);
Json to_json(const RunSummary& s, const Scenario& sc);

// Every check that applies to the scenario; evaluation failures become failed checks.
VerificationReport verify_scenario(const Scenario& sc, Exec exec = Exec::parallel);

}  // namespace pbc
