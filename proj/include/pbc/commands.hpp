#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pbc {

enum ExitCode : int { kOk = 0, kUnknownScenario = 1, kDivergence = 2, kInvariantViolation = 3 };

struct RunConfig {
    std::string command;
    std::string scenario;
    std::vector<std::string> overrides;
    std::string out_dir;  // empty: PBC_OUT_DIR, else "."
    std::uint64_t seed = 1;
    std::optional<double> dt;
    // sweep only; empty param uses the scenario's own sweep section
    std::string param;
    std::optional<std::vector<double>> values;
};

std::string resolve_out_dir(const std::string& requested);

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_list(std::ostream& out);
int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace pbc
