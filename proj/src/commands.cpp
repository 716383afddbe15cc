#include "pbc/commands.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pbc/csv.hpp"
#include "pbc/errors.hpp"
#include "pbc/report.hpp"
#include "pbc/scenario_io.hpp"

namespace pbc {

namespace fs = std::filesystem;

std::string resolve_out_dir(const std::string& requested) {
    if (!requested.empty()) return requested;
    if (const char* env = std::getenv("PBC_OUT_DIR"); env && *env) return env;
    return ".";
}

namespace {

std::ofstream open_out(const fs::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + p.string());
    return f;
}

std::vector<std::string> overrides_of(const RunConfig& cfg) {
    auto o = cfg.overrides;
    if (cfg.dt) o.push_back("dt=" + format_number(*cfg.dt));
    return o;
}

struct RunOutcome {
    int code = kOk;
    std::string message;
    std::optional<RunSummary> summary;
};

// Simulates one resolved scenario and writes its trace and metrics.
RunOutcome run_one(const Scenario& sc, const fs::path& dir, const std::string& stem) {
    RunOutcome res;
    try {
        const ClosedLoop loop = sc.loop();
        const auto start = std::chrono::steady_clock::now();
        const auto tr = simulate(loop, loop.initial_state(sc.x0), sc.t0, sc.tf, sc.dt, {sc.substeps});
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        {
            auto f = open_out(dir / (stem + ".trace.csv"));
            write_trace_csv(f, tr);
        }
        auto summary = summarize_run(sc, tr, secs);
        auto f = open_out(dir / (stem + ".metrics.json"));
        f << to_json(summary, sc).dump(2) << '\n';
        res.summary = std::move(summary);
    } catch (const DivergenceError& e) {
        res.code = kDivergence;
        res.message = e.what();
    } catch (const InvariantViolation& e) {
        res.code = kInvariantViolation;
        res.message = e.what();
    }
    return res;
}

}  // namespace

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Scenario sc = load_scenario(cfg.scenario, overrides_of(cfg), cfg.seed);
    const fs::path dir = resolve_out_dir(cfg.out_dir);
    fs::create_directories(dir);
    const auto res = run_one(sc, dir, sc.name);
    if (res.code != kOk) {
        err << "error: " << res.message << '\n';
        return res.code;
    }
    out << "wrote " << (dir / (sc.name + ".trace.csv")).string() << " and " << (dir / (sc.name + ".metrics.json")).string() << "\n";
    return kOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    const Scenario sc = load_scenario(cfg.scenario, overrides_of(cfg), cfg.seed);
    const fs::path dir = resolve_out_dir(cfg.out_dir);
    fs::create_directories(dir);
    const auto report = verify_scenario(sc);
    auto f = open_out(dir / (sc.name + ".verify.json"));
    f << to_json(report).dump(2) << '\n';
    for (const auto& c : report.checks)
        out << (c.pass ? "PASS " : "FAIL ") << c.name << " residual=" << format_number(c.residual)
            << " tol=" << format_number(c.tolerance) << '\n';
    return report.all_pass() ? kOk : 1;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    std::string name;
    Json base = resolve_config(cfg.scenario, &name);
    for (const auto& o : overrides_of(cfg)) apply_override(base, o);

    std::string param = cfg.param;
    std::vector<double> values;
    if (cfg.values) values = *cfg.values;
    if (param.empty() || !cfg.values) {
        const Scenario probe = build_scenario(name, base, cfg.seed);
        if (param.empty() && probe.sweep) param = probe.sweep->param;
        if (!cfg.values && probe.sweep) values = probe.sweep->values;
    }
    if (param.empty() && !values.empty()) throw ConfigError("sweep needs --param");
    if (!param.empty() && param.find('.') == std::string::npos) param = "controller." + param;
    if (!param.empty() && param.rfind("controller.", 0) != 0) throw ConfigError("sweep parameter must be a controller key");

    // Resolve every member before running so configuration errors surface first.
    std::vector<Scenario> runs;
    for (std::size_t i = 0; i < values.size(); ++i) {
        Json c = base;
        c.erase("sweep");
        set_config_value(c, param, values[i]);
        runs.push_back(build_scenario(name, c, cfg.seed));
    }

    const fs::path dir = resolve_out_dir(cfg.out_dir);
    fs::create_directories(dir);
    const std::string key = param.empty() ? std::string("param") : param.substr(param.find('.') + 1);
    std::vector<std::string> stems(runs.size());
    for (std::size_t i = 0; i < runs.size(); ++i) stems[i] = name + "." + key + "-" + std::to_string(i + 1);

    std::vector<RunOutcome> outcomes(runs.size());
    const long count = static_cast<long>(runs.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < count; ++i) {
        try {
            outcomes[i] = run_one(runs[i], dir, stems[i]);
        } catch (const std::exception& e) {
            outcomes[i].code = kUnknownScenario;
            outcomes[i].message = e.what();
        }
    }

    const int m = runs.empty() ? 0 : runs.front().plant.m;
    const std::size_t tracked = runs.empty() ? 0 : runs.front().tracked.size();
    CsvTable table;
    table.header = {"run", "value", "status"};
    for (int i = 1; i <= m; ++i) table.header.push_back("max_abs_u" + std::to_string(i));
    for (int i = 1; i <= m; ++i) table.header.push_back("touches_u" + std::to_string(i));
    for (int i = 1; i <= m; ++i) table.header.push_back("last_touch_u" + std::to_string(i));
    for (std::size_t c = 0; c < tracked; ++c) {
        const std::string ch = "x" + std::to_string(runs.front().tracked[c] + 1);
        table.header.push_back("steady_state_error_" + ch);
        table.header.push_back("oscillations_" + ch);
    }
    table.header.push_back("settling_time");

    int code = kOk;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& o = outcomes[i];
        std::vector<std::string> row{stems[i], format_number(values[i]), o.code == kOk ? "ok" : o.message};
        for (auto& cell : row) {
            for (auto& ch : cell) {
                if (ch == ',' || ch == '\n') ch = ';';
            }
        }
        if (o.summary) {
            const auto& s = *o.summary;
            for (int k = 0; k < m; ++k) row.push_back(format_number(s.max_abs_input[k]));
            for (int k = 0; k < m; ++k)
                row.push_back(std::to_string(s.metrics.saturation_intervals[k].size()));
            for (int k = 0; k < m; ++k) {
                const auto& iv = s.metrics.saturation_intervals[k];
                row.push_back(iv.empty() ? "nan" : format_number(iv.back().hi));
            }
            for (std::size_t c = 0; c < tracked; ++c) {
                row.push_back(format_number(s.metrics.steady_state_error[c]));
                row.push_back(std::to_string(s.metrics.oscillation_count[c]));
            }
            row.push_back(format_number(s.metrics.settling_time));
        } else {
            row.resize(table.header.size(), "nan");
            err << "run " << stems[i] << " failed: " << o.message << '\n';
        }
        table.rows.push_back(std::move(row));
        code = std::max(code, o.code);
    }
    auto f = open_out(dir / (name + ".sweep.csv"));
    write_csv(f, table);
    out << "sweep " << name << ": " << runs.size() << " run(s), summary " << (dir / (name + ".sweep.csv")).string()
        << '\n';
    return code;
}

int cmd_list(std::ostream& out) {
    for (const auto& d : builtin_scenarios()) {
        out << d.name;
        for (const auto& a : d.aliases) out << " (" << a << ")";
        out << "  " << d.summary << '\n';
    }
    return kOk;
}

int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        if (cfg.command == "list") return cmd_list(out);
        if (cfg.scenario.empty()) {
            err << "error: --scenario is required\n";
            return kUnknownScenario;
        }
        if (!is_known_scenario(cfg.scenario)) {
            err << "error: unknown scenario '" << cfg.scenario << "'\n";
            return kUnknownScenario;
        }
        if (cfg.command == "simulate") return cmd_simulate(cfg, out, err);
        if (cfg.command == "verify") return cmd_verify(cfg, out, err);
        if (cfg.command == "sweep") return cmd_sweep(cfg, out, err);
        err << "error: unknown command '" << cfg.command << "'\n";
        return kUnknownScenario;
    } catch (const DivergenceError& e) {
        err << "error: " << e.what() << '\n';
        return kDivergence;
    } catch (const InvariantViolation& e) {
        err << "error: " << e.what() << '\n';
        return kInvariantViolation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUnknownScenario;
    }
}

}  // namespace pbc
