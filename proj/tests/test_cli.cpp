#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pbc/commands.hpp"
#include "pbc/csv.hpp"
#include "pbc/errors.hpp"

using namespace pbc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("pbc-cli-" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

int invoke(RunConfig cfg, std::string* out_text = nullptr) {
    std::ostringstream out, err;
    const int code = run_command(cfg, out, err);
    if (out_text) *out_text = out.str() + err.str();
    return code;
}

RunConfig config(const std::string& command, const std::string& scenario, const fs::path& dir) {
    RunConfig c;
    c.command = command;
    c.scenario = scenario;
    c.out_dir = dir.string();
    return c;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("unknown scenario exits with 1") {
    const auto dir = scratch("unknown");
    std::string text;
    CHECK(invoke(config("simulate", "no-such-scenario", dir), &text) == kUnknownScenario);
    CHECK(text.find("no-such-scenario") != std::string::npos);
    auto bad = config("simulate", "rlc-default", dir);
    bad.overrides = {"controller.nope=1"};
    CHECK(invoke(bad) == kUnknownScenario);
}

TEST_CASE("simulate writes a loadable trace and metrics") {
    const auto dir = scratch("simulate");
    auto cfg = config("simulate", "rlc-default", dir);
    REQUIRE(invoke(cfg) == kOk);
    const auto table = read_csv_file((dir / "rlc-default.trace.csv").string());
    CHECK_NOTHROW(validate_trace_table(table));
    CHECK(table.header == std::vector<std::string>{"t", "x1", "x2", "x3", "xc1", "u1", "storage"});
    const auto u = table.numeric_column("u1");
    CHECK(std::abs(u.back() - 3.0515) <= 1e-3);
    CHECK(table.numeric_column("t").back() == 0.5);

    std::ifstream mf(dir / "rlc-default.metrics.json");
    const auto metrics = nlohmann::json::parse(mf);
    CHECK(metrics.contains("steady_state_error"));

    // Second run is byte-identical.
    const std::string first = slurp(dir / "rlc-default.trace.csv");
    REQUIRE(invoke(cfg) == kOk);
    CHECK(slurp(dir / "rlc-default.trace.csv") == first);
    CHECK(first.find('\r') == std::string::npos);
}

TEST_CASE("halving the step leaves the final state unchanged") {
    const auto dir = scratch("halving");
    auto a = config("simulate", "rlc-default", dir / "a");
    auto b = config("simulate", "rlc-default", dir / "b");
    b.dt = 5e-6;
    REQUIRE(invoke(a) == kOk);
    REQUIRE(invoke(b) == kOk);
    const auto ta = read_csv_file((dir / "a" / "rlc-default.trace.csv").string());
    const auto tb = read_csv_file((dir / "b" / "rlc-default.trace.csv").string());
    CHECK(tb.rows.size() == 2 * ta.rows.size() - 1);
    for (const char* col : {"x1", "x2", "x3", "xc1"}) {
        INFO(col);
        CHECK(std::abs(ta.numeric_column(col).back() - tb.numeric_column(col).back()) <= 1e-6);
    }
}

TEST_CASE("divergence exits with 2") {
    const auto dir = scratch("diverge");
    auto cfg = config("simulate", "rlc-default", dir);
    cfg.dt = 1e-2;
    std::string text;
    CHECK(invoke(cfg, &text) == kDivergence);
}

TEST_CASE("verify reports") {
    const auto dir = scratch("verify");
    std::string text;
    CHECK(invoke(config("verify", "rlc-default", dir), &text) == kOk);
    CHECK(text.find("FAIL") == std::string::npos);
    std::ifstream f(dir / "rlc-default.verify.json");
    const auto report = nlohmann::json::parse(f);
    CHECK(report["checks"].size() == 7);

    auto zero = config("verify", "coupling-device-ii", dir);
    zero.overrides = {"controller.alpha_c=0"};
    CHECK(invoke(zero) != kOk);

    REQUIRE(invoke(config("verify", "pera-filtered", dir)) != kUnknownScenario);
    std::ifstream g(dir / "pera-filtered.verify.json");
    const auto filtered = nlohmann::json::parse(g);
    bool found = false;
    for (const auto& c : filtered["checks"]) {
        if (c["name"] == "linearization_stability") {
            found = true;
            CHECK(c["pass"] == true);
            CHECK(c["residual"].get<double>() < 0.0);
        }
    }
    CHECK(found);
}

TEST_CASE("sweeps") {
    const auto dir = scratch("sweep");
    auto empty = config("sweep", "rlc-default", dir);
    empty.param = "beta_c";
    empty.values = std::vector<double>{};
    REQUIRE(invoke(empty) == kOk);
    const auto none = read_csv_file((dir / "rlc-default.sweep.csv").string());
    CHECK(none.rows.empty());

    auto beta = config("sweep", "rlc-beta-sweep", dir);
    REQUIRE(invoke(beta) == kOk);
    const auto table = read_csv_file((dir / "rlc-beta-sweep.sweep.csv").string());
    REQUIRE(table.rows.size() == 3);
    const auto touches = table.numeric_column("touches_u1");
    CHECK(touches[0] <= touches[1]);
    CHECK(touches[1] <= touches[2]);
    CHECK(fs::exists(dir / "rlc-beta-sweep.beta_c-2.trace.csv"));

    auto wrong = config("sweep", "rlc-default", dir);
    wrong.param = "t_span";
    wrong.values = std::vector<double>{1.0};
    CHECK(invoke(wrong) == kUnknownScenario);
}

TEST_CASE("list names every built-in") {
    std::string text;
    RunConfig c;
    c.command = "list";
    CHECK(invoke(c, &text) == kOk);
    for (const char* n : {"rlc-default", "coupling-device-i", "coupling-device-ii", "pera-nominal", "pera-filtered"})
        CHECK(text.find(n) != std::string::npos);
}

TEST_CASE("output directory from the environment") {
    CHECK(resolve_out_dir("given") == "given");
    ::setenv("PBC_OUT_DIR", "/tmp/from-env", 1);
    CHECK(resolve_out_dir("") == "/tmp/from-env");
    ::unsetenv("PBC_OUT_DIR");
    CHECK(resolve_out_dir("") == ".");
}

TEST_CASE("csv round trip and validation") {
    CsvTable t;
    t.header = {"t", "x1", "u1", "storage"};
    t.rows = {{format_number(0.1), format_number(1.0 / 3.0), format_number(-2e-300), format_number(5)}};
    std::stringstream s;
    write_csv(s, t);
    const auto back = read_csv(s);
    CHECK(back.header == t.header);
    CHECK(back.rows == t.rows);
    CHECK(back.numeric_column("x1")[0] == 1.0 / 3.0);
    CHECK(back.numeric_column("u1")[0] == -2e-300);
    CHECK(back.column("nope") == -1);
    CHECK_NOTHROW(validate_trace_table(back));

    std::stringstream ragged("a,b\n1,2\n3\n");
    CHECK_THROWS(read_csv(ragged));
    std::stringstream dup("a,a\n1,2\n");
    CHECK_THROWS(read_csv(dup));
    std::stringstream crlf("a,b\r\n1,2\r\n");
    CHECK_THROWS(read_csv(crlf));
    CsvTable wrong;
    wrong.header = {"time", "x1"};
    CHECK_THROWS(validate_trace_table(wrong));
}

}
