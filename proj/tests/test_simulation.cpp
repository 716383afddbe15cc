#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pbc/errors.hpp"
#include "pbc/scenario_io.hpp"
#include "pbc/verification.hpp"
#include "support.hpp"

using namespace pbc;
using testing::vec;

namespace {

SimulationTrace run(const Scenario& sc, double tf) {
    return simulate(sc.loop(), sc.zeta0(), sc.t0, tf, sc.dt, {sc.substeps});
}

SimulationTrace series_trace(const std::vector<double>& xs) {
    SimulationTrace tr;
    tr.layout.n = 1;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        tr.times.push_back(0.01 * static_cast<double>(k));
        tr.states.push_back(vec({xs[k]}));
        tr.inputs.push_back(vec({0.0}));
        tr.storage.push_back(0.0);
    }
    return tr;
}

}  // namespace

TEST_SUITE("simulation") {

TEST_CASE("augmented dimensions") {
    CHECK(load_scenario("rlc-default").loop().layout().dim() == 4);
    CHECK(load_scenario("coupling-device-ii").loop().layout().dim() == 7);
    CHECK(load_scenario("pera-nominal").loop().layout().dim() == 9);
    const auto f = load_scenario("pera-filtered").loop().layout();
    CHECK(f.dim() == 12);
    CHECK(f.psi_offset() == 9);
}

TEST_CASE("wiring errors") {
    const auto rlc = load_scenario("rlc-default");
    const auto dev = load_scenario("coupling-device-ii");
    CHECK_THROWS_AS(ClosedLoop(rlc.plant, dev.controller_spec()), WiringError);
    const auto arm = load_scenario("pera-nominal");
    CHECK_THROWS_AS(ClosedLoop(rlc.plant, arm.controller_spec()), ShapeError);
    CHECK_THROWS_AS(ClosedLoop(rlc.plant, rlc.controller_spec(), vec({1, 2})), ShapeError);
}

TEST_CASE("plant at rest under a law that holds it") {
    auto m = testing::linear_model(Matrix::Zero(2, 2), Matrix::Identity(2, 2), Matrix::Identity(2, 2));
    Prop2Controller c;
    c.shape_c = {vec({1, 1}), vec({2, 2})};
    c.kappa = Vector::Zero(2);
    c.gamma_star = vec({0.4, -0.1});
    c.Kc = c.Rc = Matrix::Identity(2, 2);
    const ClosedLoop loop(m, c);
    Vector z0 = Vector::Zero(4);
    z0.head(2) = c.gamma_star;
    const auto tr = simulate(loop, z0, 0.0, 1.0, 0.01);
    for (const auto& z : tr.states) CHECK(z == z0);
    for (const auto& u : tr.inputs) CHECK(u.norm() == 0.0);
}

TEST_CASE("controllers never read unmeasured coordinates") {
    std::mt19937_64 rng(21);
    for (const char* name : {"rlc-default", "coupling-device-ii", "pera-nominal", "pera-filtered"}) {
        const auto sc = load_scenario(name);
        ClosedLoop open = sc.loop();
        open.mask_unmeasured = false;
        REQUIRE_FALSE(sc.plant.unmeasured.empty());
        for (int k = 0; k < 50; ++k) {
            const Vector z = testing::random_vector(rng, open.layout().dim(), 0.5) + sc.zeta_star();
            Vector blind = z;
            for (int i : sc.plant.unmeasured) blind[i] = 0.0;
            CHECK(open.control(z) == open.control(blind));
            CHECK(sc.loop().control(z) == open.control(z));
        }
    }
}

TEST_CASE("repeat runs are bit-identical") {
    const auto sc = load_scenario("rlc-default");
    const auto a = run(sc, 0.05), b = run(sc, 0.05);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a.times[k] == b.times[k]);
        CHECK(a.states[k] == b.states[k]);
        CHECK(a.inputs[k] == b.inputs[k]);
        CHECK(a.storage[k] == b.storage[k]);
    }
}

TEST_CASE("circuit regulation") {
    const auto sc = load_scenario("rlc-default");
    const auto tr = run(sc, sc.tf);
    CHECK(tr.times.back() == sc.tf);
    CHECK(std::abs(tr.inputs.back()[0] - 3.0515) <= 1e-3);
    CHECK(lyapunov_monitor(tr).pass);
    CHECK_NOTHROW(metric_saturation_intervals(tr, sc.bounds));
    CHECK(metric_steady_state_error(tr, {2}, vec({3.0515}), 0.05)[0] <= 1e-3);

    const ClosedLoop loop = sc.loop();
    const auto flipped = simulate_with_input(
        loop, [&loop](const Vector& z) -> Vector { return -loop.control(z); }, sc.zeta0(), sc.t0, 0.05, sc.dt);
    CHECK_FALSE(lyapunov_monitor(flipped).pass);
}

TEST_CASE("controller at rest implies zero passive output") {
    const auto sc = load_scenario("rlc-default");
    const auto tr = simulate(sc.loop(), sc.zeta_star(), 0.0, 0.01, sc.dt);
    const int xc = tr.layout.xc_offset();
    for (std::size_t k = 0; k < tr.size(); ++k) {
        CHECK(std::abs(tr.states[k][xc]) <= 1e-12);
        const Vector x = tr.states[k].head(3);
        CHECK(passive_output(sc.plant, x, tr.inputs[k]).norm() <= 1e-6);
    }
}

TEST_CASE("divergence is reported") {
    auto m = testing::linear_model(Matrix::Constant(1, 1, 0.0), Matrix::Identity(1, 1), Matrix::Identity(1, 1));
    m.f = [](const Vector& x) -> Vector { return x.cwiseProduct(x); };
    Prop2Controller c;
    c.shape_c = {vec({1e-3}), vec({1})};
    c.kappa = vec({0});
    c.gamma_star = vec({0});
    c.Kc = c.Rc = Matrix::Identity(1, 1);
    CHECK_THROWS_AS(simulate(ClosedLoop(m, c), vec({1, 0}), 0.0, 5.0, 0.01), DivergenceError);
}

TEST_CASE("trace metrics") {
    const auto flat = series_trace(std::vector<double>(50, 0.7));
    CHECK(metric_steady_state_error(flat, {0}, vec({0.7}), 0.2)[0] == 0.0);
    CHECK(metric_oscillations(flat, 0) == 0);
    CHECK(metric_settling_time(flat, {0}, vec({0.7}), 1e-3) == 0.0);

    std::vector<double> ramp;
    for (int k = 0; k < 100; ++k) ramp.push_back(std::sqrt(static_cast<double>(k)));
    CHECK(oscillation_count(ramp) == 0);

    std::vector<double> wave;
    for (int k = 0; k < 1000; ++k) wave.push_back(std::sin(0.02 * std::numbers::pi * k));
    CHECK(oscillation_count(wave) == 20);

    auto tr = series_trace(std::vector<double>(20, 0.0));
    const std::vector<Interval> b = {{-1.0, 1.0}};
    CHECK(metric_saturation_intervals(tr, b)[0].empty());
    for (int k = 5; k < 9; ++k) tr.inputs[k][0] = 1.0;
    tr.inputs[15][0] = -1.0;
    const auto iv = metric_saturation_intervals(tr, b)[0];
    REQUIRE(iv.size() == 2);
    CHECK(iv[0].lo == doctest::Approx(0.05));
    CHECK(iv[0].hi == doctest::Approx(0.08));
    CHECK(iv[1].lo == doctest::Approx(0.15));
    tr.inputs[3][0] = 1.0 + 1e-9;
    CHECK_THROWS_AS(metric_saturation_intervals(tr, b), InvariantViolation);
}

}
