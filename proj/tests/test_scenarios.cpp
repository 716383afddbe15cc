#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include "pbc/errors.hpp"
#include "pbc/scenario_io.hpp"
#include "support.hpp"

using namespace pbc;
using testing::vec;

TEST_SUITE("scenarios") {

TEST_CASE("coupling device model") {
    const auto dev = coupling_device(CouplingDeviceParams{});
    CHECK(dev.n == 5);
    CHECK(dev.m == 1);
    CHECK(dev.f(Vector::Zero(5)).norm() == 0.0);
    for (double c : {-0.2, 0.0, 0.025, 0.3}) CHECK(equilibrium_residual(dev, vec({0, c, c, 0, 0})) <= 1e-12);
    CHECK(dev.gamma(vec({1, 1, 0.3, -0.2, 0.1}))[0] == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(dev.eta(vec({1, 2, 3, 4, 5}))[0] == 3.0);
    CHECK(dev.g(Vector::Zero(5))(0, 0) == doctest::Approx(1.0 / 100.0));
    CHECK_THROWS_AS(coupling_device(CouplingDeviceParams{.R1 = -1.0}), ConfigError);
}

TEST_CASE("circuit model") {
    const RlcParams p;
    CHECK(std::abs(rlc_load_current(p, 3.0515) - 0.02) <= 1e-4);
    CHECK(std::abs(p.b * std::log(1.0 + 0.02 / p.a) - 3.05152) <= 1e-5);
    const Vector xs = rlc_equilibrium(p, 3.0515);
    CHECK(xs[1] == doctest::Approx(0.030515).epsilon(1e-12));
    CHECK(rlc_load_current(p, 0.0) == 0.0);
    const auto bm = rlc_circuit(p);
    CHECK(bm.n() == 3);
    CHECK(bm.v_R(vec({0.1, 0.2}))[1] == doctest::Approx(20.0));
}

TEST_CASE("arm model and torque limits") {
    const PeraParams p;
    const auto mech = pera(p);
    CHECK(mech.G == Matrix::Identity(3, 3));
    CHECK(mech.V(vec({0.3, std::numbers::pi / 2, 1.0})) == doctest::Approx(1.5696));
    const auto limits = pera_torque_limits();
    REQUIRE(limits.size() == 3);
    CHECK(limits[0].bound == 17.1007);
    CHECK(limits[1].bound == 7.901);
    CHECK(limits[2].bound == 7.901);
    CHECK(std::abs(limits[1].weights.dot(vec({0, 1, 1}))) == 2.0);
    const Vector bound = pera_gravity_bound(p);
    CHECK(bound[1] == doctest::Approx(1.5696));
    CHECK(bound[0] == 0.0);
}

TEST_CASE("every built-in resolves") {
    for (const auto& d : builtin_scenarios()) {
        INFO(d.name);
        const auto sc = load_scenario(d.name);
        CHECK(sc.controller.has_value());
        CHECK(sc.x0.size() == sc.plant.n);
        CHECK(sc.bounds.size() == static_cast<std::size_t>(sc.plant.m));
        for (const auto& a : d.aliases) CHECK(load_scenario(a).name == d.name);
    }
}

TEST_CASE("paper parameter sets") {
    auto sc = load_scenario("coupling-device-(ii)");
    CHECK(sc.bounds[0].lo == -5.0);
    CHECK(sc.bounds[0].hi == 5.0);
    CHECK(sc.x_star == vec({0, 0.025, 0.025, 0, 0}));

    sc = load_scenario("coupling-device-i");
    CHECK(std::holds_alternative<Prop2Controller>(sc.controller_spec()));
    CHECK(sc.bounds[0].hi == 5.0);
    CHECK_FALSE(sc.notes.empty());

    sc = load_scenario("pera-nominal");
    const auto& fa = std::get<FullyActuatedController>(sc.controller_spec());
    CHECK(fa.shape_c.alpha == vec({17, 3, 3.3}));
    CHECK(fa.shape_c.beta == vec({80, 100, 80}));
    CHECK(fa.Rc.diagonal() == vec({0.1, 0.005, 0.05}));
    CHECK(sc.x0.head(3) == vec({-2.257, -0.206, 0.044}));

    sc = load_scenario("pera-filtered");
    const auto& fl = std::get<FilteredController>(sc.controller_spec());
    CHECK(fl.filter.Rpsi.diagonal() == vec({1, 1, 35}));
    CHECK(fl.filter.shape_psi.alpha == vec({11, 1.5, 2.4}));
    CHECK(fl.filter.shape_psi.beta == vec({7, 7, 7}));
    CHECK(sc.x0.head(3) == vec({-2.23, -0.212, 0.086}));

    sc = load_scenario("rlc-default");
    CHECK(std::abs(sc.bounds[0].lo - 3.003) <= 1e-12);
    CHECK(std::abs(sc.bounds[0].hi - 3.1) <= 1e-12);

    sc = load_scenario("coupling-device-sweep", {"controller.alpha=3.75"});
    CHECK(sc.bounds[0].hi == 7.5);
    CHECK(load_scenario("rlc-beta-sweep").sweep->values == std::vector<double>{1, 10, 100});
}

TEST_CASE("matrix and vector parsing") {
    CHECK(parse_matrix(Json(2.0), 2, "k") == 2.0 * Matrix::Identity(2, 2));
    CHECK(parse_matrix(Json::parse("[1, 2]"), 2, "k") == Matrix(vec({1, 2}).asDiagonal()));
    Matrix full(2, 2);
    full << 1, 2, 3, 4;
    CHECK(parse_matrix(Json::parse("[1, 2, 3, 4]"), 2, "k") == full);
    CHECK(parse_matrix(Json::parse("[[1, 2], [3, 4]]"), 2, "k") == full);
    CHECK_THROWS_AS(parse_matrix(Json::parse("[1, 2, 3]"), 2, "k"), ConfigError);
    CHECK(parse_vector(Json(0.5), 3, "v") == Vector::Constant(3, 0.5));
    CHECK_THROWS_AS(parse_vector(Json::parse("[1, 2]"), 3, "v"), ConfigError);
}

TEST_CASE("overrides and schema") {
    Json c = resolve_config("rlc-default");
    apply_override(c, "controller.beta_c=100");
    CHECK(c["controller"]["beta_c"] == 100);
    apply_override(c, "controller.family=prop2");
    CHECK(c["controller"]["family"] == "prop2");
    CHECK_THROWS_AS(apply_override(c, "controller.gain=3"), ConfigError);
    CHECK_THROWS_AS(apply_override(c, "nonsense=3"), ConfigError);
    CHECK_THROWS_AS(apply_override(c, "no-equals-sign"), ConfigError);
    CHECK_THROWS_AS(resolve_config("no-such-scenario"), ConfigError);
    CHECK_FALSE(is_known_scenario("no-such-scenario"));
    CHECK(is_known_scenario("pera-nominal"));

    Json bad = resolve_config("rlc-default");
    bad["controller"]["Kq"] = 1;
    CHECK_THROWS_AS(validate_config(bad), ConfigError);
}

TEST_CASE("scenario from a file") {
    const std::string path = "scenario_from_file.json";
    Json c = resolve_config("rlc-default");
    c["t_span"] = Json::array({0, 0.01});
    {
        std::ofstream f(path);
        f << c.dump(2);
    }
    const auto sc = load_scenario(path);
    CHECK(sc.tf == 0.01);
    CHECK(sc.kind == "rlc");
    std::remove(path.c_str());
}

TEST_CASE("rejected controller sections are kept as errors") {
    const auto sc = load_scenario("rlc-default", {"controller.alpha_c=0"});
    CHECK_FALSE(sc.controller.has_value());
    CHECK_FALSE(sc.controller_error.empty());
    CHECK(sc.alpha_c == vec({0}));
    CHECK_THROWS_AS(sc.controller_spec(), ConfigError);
}

}
