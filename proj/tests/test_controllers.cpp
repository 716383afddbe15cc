#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "pbc/controllers.hpp"
#include "pbc/errors.hpp"
#include "pbc/scenarios.hpp"
#include "support.hpp"

using namespace pbc;
using testing::vec;

namespace {

SaturationShape shape(std::initializer_list<double> a, std::initializer_list<double> b) { return {vec(a), vec(b)}; }

Prop2Controller prop2(double kappa, double alpha, double beta, double kc = 10, double rc = 10) {
    Prop2Controller c;
    c.shape_c = shape({alpha}, {beta});
    c.kappa = vec({kappa});
    c.gamma_star = vec({0.3});
    c.Kc = Matrix::Constant(1, 1, kc);
    c.Rc = Matrix::Constant(1, 1, rc);
    return c;
}

Prop4Controller prop4(double alpha_c, double alpha_l) {
    Prop4Controller c;
    c.core = prop2(0.0, alpha_c, 450);
    c.shape_ell = shape({alpha_l}, {2e6});
    c.Upsilon = Matrix::Identity(1, 1);
    c.Kl = Matrix::Constant(1, 1, 5.5e-4);
    c.Rl = Matrix::Constant(1, 1, 33);
    c.eta_star = vec({0.025});
    return c;
}

FullyActuatedController arm_law() {
    const PeraParams p;
    const auto mech = pera(p);
    FullyActuatedController c;
    c.shape_c = shape({17, 3, 3.3}, {80, 100, 80});
    c.q_star = vec({-1.81, std::numbers::pi / 2, 0.78});
    c.Kc = Matrix::Identity(3, 3);
    c.Rc = Vector(vec({0.1, 0.005, 0.05})).asDiagonal();
    c.gradV = mech.gradV;
    c.gradV_bound = pera_gravity_bound(p);
    return c;
}

FilterAugmentation arm_filter() {
    FilterAugmentation f;
    f.shape_psi = shape({11, 1.5, 2.4}, {7, 7, 7});
    f.Rpsi = Vector(vec({1, 1, 35})).asDiagonal();
    return f;
}

bool inside(const Vector& u, const std::vector<Interval>& b) {
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        if (!(u[i] >= b[i].lo && u[i] <= b[i].hi)) return false;
    }
    return true;
}

}  // namespace

TEST_SUITE("controllers") {

TEST_CASE("log-cosh potential") {
    CHECK(phi_value(shape({1}, {1}), vec({0})) == 0.0);
    CHECK(std::abs(phi_value(shape({1}, {1}), vec({50})) - (50 - std::log(2.0))) <= 1e-12);
    CHECK(std::isfinite(phi_value(shape({1}, {1}), vec({1e6}))));
    const double want = static_cast<double>(2.0L / 3.0L * oracle::log_cosh(0.3L));
    CHECK(std::abs(phi_value(shape({2}, {3}), vec({0.1})) - want) <= 1e-12);
    CHECK(std::abs(phi_value(shape({2}, {3}), vec({0.1})) - 0.0295605133) <= 1e-10);
}

TEST_CASE("saturation gradient") {
    CHECK(phi_grad(shape({2}, {3}), vec({0})).norm() == 0.0);
    CHECK(std::abs(phi_grad(shape({2}, {3}), vec({10}))[0] - 2.0) <= 1e-12);
    const auto s = shape({1.5, 0.2, 4}, {3, 40, 0.5});
    std::mt19937_64 rng(2);
    for (int k = 0; k < 100; ++k) {
        const Vector z = testing::random_vector(rng, 3, 0.5);
        const Vector fd = fd_gradient([&s](const Vector& v) { return phi_value(s, v); }, z);
        CHECK((fd - phi_grad(s, z)).cwiseAbs().maxCoeff() <= 1e-6);
        CHECK((phi_grad(s, z).cwiseAbs().array() <= s.alpha.array()).all());
    }
}

TEST_CASE("shape validation") {
    CHECK_THROWS_AS(shape({0}, {1}).validate(), ConfigError);
    CHECK_THROWS_AS(shape({1}, {-1}).validate(), ConfigError);
    CHECK_THROWS_AS(shape({1, 1}, {1}).validate(), ShapeError);
}

TEST_CASE("static law") {
    Prop1Controller c{shape({1}, {1}), vec({1}), vec({0.4}), vec({0.2})};
    CHECK((prop1_control(c, vec({0.2}), vec({0})) + c.kappa).norm() == 0.0);
    c.kappa = vec({0});
    std::mt19937_64 rng(3);
    for (int k = 0; k < 100; ++k) {
        const double u = prop1_control(c, testing::random_vector(rng, 1, 1e3), testing::random_vector(rng, 1, 1e3))[0];
        CHECK(u >= -2.0);
        CHECK(u <= 2.0);
    }
    c.kappa = vec({0.4});
    const double big = 1e300;
    CHECK(prop1_control(c, vec({big}), vec({big}))[0] == -0.4 - 1.0 - 1.0);
    Prop1Controller w{shape({1}, {1}), vec({2}), vec({0}), vec({0})};
    const auto b = saturation_bounds(w);
    CHECK(b[0].lo == -3.0);
    CHECK(b[0].hi == 3.0);
}

TEST_CASE("dynamic extension law") {
    auto c = prop2(0.7, 0.5, 2.0);
    CHECK((prop2_control(c, c.gamma_star, vec({0})) + c.kappa).norm() == 0.0);
    CHECK(prop2_dynamics(c, c.gamma_star, vec({0})).norm() == 0.0);

    const auto circuit = prop2(-3.0515, 0.0485, 10.0);
    const auto b = saturation_bounds(circuit);
    CHECK(std::abs(b[0].lo - 3.003) <= 1e-12);
    CHECK(std::abs(b[0].hi - 3.1) <= 1e-12);

    auto d = prop2(0.0, 0.0485, 1.0);
    d.gamma_star = vec({0.0});
    // z_c = gamma - gamma* + x_c = 0.08 + 0.02
    const Vector xc_dot = prop2_dynamics(d, vec({0.08}), vec({0.02}));
    const double want = -10.0 * (0.0485 * std::tanh(0.1) + 10.0 * 0.02);
    CHECK(std::abs(xc_dot[0] - want) <= 1e-12);
    CHECK(std::abs(xc_dot[0] + 2.048338977) <= 1e-9);
}

TEST_CASE("virtual damping law") {
    auto c = prop4(2.5, 2.5);
    CHECK(prop4_control(c, c.core.gamma_star, c.eta_star, vec({0}), vec({0})).norm() == 0.0);
    const auto r = prop4_dynamics(c, c.core.gamma_star, c.eta_star, vec({0}), vec({0}));
    CHECK(r.xc_dot.norm() == 0.0);
    CHECK(r.xl_dot.norm() == 0.0);
    auto b = saturation_bounds(c);
    CHECK(b[0].lo == -5.0);
    CHECK(b[0].hi == 5.0);
    b = saturation_bounds(prop4(3.75, 3.75));
    CHECK(b[0].lo == -7.5);
    CHECK(b[0].hi == 7.5);

    c.Upsilon = Matrix::Zero(1, 1);
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("gravity-compensated law") {
    const auto c = arm_law();
    const Vector u = fully_actuated_control(c, c.q_star, Vector::Zero(3));
    CHECK(std::abs(u[0]) <= 1e-12);
    CHECK(std::abs(u[1] - 1.5696) <= 1e-12);
    CHECK(std::abs(u[2]) <= 1e-12);
    CHECK(fully_actuated_dynamics(c, c.q_star, Vector::Zero(3)).norm() == 0.0);

    auto flat = c;
    flat.gradV = [](const Vector& q) -> Vector { return Vector::Zero(q.size()); };
    CHECK(fully_actuated_control(flat, c.q_star, Vector::Zero(3)).norm() == 0.0);

    std::mt19937_64 rng(4);
    for (int k = 0; k < 100; ++k) {
        const Vector q = testing::random_vector(rng, 3, 10.0), xc = testing::random_vector(rng, 3, 10.0);
        const Vector diff = fully_actuated_control(c, q, xc) - c.gradV(q);
        CHECK((diff.cwiseAbs().array() <= c.shape_c.alpha.array() * (1 + 1e-12)).all());
    }
}

TEST_CASE("steady-state filter") {
    const auto f = arm_filter();
    CHECK(filter_dynamics(f, Vector::Zero(3), Vector::Zero(3)).norm() == 0.0);
    CHECK(filter_input(f, Vector::Zero(3)).norm() == 0.0);

    FilterAugmentation pure;
    pure.shape_psi = shape({1}, {1});
    pure.Rpsi = Matrix::Constant(1, 1, 1e-300);
    CHECK(filter_dynamics(pure, vec({0}), vec({0.3}))[0] == doctest::Approx(0.3));

    std::mt19937_64 rng(5);
    for (int k = 0; k < 100; ++k) {
        const Vector psi = testing::random_vector(rng, 3, 5.0);
        CHECK((filter_input(f, psi).cwiseAbs().array() <= f.shape_psi.alpha.array()).all());
    }
}

TEST_CASE("outputs stay inside the closed-form bounds") {
    std::mt19937_64 rng(6);
    const auto big = [&rng](int n) {
        Vector v = testing::random_vector(rng, n, 1.0);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = std::ldexp(v[i], static_cast<int>(rng() % 60) - 10);
        return v;
    };

    const Prop1Controller p1{shape({1.2}, {3}), vec({0.5}), vec({0.2}), vec({0})};
    const auto p2 = prop2(-3.0515, 0.0485, 100.0);
    const auto p4 = prop4(2.5, 2.5);
    const auto fa = arm_law();
    FilteredController fl{fa, arm_filter(), fa.gradV(fa.q_star)};
    fl.base = [] {
        auto c = arm_law();
        c.shape_c = shape({6, 1.4, 1}, {120, 120, 120});
        return c;
    }();

    const auto b1 = saturation_bounds(p1), b2 = saturation_bounds(p2), b4 = saturation_bounds(p4);
    const auto bf = saturation_bounds(fa), bl = saturation_bounds(fl);
    int outside = 0;
    for (int k = 0; k < 2000; ++k) {
        outside += !inside(prop1_control(p1, big(1), big(1)), b1);
        outside += !inside(prop2_control(p2, big(1), big(1)), b2);
        outside += !inside(prop4_control(p4, big(1), big(1), big(1), big(1)), b4);
        const Vector q = testing::random_vector(rng, 3, std::numbers::pi);
        outside += !inside(fully_actuated_control(fa, q, big(3)), bf);
        outside += !inside(augmented_control(fl, big(3), Vector(0), big(3), Vector(0), big(3)), bl);
    }
    CHECK(outside == 0);
    CHECK(bl[1].lo == doctest::Approx(1.5696 - 1.4 - 1.5));
    CHECK(bl[1].hi == doctest::Approx(1.5696 + 1.4 + 1.5));
}

TEST_CASE("every family is at rest at its target") {
    const auto fa = arm_law();
    FilteredController fl{fa, arm_filter(), fa.gradV(fa.q_star)};
    const Vector u = augmented_control(fl, Vector::Zero(3), Vector(0), Vector::Zero(3), Vector(0), Vector::Zero(3));
    CHECK((u - fa.gradV(fa.q_star)).norm() == 0.0);
    CHECK(filter_dynamics(fl.filter, Vector::Zero(3), Vector::Zero(3)).norm() == 0.0);
    CHECK_NOTHROW(fl.validate());
    CHECK(family_name(ControllerSpec(fl)) == "filtered");
    CHECK(input_dimension(ControllerSpec(fl)) == 3);
}

}
