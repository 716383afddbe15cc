#include "pbc/scenarios.hpp"

#include <cmath>

#include "pbc/errors.hpp"

namespace pbc {

namespace {

void require_positive(std::initializer_list<std::pair<const char*, double>> values, const char* what) {
    for (const auto& [name, v] : values) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw ConfigError(std::string(what) + ": parameter " + name + " must be positive");
    }
}

Vector unit(int n, int i) {
    Vector e = Vector::Zero(n);
    e[i] = 1.0;
    return e;
}

}  // namespace

void CouplingDeviceParams::validate() const {
    require_positive({{"R1", R1}, {"R2", R2}, {"C", C}, {"m1", m1}, {"m2", m2}, {"a0", a0}, {"a1", a1},
                      {"a2", a2}, {"a3", a3}, {"k", k}},
                     "coupling device");
}

void RlcParams::validate() const {
    require_positive({{"r", r}, {"L1", L1}, {"L2", L2}, {"C", C}, {"a", a}, {"b", b}}, "rlc circuit");
}

void PeraParams::validate() const {
    require_positive({{"g_r", g_r}, {"d_c2", d_c2}, {"m3", m3}, {"I1", I1}, {"I2", I2}, {"I3", I3}}, "pera");
}

// ----------------------------------------------------------- coupling device

InputAffineModel coupling_device(const CouplingDeviceParams& p) {
    p.validate();
    InputAffineModel m;
    m.name = "coupling-device";
    m.n = 5;
    m.m = 1;

    m.f = [p](const Vector& x) {
        const double v = x[0] / p.C;
        const double back = x[3] / (p.a0 * p.m1);
        Vector d(5);
        d[0] = -(1.0 / p.R1 + 1.0 / p.R2) * v + back / p.R2;
        d[1] = x[3] / p.m1;
        d[2] = x[4] / p.m2;
        d[3] = -p.k * (x[1] - x[2]) + (v - back) / (p.a0 * p.R2);
        d[4] = p.k * (x[1] - x[2]) - p.a1 / p.m2 * x[4] - p.a2 * std::tanh(p.a3 * x[4]);
        return d;
    };
    const Matrix g = unit(5, 0) / p.R1;
    m.g = [g](const Vector&) { return g; };

    m.S = [p](const Vector& x) {
        const double s = x[1] - x[2];
        return 0.5 * x[0] * x[0] / p.C + 0.5 * p.k * s * s + 0.5 * x[3] * x[3] / p.m1 +
               0.5 * x[4] * x[4] / p.m2;
    };
    m.grad_S = [p](const Vector& x) {
        const double s = p.k * (x[1] - x[2]);
        Vector d(5);
        d << x[0] / p.C, s, -s, x[3] / p.m1, x[4] / p.m2;
        return d;
    };

    const double rpar = p.R1 * p.R2 / (p.R1 + p.R2);
    m.ell = [p, rpar](const Vector& x) {
        const double f1 = -(1.0 / p.R1 + 1.0 / p.R2) * x[0] / p.C + x[3] / (p.a0 * p.m1 * p.R2);
        Vector l(4);
        l[0] = std::sqrt(rpar) * f1;
        l[1] = x[3] / (p.m1 * p.a0 * std::sqrt(p.R1 + p.R2));
        l[2] = std::sqrt(p.a1) * x[4] / p.m2;
        l[3] = std::sqrt(std::max(0.0, p.a2 * x[4] * std::tanh(p.a3 * x[4]) / p.m2));
        return l;
    };
    Matrix w = Matrix::Zero(4, 1);
    w(0, 0) = std::sqrt(rpar) / p.R1;
    m.w = [w](const Vector&) { return w; };

    const double c1 = p.R2 / (p.R1 + p.R2);
    const double c2 = 1.0 / (p.a0 * (p.R1 + p.R2));
    m.gamma = [c1, c2](const Vector& x) { return Vector::Constant(1, c1 * x[0] + c2 * x[1]); };
    Matrix gg = Matrix::Zero(5, 1);
    gg(0, 0) = c1;
    gg(1, 0) = c2;
    m.grad_gamma = [gg](const Vector&) { return gg; };

    m.eta = [](const Vector& x) { return Vector::Constant(1, x[2]); };
    const Matrix ge = unit(5, 2);
    m.grad_eta = [ge](const Vector&) { return ge; };
    const Matrix lam_l = Matrix::Constant(1, 1, p.a1);
    const Matrix lam_c = Matrix::Constant(1, 1, p.R1);
    m.lambda_ell = [lam_l](const Vector&) { return lam_l; };
    m.lambda_c = [lam_c](const Vector&) { return lam_c; };

    m.unmeasured = {3, 4};
    return m;
}

Vector coupling_equilibrium(double position) {
    Vector x = Vector::Zero(5);
    x[1] = position;
    x[2] = position;
    return x;
}

// --------------------------------------------------------------------- RLC

BraytonMoserModel rlc_circuit(const RlcParams& p) {
    p.validate();
    BraytonMoserModel bm;
    bm.name = "rlc";
    bm.varsigma = 2;
    bm.varpi = 1;
    bm.L = Matrix::Zero(2, 2);
    bm.L.diagonal() << p.L1, p.L2;
    bm.C = Matrix::Constant(1, 1, p.C);
    bm.Gamma = Matrix(2, 1);
    bm.Gamma << 1.0, -1.0;
    bm.v_R = [p](const Vector& i) {
        Vector v(2);
        v << 0.0, p.r * i[1];
        return v;
    };
    bm.dv_R = [p](const Vector&) {
        Matrix j = Matrix::Zero(2, 2);
        j(1, 1) = p.r;
        return j;
    };
    // Load branch draws a(e^{v/b} - 1).
    bm.i_G = [p](const Vector& v) { return Vector::Constant(1, p.a * std::expm1(v[0] / p.b)); };
    bm.di_G = [p](const Vector& v) { return Matrix::Constant(1, 1, p.a / p.b * std::exp(v[0] / p.b)); };
    bm.gtilde_L = Matrix(2, 1);
    bm.gtilde_L << -1.0, 0.0;
    bm.gtilde_C = Matrix(1, 0);
    return bm;
}

InputAffineModel rlc_affine(const RlcParams& p) {
    InputAffineModel m = bm_to_affine(rlc_circuit(p));
    const double inv = 1.0 / p.L1;
    m.gamma = [inv](const Vector& x) { return Vector::Constant(1, inv * x[2]); };
    Matrix gg = Matrix::Zero(3, 1);
    gg(2, 0) = inv;
    m.grad_gamma = [gg](const Vector&) { return gg; };
    m.unmeasured = {0, 1};
    return m;
}

double rlc_load_current(const RlcParams& p, double voltage) { return p.a * std::expm1(voltage / p.b); }

Vector rlc_equilibrium(const RlcParams& p, double voltage) {
    Vector x(3);
    x << voltage / p.r + rlc_load_current(p, voltage), voltage / p.r, voltage;
    return x;
}

// -------------------------------------------------------------------- PERA

MechanicalModel pera(const PeraParams& p) {
    p.validate();
    MechanicalModel mech;
    mech.name = "pera";
    mech.dof = 3;
    const double md2 = p.m3 * p.d_c2 * p.d_c2;
    const double mgd = p.m3 * p.g_r * p.d_c2;
    mech.M = [p, md2](const Vector& q) {
        const double s = std::sin(q[1]), c = std::cos(q[1]);
        Matrix m = Matrix::Zero(3, 3);
        m(0, 0) = p.I1 + p.I2 + p.I3 + md2 * s * s;
        m(1, 1) = p.I2 + p.I3 + md2;
        m(2, 2) = p.I3;
        m(0, 2) = m(2, 0) = p.I3 * c;
        return m;
    };
    mech.dM = [p, md2](const Vector& q) {
        const double s = std::sin(q[1]), c = std::cos(q[1]);
        std::vector<Matrix> d(3, Matrix::Zero(3, 3));
        d[1](0, 0) = 2.0 * md2 * s * c;
        d[1](0, 2) = d[1](2, 0) = -p.I3 * s;
        return d;
    };
    mech.V = [mgd](const Vector& q) { return mgd * (1.0 - std::cos(q[1])); };
    mech.gradV = [mgd](const Vector& q) {
        Vector g = Vector::Zero(3);
        g[1] = mgd * std::sin(q[1]);
        return g;
    };
    mech.G = Matrix::Identity(3, 3);
    return mech;
}

std::vector<TorqueLimit> pera_torque_limits() {
    std::vector<TorqueLimit> out;
    Vector w(3);
    w << 1.0, 0.0, 0.0;
    out.push_back({"u1", w, 17.1007});
    w << 0.0, 1.0, 1.0;
    out.push_back({"u2+u3", w, 7.901});
    w << 0.0, 1.0, -1.0;
    out.push_back({"u2-u3", w, 7.901});
    return out;
}

Vector pera_gravity_bound(const PeraParams& p) {
    Vector b = Vector::Zero(3);
    b[1] = p.m3 * p.g_r * p.d_c2;
    return b;
}

// --------------------------------------------------------------- built-ins

namespace {

ScenarioDef def(std::string name, std::vector<std::string> aliases, std::string summary, const char* json) {
    return ScenarioDef{std::move(name), std::move(aliases), std::move(summary), Json::parse(json)};
}

std::vector<ScenarioDef> make_builtins() {
    std::vector<ScenarioDef> out;

    out.push_back(def("rlc-default", {}, "nonlinear RLC circuit, voltage-limited source, capacitor voltage measured",
                      R"({
      "model": {"kind": "rlc", "params": {}},
      "controller": {"family": "prop2", "alpha_c": 0.0485, "beta_c": 10, "Kc": 10, "Rc": 10},
      "target": 3.0515,
      "x0": [0, 0, 0],
      "t_span": [0, 0.5],
      "dt": 1e-5,
      "outputs": {"channels": [2], "window": 0.05, "band": 1e-3},
      "verify": {"lo": [0.03, 0.02, 2.9], "hi": [0.07, 0.04, 3.2], "samples": 1000, "u_bound": 3.1}
    })"));

    out.push_back(def("rlc-beta-sweep", {}, "RLC circuit swept over beta_c (values are our choice)", R"({
      "model": {"kind": "rlc", "params": {}},
      "controller": {"family": "prop2", "alpha_c": 0.0485, "beta_c": 10, "Kc": 10, "Rc": 10},
      "target": 3.0515,
      "x0": [0, 0, 0],
      "t_span": [0, 0.5],
      "dt": 1e-5,
      "outputs": {"channels": [2], "window": 0.05, "band": 1e-3},
      "verify": {"lo": [0.03, 0.02, 2.9], "hi": [0.07, 0.04, 3.2], "samples": 1000, "u_bound": 3.1},
      "sweep": {"param": "controller.beta_c", "values": [1, 10, 100]}
    })"));

    const char* coupling_common = R"({
      "model": {"kind": "coupling", "params": {}},
      "target": 0.025,
      "x0": [0, 0, 0, 0, 0],
      "t_span": [0, 20],
      "dt": 1e-4,
      "substeps": 20,
      "outputs": {"channels": [1, 2], "window": 1.0, "band": 5e-4},
      "verify": {"lo": [-1e-3, -0.05, -0.05, -1e-3, -1.5e-3], "hi": [1e-3, 0.05, 0.05, 1e-3, 1.5e-3],
                 "samples": 1000, "u_bound": 10}
    })";
    auto coupling = [&](std::string name, std::vector<std::string> aliases, std::string summary, Json ctrl,
                        std::optional<Json> sweep = std::nullopt) {
        ScenarioDef d = def(std::move(name), std::move(aliases), std::move(summary), coupling_common);
        d.config["controller"] = std::move(ctrl);
        if (sweep) d.config["sweep"] = *sweep;
        out.push_back(std::move(d));
    };
    const Json base_ctrl = Json::parse(R"({"family": "prop4", "beta_c": 450, "beta_ell": 2e6,
        "Kc": 1e6, "Rc": 0.3, "Kl": 5.5e-4, "Rl": 33, "Upsilon": 1})");
    Json c1 = base_ctrl;
    c1["alpha_c"] = 5.0;
    c1["alpha_ell"] = 0.0;
    coupling("coupling-device-i", {"coupling-device-(i)"}, "coupling device, all saturation on the output integral",
             c1);
    Json c2 = base_ctrl;
    c2["alpha_c"] = 2.5;
    c2["alpha_ell"] = 2.5;
    coupling("coupling-device-ii", {"coupling-device-(ii)"},
             "coupling device, saturation split with the damped mass coordinate", c2);
    Json c3 = base_ctrl;
    c3["alpha"] = 2.5;
    coupling("coupling-device-sweep", {}, "coupling device, equal alpha_c = alpha_ell swept", c3,
             Json::parse(R"({"param": "controller.alpha", "values": [2.5, 3.75, 5]})"));

    const char* pera_nominal = R"({
      "model": {"kind": "pera", "params": {}},
      "controller": {"family": "fully_actuated", "alpha_c": [17, 3, 3.3], "beta_c": [80, 100, 80],
                     "Kc": [1, 1, 1], "Rc": [0.1, 0.005, 0.05]},
      "target": [-1.81, 1.5707963267948966, 0.78],
      "x0": [-2.257, -0.206, 0.044, 0, 0, 0],
      "t_span": [0, 15],
      "dt": 1e-3,
      "substeps": 10,
      "outputs": {"channels": [0, 1, 2], "window": 1.0, "band": 1e-2},
      "verify": {"lo": [-3.14159, -3.14159, -3.14159, -0.1, -0.1, -0.1],
                 "hi": [3.14159, 3.14159, 3.14159, 0.1, 0.1, 0.1], "samples": 1000, "u_bound": 17}
    })";
    const char* pera_filtered = R"({
      "model": {"kind": "pera", "params": {}},
      "controller": {"family": "filtered", "alpha_c": [6, 1.4, 1], "beta_c": [120, 120, 120],
                     "alpha_psi": [11, 1.5, 2.4], "beta_psi": [7, 7, 7],
                     "Kc": [1, 1, 1], "Rc": [0.1, 0.005, 0.05], "Rpsi": [1, 1, 35]},
      "target": [-1.81, 1.5707963267948966, 0.78],
      "x0": [-2.23, -0.212, 0.086, 0, 0, 0],
      "t_span": [0, 15],
      "dt": 1e-3,
      "substeps": 10,
      "outputs": {"channels": [0, 1, 2], "window": 1.0, "band": 1e-2},
      "verify": {"lo": [-3.14159, -3.14159, -3.14159, -0.1, -0.1, -0.1],
                 "hi": [3.14159, 3.14159, 3.14159, 0.1, 0.1, 0.1], "samples": 1000, "u_bound": 17}
    })";
    out.push_back(def("pera-nominal", {}, "PERA arm, saturated law with gravity compensation", pera_nominal));
    out.push_back(def("pera-filtered", {}, "PERA arm, constant gravity term plus steady-state filter", pera_filtered));

    auto biased = [&](const char* src, std::string name, std::string summary) {
        ScenarioDef d = def(std::move(name), {}, std::move(summary), src);
        d.config["disturbance"] = Json::array({0.3, 0.1, 0.1});
        d.config["t_span"] = Json::array({0, 30});
        d.config["outputs"]["window"] = 5.0;
        out.push_back(std::move(d));
    };
    biased(pera_nominal, "pera-nominal-bias", "PERA nominal law under a constant input bias");
    biased(pera_filtered, "pera-filtered-bias", "PERA filtered law under a constant input bias");
    return out;
}

}  // namespace

const std::vector<ScenarioDef>& builtin_scenarios() {
    static const std::vector<ScenarioDef> list = make_builtins();
    return list;
}

std::optional<ScenarioDef> find_builtin(const std::string& name) {
    for (const auto& d : builtin_scenarios()) {
        if (d.name == name) return d;
        for (const auto& a : d.aliases) {
            if (a == name) return d;
        }
    }
    return std::nullopt;
}

}  // namespace pbc
