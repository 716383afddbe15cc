#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pbc/controllers.hpp"
#include "pbc/models.hpp"
#include "pbc/sampling.hpp"
#include "pbc/simulation.hpp"

namespace pbc {

using Json = nlohmann::ordered_json;

struct CouplingDeviceParams {
    double R1 = 100.0;
    double R2 = 100.0;
    double C = 2.2e-4;
    double m1 = 0.01;
    double m2 = 0.015;
    double a0 = 0.005;
    double a1 = 6e-4;
    double a2 = 8e-5;
    double a3 = 40.0;
    double k = 0.3;
    void validate() const;
};

struct RlcParams {
    double r = 100.0;
    double L1 = 0.01;
    double L2 = 0.02;
    double C = 2e-4;
    double a = 1e-7;
    double b = 0.25;
    void validate() const;
};

struct PeraParams {
    double g_r = 9.81;
    double d_c2 = 0.16;
    double m3 = 1.0;
    double I1 = 0.0054;
    double I2 = 0.0768;
    double I3 = 0.00211;
    void validate() const;
};

// |weights . u| <= bound
struct TorqueLimit {
    std::string label;
    Vector weights;
    double bound = 0.0;
};

// Charge, two positions, two momenta.
InputAffineModel coupling_device(const CouplingDeviceParams& p);
Vector coupling_equilibrium(double position);

// Inductor currents x1, x2 and capacitor voltage x3.
BraytonMoserModel rlc_circuit(const RlcParams& p);
InputAffineModel rlc_affine(const RlcParams& p);
double rlc_load_current(const RlcParams& p, double voltage);
Vector rlc_equilibrium(const RlcParams& p, double voltage);

MechanicalModel pera(const PeraParams& p);
std::vector<TorqueLimit> pera_torque_limits();
// sup |dV/dq| per joint.
Vector pera_gravity_bound(const PeraParams& p);

struct ScenarioDef {
    std::string name;
    std::vector<std::string> aliases;
    std::string summary;
    Json config;
};

const std::vector<ScenarioDef>& builtin_scenarios();
std::optional<ScenarioDef> find_builtin(const std::string& name);

struct SweepSpec {
    std::string param;
    std::vector<double> values;
};

// A fully resolved scenario ready to simulate or verify.
struct Scenario {
    std::string name;
    std::string kind;
    Json config;

    InputAffineModel plant;
    std::optional<BraytonMoserModel> bm;
    // Empty when the controller section is rejected; the reason is kept.
    std::optional<ControllerSpec> controller;
    std::string controller_error;
    // Shape of the output-integral term exactly as configured, unvalidated.
    Vector alpha_c;
    Vector beta_c;
    Vector x_star;
    Vector x0;
    Vector disturbance;
    double t0 = 0.0;
    double tf = 1.0;
    double dt = 1e-3;
    int substeps = 1;

    std::vector<int> tracked;  // plant-state channels reported in metrics
    double window = 1.0;       // steady-state averaging window
    double band = 1e-3;        // settling band
    SampleSpec box;
    double u_bound = 1.0;      // input range for sampled checks
    std::vector<Interval> bounds;
    std::vector<TorqueLimit> limits;
    std::optional<SweepSpec> sweep;
    std::vector<std::string> notes;

    const ControllerSpec& controller_spec() const;
    ClosedLoop loop() const;
    Vector zeta0() const;
    Vector zeta_star() const;
    Vector tracked_target() const;
};

}  // namespace pbc
