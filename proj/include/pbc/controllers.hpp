#pragma once

#include <string>
#include <variant>
#include <vector>

#include "pbc/numerics.hpp"

namespace pbc {

struct SaturationShape {
    Vector alpha;
    Vector beta;

    Eigen::Index size() const { return alpha.size(); }
    void validate(const char* what = "saturation shape") const;
};

double log_cosh(double t);
double phi_value(const SaturationShape& shape, const Vector& z);
Vector phi_grad(const SaturationShape& shape, const Vector& z);
// Diagonal of the Hessian: alpha * beta * sech^2(beta z).
Vector phi_curvature(const SaturationShape& shape, const Vector& z);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct Prop1Controller {
    SaturationShape shape;
    Vector kp;
    Vector kappa;
    Vector gamma_star;
    void validate() const;
};

Vector prop1_control(const Prop1Controller& c, const Vector& gamma_x, const Vector& y);

struct Prop2Controller {
    SaturationShape shape_c;
    Vector kappa;
    Vector gamma_star;
    Matrix Kc;
    Matrix Rc;
    Vector xc0;  // empty means zero
    void validate() const;
};

Vector prop2_zc(const Prop2Controller& c, const Vector& gamma_x, const Vector& xc);
Vector prop2_control(const Prop2Controller& c, const Vector& gamma_x, const Vector& xc);
Vector prop2_dynamics(const Prop2Controller& c, const Vector& gamma_x, const Vector& xc);

struct Prop4Controller {
    Prop2Controller core;
    SaturationShape shape_ell;
    Matrix Upsilon;  // m x s
    Matrix Kl;       // diagonal
    Matrix Rl;       // diagonal
    Vector eta_star;
    Vector xl0;
    void validate() const;
};

struct Prop4Rates {
    Vector xc_dot;
    Vector xl_dot;
};

Vector prop4_zl(const Prop4Controller& c, const Vector& eta_x, const Vector& xl);
Vector prop4_control(const Prop4Controller& c, const Vector& gamma_x, const Vector& eta_x,
                     const Vector& xc, const Vector& xl);
Prop4Rates prop4_dynamics(const Prop4Controller& c, const Vector& gamma_x, const Vector& eta_x,
                          const Vector& xc, const Vector& xl);

struct FullyActuatedController {
    SaturationShape shape_c;
    Vector q_star;
    Matrix Kc;
    Matrix Rc;
    VectorField gradV;
    Vector gradV_bound;  // sup |dV/dq_i| on the operating box
    Vector xc0;
    void validate() const;
};

Vector fully_actuated_control(const FullyActuatedController& c, const Vector& q, const Vector& xc);
Vector fully_actuated_dynamics(const FullyActuatedController& c, const Vector& q, const Vector& xc);
// Largest |dV/dq_i| seen over samples; fails with ConfigError if not finite.
Vector sample_gradient_bound(const VectorField& gradV, const std::vector<Vector>& qs);

struct FilterAugmentation {
    SaturationShape shape_psi;
    Matrix Rpsi;  // diagonal
    Vector psi0;
    void validate() const;
};

Vector filter_dynamics(const FilterAugmentation& f, const Vector& psi, const Vector& q_err);
Vector filter_input(const FilterAugmentation& f, const Vector& psi);

// Base law with the filter term added and the model compensation replaced
// by the constant G' grad V at the target.
struct FilteredController {
    std::variant<FullyActuatedController, Prop4Controller> base;
    FilterAugmentation filter;
    Vector gravity_star;  // G' grad V(q*)
    void validate() const;
};

Vector augmented_control(const FilteredController& c, const Vector& q_err, const Vector& eta_x,
                         const Vector& xc, const Vector& xl, const Vector& psi);

using ControllerSpec = std::variant<Prop1Controller, Prop2Controller, Prop4Controller,
                                    FullyActuatedController, FilteredController>;

std::string family_name(const ControllerSpec& c);
int input_dimension(const ControllerSpec& c);
std::vector<Interval> saturation_bounds(const ControllerSpec& c);

bool is_diagonal(const Matrix& a, double tol = 0.0);

}  // namespace pbc
