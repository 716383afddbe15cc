#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pbc/numerics.hpp"

namespace pbc {

struct MechanicalView {
    int dof = 0;
    Matrix G;                // dof x m
    MatrixField M;           // q -> M(q)
    ScalarField V;           // q -> V(q)
    VectorField gradV;       // q -> dV/dq
};

// Input-affine plant xdot = f(x) + g(x) u with optional passivity data.
// Jacobian-style fields hold gradients column-wise: grad_gamma is n x m,
// grad_eta is n x s.
struct InputAffineModel {
    std::string name;
    int n = 0;
    int m = 0;
    VectorField f;
    MatrixField g;

    ScalarField S;
    VectorField grad_S;     // optional, finite differences otherwise
    VectorField ell;
    MatrixField w;          // r x m, zero when absent
    MatrixField Dskew;      // m x m, zero when absent
    VectorField gamma;
    MatrixField grad_gamma; // optional
    VectorField eta;
    MatrixField grad_eta;   // optional
    MatrixField lambda_ell; // s x s diagonal
    MatrixField lambda_c;   // m x m diagonal

    // Coordinates that a controller must not read (velocities, momenta, ...).
    std::vector<int> unmeasured;
    std::optional<MechanicalView> mech;

    Vector drift(const Vector& x) const { return f(x); }
    Vector rhs(const Vector& x, const Vector& u) const { return f(x) + g(x) * u; }

    Vector storage_gradient(const Vector& x) const;
    Matrix storage_hessian(const Vector& x) const;
    Matrix gamma_gradient(const Vector& x) const;
    Matrix eta_gradient(const Vector& x) const;
    Matrix w_at(const Vector& x, Eigen::Index r) const;
    Matrix dskew_at(const Vector& x) const;
    Vector measurement_view(const Vector& x) const;
};

void require_full_column_rank(const Matrix& g, const char* what = "input matrix");

double equilibrium_residual(const InputAffineModel& model, const Vector& x_star);
Vector kappa(const InputAffineModel& model, const Vector& x_star, double tol = 1e-8);
Vector passive_output(const InputAffineModel& model, const Vector& x, const Vector& u);

struct MechanicalModel {
    std::string name;
    int dof = 0;
    MatrixField M;
    ScalarField V;
    VectorField gradV;  // optional, finite differences otherwise
    // (q, p) -> diagonal PSD damping; absent means zero.
    std::function<Matrix(const Vector&, const Vector&)> Dmat;
    Matrix G;
    // Optional analytic dM/dq_i, one matrix per coordinate.
    std::function<std::vector<Matrix>(const Vector&)> dM;
};

Vector mech_gradient_q(const MechanicalModel& mech, const Vector& q, const Vector& p);
InputAffineModel mech_to_affine(const MechanicalModel& mech, bool with_dissipation_split = false);

struct BraytonMoserModel {
    std::string name;
    int varsigma = 0;  // inductors
    int varpi = 0;     // capacitors
    Matrix L;
    Matrix C;
    Matrix Gamma;      // varsigma x varpi
    VectorField v_R;
    VectorField i_G;
    MatrixField dv_R;  // optional Jacobians
    MatrixField di_G;
    Matrix gtilde_L;   // varsigma x m_L (may have zero columns)
    Matrix gtilde_C;   // varpi x m_C

    int n() const { return varsigma + varpi; }
    int m() const { return static_cast<int>(gtilde_L.cols() + gtilde_C.cols()); }
    Matrix Q() const;
    Matrix Xi() const;
    Matrix gtilde() const;
    Vector grad_P(const Vector& x) const;
    Matrix hess_P(const Vector& x) const;
    Matrix input_matrix() const;  // Q^-1 gtilde
};

Matrix bm_qtilde_block(const BraytonMoserModel& bm, const Vector& x);
Matrix bm_qtilde(const BraytonMoserModel& bm, const Vector& x);
double bm_ptilde(const BraytonMoserModel& bm, const Vector& x);
Vector bm_ptilde_gradient(const BraytonMoserModel& bm, const Vector& x);
InputAffineModel bm_to_affine(const BraytonMoserModel& bm);
Vector bm_passive_output(const BraytonMoserModel& bm, const Vector& x, const Vector& u);
double bm_integrability_residual(const BraytonMoserModel& bm, const Vector& x);
// Sampled check of the passivity-type conditions on v_R and i_G.
double bm_monotonicity_violation(const BraytonMoserModel& bm, const std::vector<Vector>& states);

}  // namespace pbc
