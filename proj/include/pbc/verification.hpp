#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pbc/controllers.hpp"
#include "pbc/models.hpp"
#include "pbc/sampling.hpp"
#include "pbc/simulation.hpp"

namespace pbc {

struct CheckResult {
    std::string name;
    bool pass = false;
    double residual = 0.0;
    double tolerance = 0.0;
    std::optional<Vector> witness;
    std::map<std::string, double> components;
    std::string note;
};

CheckResult make_check(std::string name, double residual, double tolerance, std::optional<Vector> witness = {});
// A check that could not be evaluated (missing metadata and the like).
CheckResult failed_check(std::string name, const std::string& reason);

CheckResult check_cyclo_passivity(const InputAffineModel& model, const SampleSpec& samples, double tol = 1e-8,
                                  Exec exec = Exec::parallel);
CheckResult check_equilibrium_gradient(const InputAffineModel& model, const Vector& x_star, double tol = 1e-8);
// alpha, beta are taken as given so that degenerate limits can be probed.
Matrix shaped_hessian(const InputAffineModel& model, const Vector& x_star, const Vector& alpha, const Vector& beta);
CheckResult check_shaped_hessian(const InputAffineModel& model, const Vector& x_star, const Vector& alpha,
                                 const Vector& beta);
CheckResult check_shaped_hessian(const InputAffineModel& model, const Vector& x_star, const SaturationShape& shape);
// gamma_dot = y at random (x, u); u drawn from [-u_bound, u_bound]^m.
CheckResult check_output_integral(const InputAffineModel& model, const SampleSpec& samples, double u_bound = 1.0,
                                  double tol = 1e-8, Exec exec = Exec::parallel);
CheckResult check_assumption3(const InputAffineModel& model, const SampleSpec& samples, double u_bound = 1.0,
                              double tol = 1e-8, Exec exec = Exec::parallel);

struct ThetaBlocks {
    Matrix Lambda_ell;  // s x s
    Matrix Lambda_c;    // m x m
    Matrix Upsilon;     // m x s
    Matrix R_ell;       // m x m
    Matrix K_ell;       // m x m
};

Matrix theta_matrix(const ThetaBlocks& b);
Matrix theta_schur(const ThetaBlocks& b);
CheckResult check_theta_psd(const ThetaBlocks& b, bool strict);
CheckResult check_theta_psd(const Matrix& Lambda_ell, const Matrix& Lambda_c, const Matrix& Upsilon,
                            const Matrix& R_ell, const Matrix& K_ell, bool strict);
// Smallest power-of-two-then-bisected factor c with (c K_ell, c R_ell) passing the strict test.
double suggest_theta_scaling(const ThetaBlocks& b, int bisections = 8);

// Hessian of the closed-loop storage at (x*, 0[, 0]) in (x, x_c[, x_l]) coordinates.
Matrix closed_loop_hessian(const InputAffineModel& model, const Vector& x_star, const ControllerSpec& ctrl);
CheckResult check_closed_loop_hessian(const InputAffineModel& model, const Vector& x_star,
                                      const ControllerSpec& ctrl);
Matrix suggest_Kc(const InputAffineModel& model, const Vector& x_star, const ControllerSpec& ctrl,
                  int bisections = 8);

CheckResult lyapunov_monitor(const SimulationTrace& trace, double tol = -1.0);
CheckResult lyapunov_monitor(const SimulationTrace& trace, const ScalarField& storage, double tol = -1.0);

struct LinearizationResult {
    Spectrum spectrum;
    Matrix jacobian;
    CheckResult check;
};

LinearizationResult linearization_stability(const VectorField& dynamics, const Vector& zeta_star,
                                            double eps = 0.0);

bool dissipation_obstacle_flag(const InputAffineModel& model, const Vector& x_star);

struct VerificationReport {
    std::string subject;
    std::vector<CheckResult> checks;
    std::vector<std::string> notes;

    bool all_pass() const;
};

}  // namespace pbc
