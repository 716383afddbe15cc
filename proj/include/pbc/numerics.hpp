#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace pbc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

using ScalarField = std::function<double(const Vector&)>;
using VectorField = std::function<Vector(const Vector&)>;
using MatrixField = std::function<Matrix(const Vector&)>;

// Step used when the caller passes eps <= 0: base * max(1, |x|).
double auto_step(const Vector& x, double base);

inline constexpr double kGradientStep = 1e-6;
inline constexpr double kHessianStep = 1e-4;

Vector fd_gradient(const ScalarField& f, const Vector& x, double eps = 0.0);
Matrix fd_hessian(const ScalarField& f, const Vector& x, double eps = 0.0);
// Column j holds d f / d x_j.
Matrix fd_jacobian(const VectorField& f, const Vector& x, double eps = 0.0);

double max_abs(const Matrix& a);
double asymmetry(const Matrix& a);

// Cholesky attempt; tol < 0 selects 1e-10 * max|A|.
bool is_positive_definite(const Matrix& a, double tol = -1.0);
double min_symmetric_eigenvalue(const Matrix& a);
Matrix psd_sqrt(const Matrix& a);

struct Spectrum {
    Eigen::VectorXcd eigenvalues;
    double max_real_part = 0.0;
};

struct EigenPairs {
    Spectrum spectrum;
    Eigen::MatrixXcd vectors;
    double max_residual = 0.0;  // max |Av - lv| / |A|
};

inline constexpr int kMaxEigenDimension = 64;

Spectrum eigenvalues(const Matrix& a);
EigenPairs eigen_pairs(const Matrix& a);

using Dynamics = std::function<Vector(double, const Vector&)>;

struct IntegrateOptions {
    int substeps = 1;  // RK4 steps per recorded grid interval
};

struct RawTrace {
    std::vector<double> times;
    std::vector<Vector> states;
};

Vector rk4_step(const Dynamics& f, double t, const Vector& x, double h);

RawTrace integrate_fixed(const Dynamics& f, const Vector& x0, double t0, double tf,
                         double dt, const IntegrateOptions& opt = {});

bool all_finite(const Vector& v);

}  // namespace pbc
