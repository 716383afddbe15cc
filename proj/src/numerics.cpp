#include "pbc/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pbc/errors.hpp"

namespace pbc {

namespace {

double checked(const ScalarField& f, const Vector& at) {
    const double v = f(at);
    if (!std::isfinite(v)) throw EvaluationFailure("non-finite evaluation in finite difference", at);
    return v;
}

Vector checked(const VectorField& f, const Vector& at) {
    Vector v = f(at);
    if (!all_finite(v)) throw EvaluationFailure("non-finite evaluation in finite difference", at);
    return v;
}

}  // namespace

bool all_finite(const Vector& v) { return v.allFinite(); }

double auto_step(const Vector& x, double base) {
    return base * std::max(1.0, x.norm());
}

Vector fd_gradient(const ScalarField& f, const Vector& x, double eps) {
    if (eps <= 0.0) eps = auto_step(x, kGradientStep);
    Vector g(x.size());
    Vector xp = x, xm = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        xp[i] = x[i] + eps;
        xm[i] = x[i] - eps;
        g[i] = (checked(f, xp) - checked(f, xm)) / (2.0 * eps);
        xp[i] = xm[i] = x[i];
    }
    return g;
}

Matrix fd_hessian(const ScalarField& f, const Vector& x, double eps) {
    if (eps <= 0.0) eps = auto_step(x, kHessianStep);
    const Eigen::Index n = x.size();
    Matrix h(n, n);
    const double f0 = checked(f, x);
    Vector y = x;
    for (Eigen::Index i = 0; i < n; ++i) {
        y[i] = x[i] + eps;
        const double fp = checked(f, y);
        y[i] = x[i] - eps;
        const double fm = checked(f, y);
        y[i] = x[i];
        h(i, i) = (fp - 2.0 * f0 + fm) / (eps * eps);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (int a : {1, -1}) {
                for (int b : {1, -1}) {
                    y[i] = x[i] + a * eps;
                    y[j] = x[j] + b * eps;
                    s += a * b * checked(f, y);
                }
            }
            y[i] = x[i];
            y[j] = x[j];
            h(i, j) = h(j, i) = s / (4.0 * eps * eps);
        }
    }
    return 0.5 * (h + h.transpose());
}

Matrix fd_jacobian(const VectorField& f, const Vector& x, double eps) {
    if (eps <= 0.0) eps = auto_step(x, kGradientStep);
    Vector xp = x, xm = x;
    Matrix j;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        xp[i] = x[i] + eps;
        xm[i] = x[i] - eps;
        Vector col = (checked(f, xp) - checked(f, xm)) / (2.0 * eps);
        if (i == 0) j.resize(col.size(), x.size());
        j.col(i) = col;
        xp[i] = xm[i] = x[i];
    }
    return j;
}

double max_abs(const Matrix& a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

double asymmetry(const Matrix& a) {
    if (a.rows() != a.cols()) throw ShapeError("matrix is not square");
    return max_abs(a - a.transpose());
}

bool is_positive_definite(const Matrix& a, double tol) {
    if (a.rows() != a.cols()) throw ShapeError("positive-definiteness needs a square matrix");
    if (tol < 0.0) tol = 1e-10 * max_abs(a);
    if (asymmetry(a) > tol) throw ShapeError("positive-definiteness needs a symmetric matrix");
    const Eigen::Index n = a.rows();
    Matrix l = Matrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double d = a(j, j) - l.row(j).head(j).squaredNorm();
        if (!(d > tol)) return false;
        l(j, j) = std::sqrt(d);
        for (Eigen::Index i = j + 1; i < n; ++i) {
            l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
        }
    }
    return true;
}

double min_symmetric_eigenvalue(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

Matrix psd_sqrt(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.transpose()));
    Vector d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

namespace {

Eigen::EigenSolver<Matrix> solve(const Matrix& a, bool vectors) {
    if (a.rows() != a.cols()) throw ShapeError("eigenvalues need a square matrix");
    if (a.rows() > kMaxEigenDimension) throw ShapeError("eigenvalue routine limited to dimension 64");
    if (!a.allFinite()) throw NumericFailure("matrix has non-finite entries");
    Eigen::EigenSolver<Matrix> es;
    es.setMaxIterations(40 * std::max<Eigen::Index>(1, a.rows()));
    es.compute(a, vectors);
    if (es.info() != Eigen::Success) throw NumericFailure("QR iteration did not converge");
    return es;
}

Spectrum to_spectrum(const Eigen::VectorXcd& ev) {
    Spectrum s;
    s.eigenvalues = ev;
    s.max_real_part = ev.size() ? ev.real().maxCoeff() : 0.0;
    return s;
}

}  // namespace

Spectrum eigenvalues(const Matrix& a) {
    if (a.rows() == 0) return {};
    return to_spectrum(solve(a, false).eigenvalues());
}

EigenPairs eigen_pairs(const Matrix& a) {
    EigenPairs out;
    if (a.rows() == 0) return out;
    auto es = solve(a, true);
    out.spectrum = to_spectrum(es.eigenvalues());
    out.vectors = es.eigenvectors();
    const double scale = std::max(a.norm(), 1e-300);
    Eigen::MatrixXcd ac = a.cast<std::complex<double>>();
    for (Eigen::Index k = 0; k < a.rows(); ++k) {
        const auto v = out.vectors.col(k);
        const double r = (ac * v - out.spectrum.eigenvalues[k] * v).norm() / scale;
        out.max_residual = std::max(out.max_residual, r);
    }
    return out;
}

Vector rk4_step(const Dynamics& f, double t, const Vector& x, double h) {
    const Vector k1 = f(t, x);
    const Vector k2 = f(t + 0.5 * h, x + 0.5 * h * k1);
    const Vector k3 = f(t + 0.5 * h, x + 0.5 * h * k2);
    const Vector k4 = f(t + h, x + h * k3);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

RawTrace integrate_fixed(const Dynamics& f, const Vector& x0, double t0, double tf, double dt,
                         const IntegrateOptions& opt) {
    if (!(dt > 0.0)) throw ConfigError("integration step must be positive");
    if (!(tf > t0)) throw ConfigError("final time must exceed initial time");
    if (opt.substeps < 1) throw ConfigError("substeps must be at least 1");
    if (!all_finite(x0)) throw DivergenceError("non-finite initial state", t0);

    const double span = tf - t0;
    auto intervals = static_cast<long long>(std::ceil(span / dt - 1e-9));
    if (intervals < 1) intervals = 1;

    RawTrace tr;
    tr.times.reserve(intervals + 1);
    tr.states.reserve(intervals + 1);
    tr.times.push_back(t0);
    tr.states.push_back(x0);

    Vector x = x0;
    for (long long k = 0; k < intervals; ++k) {
        const double ta = t0 + static_cast<double>(k) * dt;
        const double tb = (k + 1 == intervals) ? tf : t0 + static_cast<double>(k + 1) * dt;
        const double h = (tb - ta) / opt.substeps;
        for (int s = 0; s < opt.substeps; ++s) {
            const double ts = ta + s * h;
            x = rk4_step(f, ts, x, h);
            if (!all_finite(x)) {
                std::ostringstream msg;
                msg << "state became non-finite at t=" << ts + h;
                throw DivergenceError(msg.str(), ts + h);
            }
        }
        tr.times.push_back(tb);
        tr.states.push_back(x);
    }
    return tr;
}

}  // namespace pbc
