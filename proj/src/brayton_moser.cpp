#include "pbc/models.hpp"

#include <algorithm>

#include "pbc/errors.hpp"

namespace pbc {

namespace {

Matrix block_diag(const Matrix& a, const Matrix& b) {
    Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    out.topLeftCorner(a.rows(), a.cols()) = a;
    out.bottomRightCorner(b.rows(), b.cols()) = b;
    return out;
}

Matrix resistor_jacobian(const BraytonMoserModel& bm, const Vector& i) {
    if (bm.varsigma == 0) return Matrix(0, 0);
    if (bm.dv_R) return bm.dv_R(i);
    return fd_jacobian(bm.v_R, i);
}

Matrix conductor_jacobian(const BraytonMoserModel& bm, const Vector& v) {
    if (bm.varpi == 0) return Matrix(0, 0);
    if (bm.di_G) return bm.di_G(v);
    return fd_jacobian(bm.i_G, v);
}

Matrix inverse_or_empty(const Matrix& a) {
    if (a.size() == 0) return a;
    return a.inverse();
}

Vector eval_or_empty(const VectorField& f, const Vector& x) {
    if (x.size() == 0) return Vector(0);
    return f(x);
}

}  // namespace

Matrix BraytonMoserModel::Q() const { return block_diag(-L, C); }

Matrix BraytonMoserModel::Xi() const { return block_diag(inverse_or_empty(L), inverse_or_empty(C)); }

Matrix BraytonMoserModel::gtilde() const { return block_diag(gtilde_L, gtilde_C); }

Matrix BraytonMoserModel::input_matrix() const { return inverse_or_empty(Q()) * gtilde(); }

Vector BraytonMoserModel::grad_P(const Vector& x) const {
    const Vector i = x.head(varsigma), v = x.tail(varpi);
    Vector g(n());
    g.head(varsigma) = Gamma * v + eval_or_empty(v_R, i);
    g.tail(varpi) = Gamma.transpose() * i - eval_or_empty(i_G, v);
    return g;
}

Matrix BraytonMoserModel::hess_P(const Vector& x) const {
    const Vector i = x.head(varsigma), v = x.tail(varpi);
    Matrix h(n(), n());
    h.topLeftCorner(varsigma, varsigma) = resistor_jacobian(*this, i);
    h.topRightCorner(varsigma, varpi) = Gamma;
    h.bottomLeftCorner(varpi, varsigma) = Gamma.transpose();
    h.bottomRightCorner(varpi, varpi) = -conductor_jacobian(*this, v);
    return h;
}

Matrix bm_qtilde_block(const BraytonMoserModel& bm, const Vector& x) {
    const Vector i = x.head(bm.varsigma), v = x.tail(bm.varpi);
    const int a = bm.varsigma, b = bm.varpi;
    Matrix q(bm.n(), bm.n());
    q.topLeftCorner(a, a) = -resistor_jacobian(bm, i);
    q.topRightCorner(a, b) = bm.Gamma;
    q.bottomLeftCorner(b, a) = -bm.Gamma.transpose();
    q.bottomRightCorner(b, b) = -conductor_jacobian(bm, v);
    return q;
}

namespace {

void require_regular(const BraytonMoserModel& bm, const Matrix& hess) {
    Eigen::JacobiSVD<Matrix> svd(hess);
    const auto& s = svd.singularValues();
    if (s.size() && s[s.size() - 1] <= 1e-10)
        throw DegenerateNetwork(bm.name + ": Hessian of the mixed potential is singular");
}

}  // namespace

Matrix bm_qtilde(const BraytonMoserModel& bm, const Vector& x) {
    const Matrix h = bm.hess_P(x);
    require_regular(bm, h);
    return h * bm.Xi() * bm.Q();
}

double bm_ptilde(const BraytonMoserModel& bm, const Vector& x) {
    const Vector gp = bm.grad_P(x);
    return 0.5 * gp.dot(bm.Xi() * gp);
}

Vector bm_ptilde_gradient(const BraytonMoserModel& bm, const Vector& x) {
    return bm.hess_P(x) * bm.Xi() * bm.grad_P(x);
}

InputAffineModel bm_to_affine(const BraytonMoserModel& bm) {
    require_regular(bm, bm.hess_P(Vector::Zero(bm.n())));

    InputAffineModel out;
    out.name = bm.name;
    out.n = bm.n();
    out.m = bm.m();
    const Matrix qinv = bm.Q().inverse();
    const Matrix g = qinv * bm.gtilde();

    out.f = [bm, qinv](const Vector& x) { return Vector(qinv * bm.grad_P(x)); };
    out.g = [g](const Vector&) { return g; };
    out.S = [bm](const Vector& x) { return bm_ptilde(bm, x); };
    out.grad_S = [bm](const Vector& x) { return bm_ptilde_gradient(bm, x); };

    // With N = -sym(Qt) and K = skew(Qt): dS/dt = -|N^(1/2) xdot|^2 + y'u.
    out.ell = [bm, qinv](const Vector& x) {
        const Matrix qt = bm_qtilde_block(bm, x);
        const Matrix nn = -0.5 * (qt + qt.transpose());
        return Vector(psd_sqrt(nn) * (qinv * bm.grad_P(x)));
    };
    out.w = [bm, g](const Vector& x) {
        const Matrix qt = bm_qtilde_block(bm, x);
        return Matrix(psd_sqrt(-0.5 * (qt + qt.transpose())) * g);
    };
    out.Dskew = [bm, g](const Vector& x) {
        const Matrix qt = bm_qtilde_block(bm, x);
        return Matrix(g.transpose() * (0.5 * (qt - qt.transpose())) * g);
    };
    return out;
}

Vector bm_passive_output(const BraytonMoserModel& bm, const Vector& x, const Vector& u) {
    const Matrix g = bm.input_matrix();
    const Vector xdot = bm.Q().inverse() * bm.grad_P(x) + g * u;
    return -g.transpose() * bm_qtilde(bm, x).transpose() * xdot;
}

double bm_integrability_residual(const BraytonMoserModel& bm, const Vector& x) {
    const Matrix g = bm.input_matrix();
    bm_qtilde(bm, x);  // rank precondition
    double worst = 0.0;
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
        VectorField h = [&bm, &g, j](const Vector& z) { return Vector(bm_qtilde(bm, z) * g.col(j)); };
        const Matrix jac = fd_jacobian(h, x);
        worst = std::max(worst, max_abs(jac - jac.transpose()));
    }
    return worst;
}

double bm_monotonicity_violation(const BraytonMoserModel& bm, const std::vector<Vector>& states) {
    double worst = 0.0;
    for (const auto& x : states) {
        const Vector i = x.head(bm.varsigma), v = x.tail(bm.varpi);
        if (bm.varsigma) {
            worst = std::max(worst, -i.dot(bm.v_R(i)));
            worst = std::max(worst, -min_symmetric_eigenvalue(resistor_jacobian(bm, i)));
        }
        if (bm.varpi) {
            worst = std::max(worst, -v.dot(bm.i_G(v)));
            worst = std::max(worst, -min_symmetric_eigenvalue(conductor_jacobian(bm, v)));
        }
    }
    return worst;
}

}  // namespace pbc
