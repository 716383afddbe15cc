#include "pbc/models.hpp"

#include <cmath>

#include "pbc/errors.hpp"

namespace pbc {

Vector InputAffineModel::storage_gradient(const Vector& x) const {
    if (grad_S) return grad_S(x);
    if (!S) throw MetadataError(name + ": storage function not supplied");
    return fd_gradient(S, x);
}

Matrix InputAffineModel::storage_hessian(const Vector& x) const {
    if (grad_S) {
        Matrix j = fd_jacobian(grad_S, x);
        return 0.5 * (j + j.transpose());
    }
    if (!S) throw MetadataError(name + ": storage function not supplied");
    return fd_hessian(S, x);
}

Matrix InputAffineModel::gamma_gradient(const Vector& x) const {
    if (grad_gamma) return grad_gamma(x);
    if (!gamma) throw MetadataError(name + ": output integral gamma not supplied");
    return fd_jacobian(gamma, x).transpose();
}

Matrix InputAffineModel::eta_gradient(const Vector& x) const {
    if (grad_eta) return grad_eta(x);
    if (!eta) throw MetadataError(name + ": damped coordinate map eta not supplied");
    return fd_jacobian(eta, x).transpose();
}

Matrix InputAffineModel::w_at(const Vector& x, Eigen::Index r) const {
    if (w) return w(x);
    return Matrix::Zero(r, m);
}

Matrix InputAffineModel::dskew_at(const Vector& x) const {
    if (Dskew) return Dskew(x);
    return Matrix::Zero(m, m);
}

Vector InputAffineModel::measurement_view(const Vector& x) const {
    Vector v = x;
    for (int i : unmeasured) v[i] = 0.0;
    return v;
}

void require_full_column_rank(const Matrix& g, const char* what) {
    if (g.cols() == 0) return;
    Eigen::JacobiSVD<Matrix> svd(g);
    const auto& s = svd.singularValues();
    if (g.rows() < g.cols() || s[s.size() - 1] <= 1e-10)
        throw RankError(std::string(what) + " is not of full column rank");
}

namespace {

struct Projection {
    Vector coeff;
    double residual;
};

Projection project(const Matrix& g, const Vector& f) {
    require_full_column_rank(g);
    Vector c = g.colPivHouseholderQr().solve(f);
    return {c, (f - g * c).norm()};
}

}  // namespace

double equilibrium_residual(const InputAffineModel& model, const Vector& x_star) {
    return project(model.g(x_star), model.f(x_star)).residual;
}

Vector kappa(const InputAffineModel& model, const Vector& x_star, double tol) {
    auto p = project(model.g(x_star), model.f(x_star));
    if (p.residual > tol)
        throw NotAssignable(model.name + ": target is not an assignable equilibrium", p.residual);
    return p.coeff;
}

Vector passive_output(const InputAffineModel& model, const Vector& x, const Vector& u) {
    if (!model.S && !model.grad_S) throw MetadataError(model.name + ": storage function not supplied");
    Vector y = model.g(x).transpose() * model.storage_gradient(x);
    if (model.w) {
        if (!model.ell) throw MetadataError(model.name + ": feedthrough needs the dissipation map");
        const Vector l = model.ell(x);
        const Matrix w = model.w(x);
        y += 2.0 * w.transpose() * l + w.transpose() * w * u;
    }
    if (model.Dskew) y += model.Dskew(x) * u;
    return y;
}

// ---------------------------------------------------------------- mechanical

namespace {

Vector velocity(const MechanicalModel& mech, const Vector& q, const Vector& p) {
    return mech.M(q).ldlt().solve(p);
}

Matrix damping(const MechanicalModel& mech, const Vector& q, const Vector& p) {
    if (mech.Dmat) return mech.Dmat(q, p);
    return Matrix::Zero(mech.dof, mech.dof);
}

Vector potential_gradient(const MechanicalModel& mech, const Vector& q) {
    if (mech.gradV) return mech.gradV(q);
    return fd_gradient(mech.V, q);
}

// Row index driven by each input channel; -1 for a column that is not a unit selector.
std::vector<int> actuated_rows(const Matrix& G) {
    std::vector<int> rows;
    for (Eigen::Index j = 0; j < G.cols(); ++j) {
        int row = -1;
        for (Eigen::Index i = 0; i < G.rows(); ++i) {
            if (G(i, j) != 0.0) row = (row == -1) ? static_cast<int>(i) : -2;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

Vector mech_gradient_q(const MechanicalModel& mech, const Vector& q, const Vector& p) {
    Vector grad = potential_gradient(mech, q);
    const Vector v = velocity(mech, q, p);
    if (mech.dM) {
        const auto dm = mech.dM(q);
        for (int i = 0; i < mech.dof; ++i) grad[i] -= 0.5 * v.dot(dm[i] * v);
    } else {
        ScalarField kinetic = [&](const Vector& qq) { return 0.5 * p.dot(mech.M(qq).ldlt().solve(p)); };
        grad += fd_gradient(kinetic, q);
    }
    return grad;
}

InputAffineModel mech_to_affine(const MechanicalModel& mech, bool with_dissipation_split) {
    const int n = mech.dof;
    if (mech.G.rows() != n) throw ShapeError("actuation matrix row count must equal the degrees of freedom");
    const int m = static_cast<int>(mech.G.cols());

    InputAffineModel out;
    out.name = mech.name;
    out.n = 2 * n;
    out.m = m;

    out.f = [mech, n](const Vector& x) {
        const Vector q = x.head(n), p = x.tail(n);
        const Vector v = velocity(mech, q, p);
        Vector dx(2 * n);
        dx.head(n) = v;
        dx.tail(n) = -mech_gradient_q(mech, q, p) - damping(mech, q, p) * v;
        return dx;
    };
    Matrix gfull = Matrix::Zero(2 * n, m);
    gfull.bottomRows(n) = mech.G;
    out.g = [gfull](const Vector&) { return gfull; };

    out.S = [mech, n](const Vector& x) {
        const Vector q = x.head(n), p = x.tail(n);
        return 0.5 * p.dot(velocity(mech, q, p)) + mech.V(q);
    };
    out.grad_S = [mech, n](const Vector& x) {
        const Vector q = x.head(n), p = x.tail(n);
        Vector g(2 * n);
        g.head(n) = mech_gradient_q(mech, q, p);
        g.tail(n) = velocity(mech, q, p);
        return g;
    };
    out.ell = [mech, n](const Vector& x) {
        const Vector q = x.head(n), p = x.tail(n);
        const Vector d = damping(mech, q, p).diagonal().cwiseMax(0.0).cwiseSqrt();
        return Vector(d.cwiseProduct(velocity(mech, q, p)));
    };

    const Matrix G = mech.G;
    out.gamma = [G, n](const Vector& x) { return Vector(G.transpose() * x.head(n)); };
    Matrix gg = Matrix::Zero(2 * n, m);
    gg.topRows(n) = G;
    out.grad_gamma = [gg](const Vector&) { return gg; };

    for (int i = n; i < 2 * n; ++i) out.unmeasured.push_back(i);

    MechanicalView view;
    view.dof = n;
    view.G = mech.G;
    view.M = mech.M;
    view.V = mech.V;
    view.gradV = [mech](const Vector& q) { return potential_gradient(mech, q); };
    out.mech = view;

    // Dissipation split into actuated / unactuated blocks.
    const auto rows = actuated_rows(mech.G);
    std::vector<bool> is_actuated(n, false);
    for (int r : rows) {
        if (r >= 0) is_actuated[r] = true;
    }
    const Matrix d0 = damping(mech, Vector::Zero(n), Vector::Zero(n));
    std::vector<int> damped;
    for (int j = 0; j < n; ++j) {
        if (!is_actuated[j] && d0(j, j) != 0.0) damped.push_back(j);
    }
    bool actuated_ok = true;
    for (int r : rows) {
        if (r < 0 || d0(r, r) == 0.0) actuated_ok = false;
    }
    if (with_dissipation_split) {
        if (!actuated_ok) throw AssumptionViolation(mech.name + ": actuated damping block is singular");
        if (damped.empty()) throw MetadataError(mech.name + ": no damped unactuated coordinate for eta");
    }
    if (actuated_ok && !damped.empty()) {
        const int s = static_cast<int>(damped.size());
        out.eta = [damped, s](const Vector& x) {
            Vector e(s);
            for (int k = 0; k < s; ++k) e[k] = x[damped[k]];
            return e;
        };
        Matrix ge = Matrix::Zero(2 * n, s);
        for (int k = 0; k < s; ++k) ge(damped[k], k) = 1.0;
        out.grad_eta = [ge](const Vector&) { return ge; };
        out.lambda_ell = [mech, damped, s, n](const Vector& x) {
            const Matrix d = damping(mech, x.head(n), x.tail(n));
            Matrix l = Matrix::Zero(s, s);
            for (int k = 0; k < s; ++k) l(k, k) = d(damped[k], damped[k]);
            return l;
        };
        out.lambda_c = [mech, rows, m, n](const Vector& x) {
            const Matrix d = damping(mech, x.head(n), x.tail(n));
            Matrix l = Matrix::Zero(m, m);
            for (int k = 0; k < m; ++k) l(k, k) = d(rows[k], rows[k]);
            return l;
        };
    }
    return out;
}

}  // namespace pbc
