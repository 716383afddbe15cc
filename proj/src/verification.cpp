#include "pbc/verification.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "pbc/errors.hpp"

namespace pbc {

CheckResult make_check(std::string name, double residual, double tolerance, std::optional<Vector> witness) {
    CheckResult r;
    r.name = std::move(name);
    r.residual = residual;
    r.tolerance = tolerance;
    r.pass = residual <= tolerance;
    r.witness = std::move(witness);
    return r;
}

CheckResult failed_check(std::string name, const std::string& reason) {
    CheckResult r;
    r.name = std::move(name);
    r.residual = std::numeric_limits<double>::infinity();
    r.tolerance = 0.0;
    r.pass = false;
    r.note = reason;
    return r;
}

bool VerificationReport::all_pass() const {
    for (const auto& c : checks) {
        if (!c.pass) return false;
    }
    return true;
}

namespace {

void need(bool ok, const InputAffineModel& m, const char* what) {
    if (!ok) throw MetadataError(m.name + ": " + what + " not supplied");
}

// Pass iff the Cholesky pivots exceed tol; the residual reports -lambda_min.
CheckResult pd_check(std::string name, const Matrix& h, const Vector& at, double rel_tol) {
    const double scale = std::max(max_abs(h), 1e-300);
    const double tol = rel_tol * scale;
    const double lmin = min_symmetric_eigenvalue(h);
    auto r = make_check(std::move(name), -lmin, -tol, at);
    r.pass = is_positive_definite(0.5 * (h + h.transpose()), tol);
    r.components["min_eigenvalue"] = lmin;
    r.components["scale"] = scale;
    return r;
}

Vector random_input(std::mt19937_64& rng, int m, double bound) {
    std::uniform_real_distribution<double> d(-bound, bound);
    Vector u(m);
    for (int i = 0; i < m; ++i) u[i] = d(rng);
    return u;
}

}  // namespace

CheckResult check_cyclo_passivity(const InputAffineModel& model, const SampleSpec& samples, double tol, Exec exec) {
    need(model.S || model.grad_S, model, "storage function");
    need(static_cast<bool>(model.ell), model, "dissipation map");
    const auto pts = draw_samples(samples);
    auto kernel = [&model](const Vector& x) {
        const Vector l = model.ell(x);
        return std::abs(model.storage_gradient(x).dot(model.f(x)) + l.squaredNorm());
    };
    const auto w = worst_case(pts, kernel, exec);
    auto r = make_check("cyclo_passivity", w.value, tol, pts.empty() ? std::optional<Vector>() : pts[w.index]);
    r.components["samples"] = static_cast<double>(pts.size());
    return r;
}

CheckResult check_equilibrium_gradient(const InputAffineModel& model, const Vector& x_star, double tol) {
    need(static_cast<bool>(model.gamma) || static_cast<bool>(model.grad_gamma), model, "output integral gamma");
    const Vector k = kappa(model, x_star);
    const Vector res = model.storage_gradient(x_star) + model.gamma_gradient(x_star) * k;
    auto r = make_check("equilibrium_gradient", res.norm(), tol, x_star);
    r.components["kappa_norm"] = k.norm();
    return r;
}

namespace {

// Hessian of gamma(x)' kappa.
Matrix gamma_kappa_hessian(const InputAffineModel& model, const Vector& x, const Vector& k) {
    if (model.grad_gamma) {
        VectorField gk = [&model, &k](const Vector& z) { return Vector(model.grad_gamma(z) * k); };
        const Matrix j = fd_jacobian(gk, x);
        return 0.5 * (j + j.transpose());
    }
    ScalarField s = [&model, &k](const Vector& z) { return model.gamma(z).dot(k); };
    return fd_hessian(s, x);
}

}  // namespace

Matrix shaped_hessian(const InputAffineModel& model, const Vector& x_star, const Vector& alpha, const Vector& beta) {
    need(static_cast<bool>(model.gamma) || static_cast<bool>(model.grad_gamma), model, "output integral gamma");
    if (alpha.size() != model.m || beta.size() != model.m) throw ShapeError("shape must have one entry per input");
    const Vector k = kappa(model, x_star);
    const Matrix gg = model.gamma_gradient(x_star);
    Matrix h = model.storage_hessian(x_star) + gamma_kappa_hessian(model, x_star, k);
    h += gg * alpha.cwiseProduct(beta).asDiagonal() * gg.transpose();
    return 0.5 * (h + h.transpose());
}

CheckResult check_shaped_hessian(const InputAffineModel& model, const Vector& x_star, const Vector& alpha,
                                 const Vector& beta) {
    return pd_check("shaped_hessian", shaped_hessian(model, x_star, alpha, beta), x_star, 1e-8);
}

CheckResult check_shaped_hessian(const InputAffineModel& model, const Vector& x_star, const SaturationShape& shape) {
    return check_shaped_hessian(model, x_star, shape.alpha, shape.beta);
}

CheckResult check_output_integral(const InputAffineModel& model, const SampleSpec& samples, double u_bound,
                                  double tol, Exec exec) {
    need(static_cast<bool>(model.gamma) || static_cast<bool>(model.grad_gamma), model, "output integral gamma");
    const auto xs = draw_samples(samples);
    std::mt19937_64 rng(samples.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<Vector> pts;
    pts.reserve(xs.size());
    for (const auto& x : xs) {
        Vector z(model.n + model.m);
        z << x, random_input(rng, model.m, u_bound);
        pts.push_back(std::move(z));
    }
    auto kernel = [&model](const Vector& z) {
        const Vector x = z.head(model.n), u = z.tail(model.m);
        const Vector gdot = model.gamma_gradient(x).transpose() * model.rhs(x, u);
        return (gdot - passive_output(model, x, u)).cwiseAbs().maxCoeff();
    };
    const auto w = worst_case(pts, kernel, exec);
    return make_check("output_integral", w.value, tol, pts.empty() ? std::optional<Vector>() : pts[w.index]);
}

CheckResult check_assumption3(const InputAffineModel& model, const SampleSpec& samples, double u_bound, double tol,
                              Exec exec) {
    need(static_cast<bool>(model.eta), model, "damped coordinate map eta");
    need(static_cast<bool>(model.gamma) || static_cast<bool>(model.grad_gamma), model, "output integral gamma");
    need(static_cast<bool>(model.lambda_ell) && static_cast<bool>(model.lambda_c), model, "dissipation weights");
    need(static_cast<bool>(model.ell), model, "dissipation map");

    const auto xs = draw_samples(samples);
    std::mt19937_64 rng(samples.seed ^ 0x51afd7ed558ccd7ULL);
    std::vector<Vector> pts;
    for (const auto& x : xs) {
        Vector z(model.n + model.m);
        z << x, random_input(rng, model.m, u_bound);
        pts.push_back(std::move(z));
    }
    auto orth = [&model](const Vector& z) {
        const Vector x = z.head(model.n);
        return max_abs(model.gamma_gradient(x).transpose() * model.eta_gradient(x));
    };
    auto diss = [&model](const Vector& z) {
        const Vector x = z.head(model.n), u = z.tail(model.m);
        const Vector l = model.ell(x);
        const Vector lw = l + model.w_at(x, l.size()) * u;
        const Vector xdot = model.rhs(x, u);
        const Vector etadot = model.eta_gradient(x).transpose() * xdot;
        const Vector y = passive_output(model, x, u);
        const double v = -lw.squaredNorm() + etadot.dot(model.lambda_ell(x) * etadot) + y.dot(model.lambda_c(x) * y);
        return std::max(0.0, v);
    };
    const auto wo = worst_case(pts, orth, exec);
    const auto wd = worst_case(pts, diss, exec);
    const bool first = wo.value >= wd.value;
    auto r = make_check("assumption3", std::max(wo.value, wd.value), tol,
                        pts.empty() ? std::optional<Vector>() : pts[first ? wo.index : wd.index]);
    r.components["orthogonality"] = wo.value;
    r.components["dissipation_inequality"] = wd.value;
    return r;
}

// ------------------------------------------------------------------- theta

namespace {

void check_theta_shapes(const ThetaBlocks& b) {
    const auto s = b.Lambda_ell.rows();
    const auto m = b.Lambda_c.rows();
    if (b.Lambda_ell.cols() != s || b.Lambda_c.cols() != m) throw ShapeError("dissipation weights must be square");
    if (b.Upsilon.rows() != m || b.Upsilon.cols() != s) throw ShapeError("Upsilon must be m x s");
    if (b.R_ell.rows() != m || b.R_ell.cols() != m || b.K_ell.rows() != m || b.K_ell.cols() != m)
        throw ShapeError("R_ell and K_ell must be m x m");
}

}  // namespace

Matrix theta_matrix(const ThetaBlocks& b) {
    check_theta_shapes(b);
    const auto s = b.Lambda_ell.rows();
    const auto m = b.Lambda_c.rows();
    const Matrix rinv = b.R_ell.inverse();
    Matrix t = Matrix::Zero(s + 2 * m, s + 2 * m);
    t.block(0, 0, s, s) = b.Lambda_ell;
    t.block(s, s, m, m) = b.Lambda_c;
    t.block(0, s + m, s, m) = 0.5 * b.Upsilon.transpose() * rinv;
    t.block(s, s + m, m, m) = -0.5 * rinv;
    t.block(s + m, 0, m, s) = 0.5 * rinv * b.Upsilon;
    t.block(s + m, s, m, m) = -0.5 * rinv;
    t.block(s + m, s + m, m, m) = b.K_ell * rinv;
    return t;
}

Matrix theta_schur(const ThetaBlocks& b) {
    check_theta_shapes(b);
    const auto s = b.Lambda_ell.rows();
    const auto m = b.Lambda_c.rows();
    Matrix a = Matrix::Zero(s + m, s + m);
    a.block(0, 0, s, s) = b.Lambda_ell;
    a.block(s, s, m, m) = b.Lambda_c;
    Matrix v(s + m, m);
    v.topRows(s) = b.Upsilon.transpose();
    v.bottomRows(m) = -Matrix::Identity(m, m);
    return a - 0.25 * v * (b.K_ell.inverse() * b.R_ell.inverse()) * v.transpose();
}

CheckResult check_theta_psd(const ThetaBlocks& b, bool strict) {
    const Matrix t = theta_matrix(b);
    const Matrix sc = theta_schur(b);
    const double tol = 1e-12 * std::max({max_abs(t), max_abs(sc), 1e-300});
    const double eig = min_symmetric_eigenvalue(t);
    const double schur = min_symmetric_eigenvalue(sc);
    // K_l R_l^-1 block is diagonal PD by construction, so the Schur complement decides.
    const bool by_eig = strict ? eig > tol : eig >= -tol;
    const bool by_schur = strict ? schur > tol : schur >= -tol;
    auto r = make_check(strict ? "theta_pd" : "theta_psd", -eig, strict ? -tol : tol);
    r.pass = by_eig;
    r.components["min_eigenvalue"] = eig;
    r.components["schur_min_eigenvalue"] = schur;
    r.components["schur_pass"] = by_schur ? 1.0 : 0.0;
    r.components["agree"] = by_eig == by_schur ? 1.0 : 0.0;
    if (!r.pass) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (t + t.transpose()));
        r.witness = es.eigenvectors().col(0);
    }
    return r;
}

CheckResult check_theta_psd(const Matrix& Lambda_ell, const Matrix& Lambda_c, const Matrix& Upsilon,
                            const Matrix& R_ell, const Matrix& K_ell, bool strict) {
    return check_theta_psd(ThetaBlocks{Lambda_ell, Lambda_c, Upsilon, R_ell, K_ell}, strict);
}

double suggest_theta_scaling(const ThetaBlocks& b, int bisections) {
    auto ok = [&b](double c) {
        ThetaBlocks t = b;
        t.K_ell *= c;
        t.R_ell *= c;
        return check_theta_psd(t, true).pass;
    };
    int k = 0;
    while (!ok(std::ldexp(1.0, k))) {
        if (++k > 200) throw NumericFailure("no scaling of K_ell, R_ell makes Theta positive definite");
    }
    double lo = k > 0 ? std::ldexp(1.0, k - 1) : 0.0;
    double hi = std::ldexp(1.0, k);
    for (int i = 0; i < bisections; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid > 0.0 && ok(mid)) hi = mid;
        else lo = mid;
    }
    return hi;
}

// --------------------------------------------------------- closed loop

Matrix closed_loop_hessian(const InputAffineModel& model, const Vector& x_star, const ControllerSpec& ctrl) {
    const Prop2Controller* core = nullptr;
    const Prop4Controller* p4 = std::get_if<Prop4Controller>(&ctrl);
    if (p4) core = &p4->core;
    else core = std::get_if<Prop2Controller>(&ctrl);
    if (!core) throw ConfigError("closed-loop Hessian is defined for the prop2 and prop4 families");

    const int n = model.n, m = model.m;
    const int dim = n + m + (p4 ? m : 0);
    const Matrix gg = model.gamma_gradient(x_star);
    const Matrix a = core->shape_c.alpha.cwiseProduct(core->shape_c.beta).asDiagonal();

    Matrix h = Matrix::Zero(dim, dim);
    h.topLeftCorner(n, n) = model.storage_hessian(x_star) + gamma_kappa_hessian(model, x_star, core->kappa);
    h.block(n, n, m, m) = core->Kc;
    Matrix j(m, dim);
    j.setZero();
    j.leftCols(n) = gg.transpose();
    j.block(0, n, m, m) = Matrix::Identity(m, m);
    h += j.transpose() * a * j;

    if (p4) {
        const Matrix al = p4->shape_ell.alpha.cwiseProduct(p4->shape_ell.beta).asDiagonal();
        Matrix jl = Matrix::Zero(m, dim);
        jl.leftCols(n) = p4->Upsilon * model.eta_gradient(x_star).transpose();
        jl.block(0, n + m, m, m) = p4->Kl;
        h += jl.transpose() * al * jl;
    }
    return 0.5 * (h + h.transpose());
}

CheckResult check_closed_loop_hessian(const InputAffineModel& model, const Vector& x_star,
                                      const ControllerSpec& ctrl) {
    const Matrix h = closed_loop_hessian(model, x_star, ctrl);
    Vector at = Vector::Zero(h.rows());
    at.head(model.n) = x_star;
    return pd_check("closed_loop_hessian", h, at, 1e-8);
}

Matrix suggest_Kc(const InputAffineModel& model, const Vector& x_star, const ControllerSpec& ctrl, int bisections) {
    const int m = model.m;
    auto with_kc = [&](double c) {
        ControllerSpec k = ctrl;
        if (auto* p2 = std::get_if<Prop2Controller>(&k)) p2->Kc = c * Matrix::Identity(m, m);
        else if (auto* p4 = std::get_if<Prop4Controller>(&k)) p4->core.Kc = c * Matrix::Identity(m, m);
        else throw ConfigError("K_c search is defined for the prop2 and prop4 families");
        return check_closed_loop_hessian(model, x_star, k).pass;
    };
    int k = 0;
    while (!with_kc(std::ldexp(1.0, k))) {
        if (++k > 200) throw NumericFailure("no scaling of K_c makes the closed-loop Hessian positive definite");
    }
    double lo = k > 0 ? std::ldexp(1.0, k - 1) : 0.0;
    double hi = std::ldexp(1.0, k);
    for (int i = 0; i < bisections; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid > 0.0 && with_kc(mid)) hi = mid;
        else lo = mid;
    }
    return hi * Matrix::Identity(m, m);
}

// --------------------------------------------------------------- monitors

namespace {

CheckResult monitor(const SimulationTrace& tr, const std::vector<double>& s, double tol) {
    if (tol < 0.0) tol = 1e-6 * (1.0 + (s.empty() ? 0.0 : std::abs(s.front())));
    double worst = -std::numeric_limits<double>::infinity();
    std::size_t at = 0;
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
        const double rate = (s[k + 1] - s[k]) / (tr.times[k + 1] - tr.times[k]);
        if (rate > worst || std::isnan(rate)) {
            worst = rate;
            at = k + 1;
        }
    }
    if (s.size() < 2) worst = 0.0;
    auto r = make_check("lyapunov_monitor", worst, tol, s.size() < 2 ? std::optional<Vector>() : tr.states[at]);
    if (s.size() >= 2) r.components["time"] = tr.times[at];
    r.components["initial_storage"] = s.empty() ? 0.0 : s.front();
    r.components["final_storage"] = s.empty() ? 0.0 : s.back();
    return r;
}

}  // namespace

CheckResult lyapunov_monitor(const SimulationTrace& trace, double tol) { return monitor(trace, trace.storage, tol); }

CheckResult lyapunov_monitor(const SimulationTrace& trace, const ScalarField& storage, double tol) {
    std::vector<double> s;
    s.reserve(trace.size());
    for (const auto& z : trace.states) s.push_back(storage(z));
    return monitor(trace, s, tol);
}

LinearizationResult linearization_stability(const VectorField& dynamics, const Vector& zeta_star, double eps) {
    const double res = dynamics(zeta_star).norm();
    if (res > 1e-6) throw PreconditionError("linearization point is not an equilibrium", res);
    LinearizationResult out;
    out.jacobian = fd_jacobian(dynamics, zeta_star, eps);
    out.spectrum = eigenvalues(out.jacobian);
    out.check = make_check("linearization_stability", out.spectrum.max_real_part, -1e-9, zeta_star);
    out.check.pass = out.spectrum.max_real_part < -1e-9;
    out.check.components["max_real_part"] = out.spectrum.max_real_part;
    out.check.components["equilibrium_residual"] = res;
    return out;
}

bool dissipation_obstacle_flag(const InputAffineModel& model, const Vector& x_star) {
    need(static_cast<bool>(model.ell), model, "dissipation map");
    return model.ell(x_star).norm() > 1e-9;
}

}  // namespace pbc
