#include "pbc/controllers.hpp"

#include <cmath>

#include "pbc/errors.hpp"

namespace pbc {

namespace {

void require_positive(const Vector& v, const std::string& what) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!(v[i] > 0.0) || !std::isfinite(v[i])) throw ConfigError(what + " entries must be positive");
    }
}

void require_size(Eigen::Index got, Eigen::Index want, const std::string& what) {
    if (got != want) throw ShapeError(what + " has the wrong dimension");
}

void require_pd(const Matrix& a, Eigen::Index m, const std::string& what) {
    if (a.rows() != m || a.cols() != m) throw ShapeError(what + " has the wrong dimension");
    if (asymmetry(a) > 1e-12 * std::max(1.0, max_abs(a)) || !is_positive_definite(a))
        throw ConfigError(what + " must be symmetric positive definite");
}

void require_diag_pd(const Matrix& a, Eigen::Index m, const std::string& what) {
    require_pd(a, m, what);
    if (!is_diagonal(a)) throw ConfigError(what + " must be diagonal");
}

}  // namespace

bool is_diagonal(const Matrix& a, double tol) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (i != j && std::abs(a(i, j)) > tol) return false;
        }
    }
    return true;
}

void SaturationShape::validate(const char* what) const {
    require_size(beta.size(), alpha.size(), what);
    require_positive(alpha, std::string(what) + " alpha");
    require_positive(beta, std::string(what) + " beta");
}

double log_cosh(double t) {
    const double a = std::abs(t);
    return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

double phi_value(const SaturationShape& s, const Vector& z) {
    require_size(z.size(), s.size(), "saturation argument");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) sum += s.alpha[i] / s.beta[i] * log_cosh(s.beta[i] * z[i]);
    return sum;
}

Vector phi_grad(const SaturationShape& s, const Vector& z) {
    require_size(z.size(), s.size(), "saturation argument");
    Vector g(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) g[i] = s.alpha[i] * std::tanh(s.beta[i] * z[i]);
    return g;
}

Vector phi_curvature(const SaturationShape& s, const Vector& z) {
    require_size(z.size(), s.size(), "saturation argument");
    Vector h(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const double c = 1.0 / std::cosh(s.beta[i] * z[i]);
        h[i] = s.alpha[i] * s.beta[i] * c * c;
    }
    return h;
}

// ------------------------------------------------------------------ prop 1

void Prop1Controller::validate() const {
    shape.validate("prop1 shape");
    const auto m = shape.size();
    require_size(kp.size(), m, "kp");
    require_positive(kp, "kp");
    require_size(kappa.size(), m, "kappa");
    require_size(gamma_star.size(), m, "gamma target");
}

Vector prop1_control(const Prop1Controller& c, const Vector& gamma_x, const Vector& y) {
    Vector damping(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) damping[i] = c.kp[i] * std::tanh(y[i]);
    return -phi_grad(c.shape, gamma_x - c.gamma_star) - c.kappa - damping;
}

// ------------------------------------------------------------------ prop 2

void Prop2Controller::validate() const {
    shape_c.validate("controller shape");
    const auto m = shape_c.size();
    require_size(kappa.size(), m, "kappa");
    require_size(gamma_star.size(), m, "gamma target");
    require_pd(Kc, m, "Kc");
    require_pd(Rc, m, "Rc");
    if (xc0.size()) require_size(xc0.size(), m, "initial controller state");
}

Vector prop2_zc(const Prop2Controller& c, const Vector& gamma_x, const Vector& xc) {
    return gamma_x - c.gamma_star + xc;
}

Vector prop2_control(const Prop2Controller& c, const Vector& gamma_x, const Vector& xc) {
    return -c.kappa - phi_grad(c.shape_c, prop2_zc(c, gamma_x, xc));
}

Vector prop2_dynamics(const Prop2Controller& c, const Vector& gamma_x, const Vector& xc) {
    return -c.Rc * (phi_grad(c.shape_c, prop2_zc(c, gamma_x, xc)) + c.Kc * xc);
}

// ------------------------------------------------------------------ prop 4

void Prop4Controller::validate() const {
    core.validate();
    const auto m = core.shape_c.size();
    shape_ell.validate("dissipation shape");
    require_size(shape_ell.size(), m, "dissipation shape");
    if (Upsilon.rows() != m) throw ShapeError("Upsilon must have one row per input");
    const auto s = Upsilon.cols();
    require_size(eta_star.size(), s, "eta target");
    Eigen::JacobiSVD<Matrix> svd(Upsilon);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        if (svd.singularValues()[i] > 1e-10) ++rank;
    }
    if (rank != std::min(m, s)) throw ConfigError("Upsilon must have rank min(m, s)");
    require_diag_pd(Kl, m, "Kl");
    require_diag_pd(Rl, m, "Rl");
    if (xl0.size()) require_size(xl0.size(), m, "initial virtual state");
}

Vector prop4_zl(const Prop4Controller& c, const Vector& eta_x, const Vector& xl) {
    return c.Upsilon * (eta_x - c.eta_star) + c.Kl * xl;
}

Vector prop4_control(const Prop4Controller& c, const Vector& gamma_x, const Vector& eta_x,
                     const Vector& xc, const Vector& xl) {
    return prop2_control(c.core, gamma_x, xc) - phi_grad(c.shape_ell, prop4_zl(c, eta_x, xl));
}

Prop4Rates prop4_dynamics(const Prop4Controller& c, const Vector& gamma_x, const Vector& eta_x,
                          const Vector& xc, const Vector& xl) {
    return {prop2_dynamics(c.core, gamma_x, xc), -c.Rl * phi_grad(c.shape_ell, prop4_zl(c, eta_x, xl))};
}

// ----------------------------------------------------------- fully actuated

void FullyActuatedController::validate() const {
    shape_c.validate("controller shape");
    const auto n = shape_c.size();
    require_size(q_star.size(), n, "position target");
    require_pd(Kc, n, "Kc");
    require_pd(Rc, n, "Rc");
    if (!gradV) throw ConfigError("fully actuated law needs the potential gradient");
    require_size(gradV_bound.size(), n, "potential gradient bound");
    if (!gradV_bound.allFinite()) throw ConfigError("potential gradient must be bounded");
    if (xc0.size()) require_size(xc0.size(), n, "initial controller state");
}

Vector fully_actuated_control(const FullyActuatedController& c, const Vector& q, const Vector& xc) {
    return c.gradV(q) - phi_grad(c.shape_c, q - c.q_star + xc);
}

Vector fully_actuated_dynamics(const FullyActuatedController& c, const Vector& q, const Vector& xc) {
    return -c.Rc * (phi_grad(c.shape_c, q - c.q_star + xc) + c.Kc * xc);
}

Vector sample_gradient_bound(const VectorField& gradV, const std::vector<Vector>& qs) {
    Vector bound;
    for (const auto& q : qs) {
        const Vector g = gradV(q).cwiseAbs();
        if (!g.allFinite()) throw ConfigError("potential gradient is not finite on the operating box");
        bound = bound.size() ? Vector(bound.cwiseMax(g)) : g;
    }
    return bound;
}

// ------------------------------------------------------------------- filter

void FilterAugmentation::validate() const {
    shape_psi.validate("filter shape");
    const auto m = shape_psi.size();
    require_diag_pd(Rpsi, m, "Rpsi");
    if (psi0.size()) require_size(psi0.size(), m, "initial filter state");
}

Vector filter_dynamics(const FilterAugmentation& f, const Vector& psi, const Vector& q_err) {
    Vector gain(psi.size());
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
        const double b = f.shape_psi.beta[i];
        gain[i] = f.shape_psi.alpha[i] * b / std::cosh(b * psi[i]);
    }
    return -f.Rpsi * psi + gain.cwiseProduct(q_err);
}

Vector filter_input(const FilterAugmentation& f, const Vector& psi) {
    return -phi_grad(f.shape_psi, psi);
}

void FilteredController::validate() const {
    filter.validate();
    const auto m = filter.shape_psi.size();
    std::visit([](const auto& b) { b.validate(); }, base);
    const int base_m = std::visit([](const auto& b) { return input_dimension(ControllerSpec(b)); }, base);
    if (base_m != m)
        throw ShapeError("filter dimension must match the number of inputs");
    require_size(gravity_star.size(), m, "gravity compensation at target");
}

Vector augmented_control(const FilteredController& c, const Vector& q_err, const Vector& eta_x,
                         const Vector& xc, const Vector& xl, const Vector& psi) {
    Vector u = c.gravity_star + filter_input(c.filter, psi);
    if (const auto* fa = std::get_if<FullyActuatedController>(&c.base)) {
        u -= phi_grad(fa->shape_c, q_err + xc);
    } else {
        const auto& p4 = std::get<Prop4Controller>(c.base);
        u -= phi_grad(p4.core.shape_c, q_err + xc);
        u -= phi_grad(p4.shape_ell, prop4_zl(p4, eta_x, xl));
    }
    return u;
}

// ------------------------------------------------------------------ generic

std::string family_name(const ControllerSpec& c) {
    switch (c.index()) {
        case 0: return "prop1";
        case 1: return "prop2";
        case 2: return "prop4";
        case 3: return "fully_actuated";
        default: return "filtered";
    }
}

int input_dimension(const ControllerSpec& c) {
    return std::visit(
        [](const auto& k) -> int {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Prop1Controller>) return static_cast<int>(k.shape.size());
            else if constexpr (std::is_same_v<T, Prop4Controller>) return static_cast<int>(k.core.shape_c.size());
            else if constexpr (std::is_same_v<T, FilteredController>) return static_cast<int>(k.filter.shape_psi.size());
            else return static_cast<int>(k.shape_c.size());
        },
        c);
}

std::vector<Interval> saturation_bounds(const ControllerSpec& spec) {
    std::vector<Interval> out;
    auto emit = [&out](const Vector& centre, const Vector& radius) {
        for (Eigen::Index i = 0; i < centre.size(); ++i) out.push_back({centre[i] - radius[i], centre[i] + radius[i]});
    };
    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Prop1Controller>) {
                emit(-k.kappa, k.kp + k.shape.alpha);
            } else if constexpr (std::is_same_v<T, Prop2Controller>) {
                emit(-k.kappa, k.shape_c.alpha);
            } else if constexpr (std::is_same_v<T, Prop4Controller>) {
                emit(-k.core.kappa, k.core.shape_c.alpha + k.shape_ell.alpha);
            } else if constexpr (std::is_same_v<T, FullyActuatedController>) {
                emit(Vector::Zero(k.shape_c.size()), k.gradV_bound + k.shape_c.alpha);
            } else {
                Vector radius = k.filter.shape_psi.alpha;
                if (const auto* fa = std::get_if<FullyActuatedController>(&k.base)) {
                    radius += fa->shape_c.alpha;
                } else {
                    const auto& p4 = std::get<Prop4Controller>(k.base);
                    radius += p4.core.shape_c.alpha + p4.shape_ell.alpha;
                }
                emit(k.gravity_star, radius);
            }
        },
        spec);
    return out;
}

}  // namespace pbc
