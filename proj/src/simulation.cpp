#include "pbc/simulation.hpp"

#include <cmath>

#include "pbc/errors.hpp"

namespace pbc {

namespace {

template <class T>
const T* as(const ControllerSpec& c) {
    return std::get_if<T>(&c);
}

Vector segment(const Vector& z, int offset, int len) { return z.segment(offset, len); }

Vector init_or_zero(const Vector& v, int m) { return v.size() ? v : Vector::Zero(m); }

}  // namespace

ClosedLoop::ClosedLoop(InputAffineModel plant, ControllerSpec controller, Vector disturbance)
    : plant_(std::move(plant)), controller_(std::move(controller)), disturbance_(std::move(disturbance)) {
    std::visit([](const auto& k) { k.validate(); }, controller_);
    const int m = input_dimension(controller_);
    if (m != plant_.m) throw ShapeError("controller input dimension does not match the plant");
    if (disturbance_.size() == 0) disturbance_ = Vector::Zero(m);
    if (disturbance_.size() != m) throw ShapeError("disturbance must have one entry per input");

    layout_.n = plant_.n;
    auto need = [this](bool ok, const char* what) {
        if (!ok) throw WiringError(plant_.name + ": controller needs " + what);
    };
    auto need_mech = [&]() {
        need(plant_.mech.has_value(), "a mechanical plant");
        const auto& G = plant_.mech->G;
        if (G.rows() != G.cols() || !G.isIdentity(0.0))
            throw ConfigError(plant_.name + ": fully actuated law needs G = I");
    };

    if (as<Prop1Controller>(controller_)) {
        need(static_cast<bool>(plant_.gamma), "the output integral gamma");
        need(plant_.S || plant_.grad_S, "a storage function for the passive output");
    } else if (as<Prop2Controller>(controller_)) {
        need(static_cast<bool>(plant_.gamma), "the output integral gamma");
        layout_.nc = m;
    } else if (const auto* p4 = as<Prop4Controller>(controller_)) {
        need(static_cast<bool>(plant_.gamma), "the output integral gamma");
        need(static_cast<bool>(plant_.eta), "the damped coordinate map eta");
        if (plant_.eta(Vector::Zero(plant_.n)).size() != p4->Upsilon.cols())
            throw ShapeError("Upsilon columns must match the size of eta");
        layout_.nc = m;
        layout_.nl = m;
    } else if (as<FullyActuatedController>(controller_)) {
        need_mech();
        layout_.nc = m;
    } else {
        const auto& fc = std::get<FilteredController>(controller_);
        need(plant_.mech.has_value(), "a mechanical plant");
        layout_.nc = m;
        layout_.npsi = m;
        if (const auto* p4 = std::get_if<Prop4Controller>(&fc.base)) {
            need(static_cast<bool>(plant_.gamma), "the output integral gamma");
            need(static_cast<bool>(plant_.eta), "the damped coordinate map eta");
            if (plant_.eta(Vector::Zero(plant_.n)).size() != p4->Upsilon.cols())
                throw ShapeError("Upsilon columns must match the size of eta");
            layout_.nl = m;
        } else {
            need_mech();
        }
    }
}

Vector ClosedLoop::view(const Vector& x) const {
    return mask_unmeasured ? plant_.measurement_view(x) : x;
}

Vector ClosedLoop::positions(const Vector& x) const { return x.head(plant_.mech->dof); }

Vector ClosedLoop::prop1_output(const Vector& x, const Prop1Controller& c) const {
    // y may depend on u through feedthrough; resolve by fixed-point iteration.
    const Vector gam = plant_.gamma(view(x));
    Vector u = Vector::Zero(plant_.m);
    Vector y = passive_output(plant_, x, u);
    if (!plant_.w && !plant_.Dskew) return y;
    for (int it = 0; it < 100; ++it) {
        const Vector un = prop1_control(c, gam, y);
        const double change = (un - u).norm();
        u = un;
        y = passive_output(plant_, x, u);
        if (change <= 1e-14 * (1.0 + u.norm())) break;
    }
    return y;
}

Vector ClosedLoop::control(const Vector& zeta) const {
    const Vector x = zeta.head(layout_.n);
    const Vector xv = view(x);
    const Vector xc = segment(zeta, layout_.xc_offset(), layout_.nc);
    const Vector xl = segment(zeta, layout_.xl_offset(), layout_.nl);
    const Vector psi = segment(zeta, layout_.psi_offset(), layout_.npsi);

    if (const auto* p1 = as<Prop1Controller>(controller_))
        return prop1_control(*p1, plant_.gamma(xv), prop1_output(x, *p1));
    if (const auto* p2 = as<Prop2Controller>(controller_)) return prop2_control(*p2, plant_.gamma(xv), xc);
    if (const auto* p4 = as<Prop4Controller>(controller_))
        return prop4_control(*p4, plant_.gamma(xv), plant_.eta(xv), xc, xl);
    if (const auto* fa = as<FullyActuatedController>(controller_))
        return fully_actuated_control(*fa, positions(xv), xc);

    const auto& fc = std::get<FilteredController>(controller_);
    if (const auto* fa = std::get_if<FullyActuatedController>(&fc.base))
        return augmented_control(fc, positions(xv) - fa->q_star, Vector(), xc, xl, psi);
    const auto& p4 = std::get<Prop4Controller>(fc.base);
    return augmented_control(fc, plant_.gamma(xv) - p4.core.gamma_star, plant_.eta(xv), xc, xl, psi);
}

Vector ClosedLoop::derivative_with_input(const Vector& zeta, const Vector& u) const {
    const Vector x = zeta.head(layout_.n);
    const Vector xv = view(x);
    const Vector xc = segment(zeta, layout_.xc_offset(), layout_.nc);
    const Vector xl = segment(zeta, layout_.xl_offset(), layout_.nl);
    const Vector psi = segment(zeta, layout_.psi_offset(), layout_.npsi);

    Vector dz(layout_.dim());
    dz.head(layout_.n) = plant_.rhs(x, u + disturbance_);

    if (const auto* p2 = as<Prop2Controller>(controller_)) {
        dz.segment(layout_.xc_offset(), layout_.nc) = prop2_dynamics(*p2, plant_.gamma(xv), xc);
    } else if (const auto* p4 = as<Prop4Controller>(controller_)) {
        const auto r = prop4_dynamics(*p4, plant_.gamma(xv), plant_.eta(xv), xc, xl);
        dz.segment(layout_.xc_offset(), layout_.nc) = r.xc_dot;
        dz.segment(layout_.xl_offset(), layout_.nl) = r.xl_dot;
    } else if (const auto* fa = as<FullyActuatedController>(controller_)) {
        dz.segment(layout_.xc_offset(), layout_.nc) = fully_actuated_dynamics(*fa, positions(xv), xc);
    } else if (const auto* fc = as<FilteredController>(controller_)) {
        Vector q_err;
        if (const auto* fa = std::get_if<FullyActuatedController>(&fc->base)) {
            q_err = positions(xv) - fa->q_star;
            dz.segment(layout_.xc_offset(), layout_.nc) = fully_actuated_dynamics(*fa, positions(xv), xc);
        } else {
            const auto& p4 = std::get<Prop4Controller>(fc->base);
            q_err = plant_.gamma(xv) - p4.core.gamma_star;
            const auto r = prop4_dynamics(p4, plant_.gamma(xv), plant_.eta(xv), xc, xl);
            dz.segment(layout_.xc_offset(), layout_.nc) = r.xc_dot;
            dz.segment(layout_.xl_offset(), layout_.nl) = r.xl_dot;
        }
        dz.segment(layout_.psi_offset(), layout_.npsi) = filter_dynamics(fc->filter, psi, q_err);
    }
    return dz;
}

Vector ClosedLoop::derivative(const Vector& zeta) const { return derivative_with_input(zeta, control(zeta)); }

double ClosedLoop::storage(const Vector& zeta) const {
    const Vector x = zeta.head(layout_.n);
    const Vector xc = segment(zeta, layout_.xc_offset(), layout_.nc);
    const Vector xl = segment(zeta, layout_.xl_offset(), layout_.nl);

    auto shaped = [&](const Prop2Controller& c) {
        const Vector gam = plant_.gamma(x);
        return plant_.S(x) + phi_value(c.shape_c, prop2_zc(c, gam, xc)) + c.kappa.dot(gam) + 0.5 * xc.dot(c.Kc * xc);
    };
    auto kinetic = [&]() {
        const int d = plant_.mech->dof;
        const Vector q = x.head(d), p = x.tail(d);
        return 0.5 * p.dot(plant_.mech->M(q).ldlt().solve(p));
    };

    if (const auto* p1 = as<Prop1Controller>(controller_)) {
        const Vector gam = plant_.gamma(x);
        return plant_.S(x) + phi_value(p1->shape, gam - p1->gamma_star) + p1->kappa.dot(gam);
    }
    if (const auto* p2 = as<Prop2Controller>(controller_)) return shaped(*p2);
    if (const auto* p4 = as<Prop4Controller>(controller_))
        return shaped(p4->core) + phi_value(p4->shape_ell, prop4_zl(*p4, plant_.eta(x), xl));
    if (const auto* fa = as<FullyActuatedController>(controller_)) {
        const Vector q = positions(x);
        return phi_value(fa->shape_c, q - fa->q_star + xc) + kinetic() + 0.5 * xc.dot(fa->Kc * xc);
    }

    // Filtered law: energy-like quantity recorded for inspection only.
    const auto& fc = std::get<FilteredController>(controller_);
    const Vector q = positions(x);
    const auto& mech = *plant_.mech;
    double value = 0.0;
    if (const auto* fa = std::get_if<FullyActuatedController>(&fc.base)) {
        const Vector dq = q - fa->q_star;
        value = kinetic() + 0.5 * xc.dot(fa->Kc * xc) + phi_value(fa->shape_c, dq + xc) + mech.V(q) -
                mech.V(fa->q_star) - fc.gravity_star.dot(mech.G.transpose() * dq);
    } else {
        const auto& p4 = std::get<Prop4Controller>(fc.base);
        value = shaped(p4.core) + phi_value(p4.shape_ell, prop4_zl(p4, plant_.eta(x), xl));
    }
    return value;
}

bool ClosedLoop::storage_certified() const {
    if (as<FilteredController>(controller_)) return false;
    return disturbance_.cwiseAbs().maxCoeff() == 0.0;
}

Vector ClosedLoop::initial_state(const Vector& x0) const {
    if (x0.size() != layout_.n) throw ShapeError("initial plant state has the wrong dimension");
    Vector z = Vector::Zero(layout_.dim());
    z.head(layout_.n) = x0;
    const int m = plant_.m;
    auto put = [&](int off, int len, const Vector& v) {
        if (len) z.segment(off, len) = init_or_zero(v, m);
    };
    if (const auto* p2 = as<Prop2Controller>(controller_)) put(layout_.xc_offset(), layout_.nc, p2->xc0);
    if (const auto* p4 = as<Prop4Controller>(controller_)) {
        put(layout_.xc_offset(), layout_.nc, p4->core.xc0);
        put(layout_.xl_offset(), layout_.nl, p4->xl0);
    }
    if (const auto* fa = as<FullyActuatedController>(controller_)) put(layout_.xc_offset(), layout_.nc, fa->xc0);
    if (const auto* fc = as<FilteredController>(controller_)) {
        if (const auto* fa = std::get_if<FullyActuatedController>(&fc->base)) {
            put(layout_.xc_offset(), layout_.nc, fa->xc0);
        } else {
            const auto& p4 = std::get<Prop4Controller>(fc->base);
            put(layout_.xc_offset(), layout_.nc, p4.core.xc0);
            put(layout_.xl_offset(), layout_.nl, p4.xl0);
        }
        put(layout_.psi_offset(), layout_.npsi, fc->filter.psi0);
    }
    return z;
}

// --------------------------------------------------------------- stepping

namespace {

SimulationTrace finish(const ClosedLoop& loop, RawTrace raw,
                       const std::function<Vector(const Vector&)>& input_law) {
    SimulationTrace tr;
    tr.layout = loop.layout();
    tr.storage_certified = loop.storage_certified();
    tr.times = std::move(raw.times);
    tr.states = std::move(raw.states);
    tr.inputs.reserve(tr.states.size());
    tr.storage.reserve(tr.states.size());
    for (const auto& z : tr.states) {
        tr.inputs.push_back(input_law(z));
        tr.storage.push_back(loop.storage(z));
    }
    return tr;
}

}  // namespace

SimulationTrace simulate(const ClosedLoop& loop, const Vector& zeta0, double t0, double tf, double dt,
                         const SimulationOptions& opt) {
    if (zeta0.size() != loop.layout().dim()) throw ShapeError("initial augmented state has the wrong dimension");
    if (!zeta0.allFinite()) throw ConfigError("initial state must be finite");
    Dynamics dyn = [&loop](double, const Vector& z) { return loop.derivative(z); };
    auto raw = integrate_fixed(dyn, zeta0, t0, tf, dt, IntegrateOptions{opt.substeps});
    return finish(loop, std::move(raw), [&loop](const Vector& z) { return loop.control(z); });
}

SimulationTrace simulate_with_input(const ClosedLoop& loop, const std::function<Vector(const Vector&)>& input_law,
                                    const Vector& zeta0, double t0, double tf, double dt,
                                    const SimulationOptions& opt) {
    if (zeta0.size() != loop.layout().dim()) throw ShapeError("initial augmented state has the wrong dimension");
    Dynamics dyn = [&](double, const Vector& z) { return loop.derivative_with_input(z, input_law(z)); };
    auto raw = integrate_fixed(dyn, zeta0, t0, tf, dt, IntegrateOptions{opt.substeps});
    return finish(loop, std::move(raw), input_law);
}

std::vector<double> SimulationTrace::channel(int index) const {
    std::vector<double> out;
    out.reserve(states.size());
    for (const auto& z : states) out.push_back(z[index]);
    return out;
}

std::vector<double> SimulationTrace::input_channel(int index) const {
    std::vector<double> out;
    out.reserve(inputs.size());
    for (const auto& u : inputs) out.push_back(u[index]);
    return out;
}

}  // namespace pbc
