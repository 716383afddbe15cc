#include "pbc/report.hpp"

#include <cmath>

#include "pbc/errors.hpp"

namespace pbc {

namespace {

Json number_json(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return nullptr;
    return v > 0 ? "inf" : "-inf";
}

}  // namespace

Json vector_json(const Vector& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number_json(v[i]));
    return a;
}

Json to_json(const CheckResult& c) {
    Json j;
    j["name"] = c.name;
    j["pass"] = c.pass;
    j["residual"] = number_json(c.residual);
    j["tolerance"] = number_json(c.tolerance);
    j["witness"] = c.witness ? vector_json(*c.witness) : Json(nullptr);
    Json comp = Json::object();
    for (const auto& [k, v] : c.components) comp[k] = number_json(v);
    j["components"] = comp;
    if (!c.note.empty()) j["note"] = c.note;
    return j;
}

Json to_json(const VerificationReport& r) {
    Json j;
    j["subject"] = r.subject;
    j["all_pass"] = r.all_pass();
    j["checks"] = Json::array();
    for (const auto& c : r.checks) j["checks"].push_back(to_json(c));
    j["notes"] = r.notes;
    return j;
}

RunSummary summarize_run(const Scenario& sc, const SimulationTrace& tr, double runtime_seconds) {
    RunSummary s;
    s.runtime_seconds = runtime_seconds;
    const Vector target = sc.tracked_target();
    s.metrics.steady_state_error = metric_steady_state_error(tr, sc.tracked, target, sc.window);
    s.metrics.settling_time = metric_settling_time(tr, sc.tracked, target, sc.band);
    s.metrics.saturation_intervals = metric_saturation_intervals(tr, sc.bounds);
    for (int ch : sc.tracked) s.metrics.oscillation_count.push_back(metric_oscillations(tr, ch));

    s.final_state = tr.states.back();
    s.final_input = tr.inputs.back();
    const auto m = tr.inputs.front().size();
    s.max_abs_input.assign(m, 0.0);
    for (const auto& u : tr.inputs)
        for (Eigen::Index i = 0; i < u.size(); ++i) s.max_abs_input[i] = std::max(s.max_abs_input[i], std::abs(u[i]));
    for (const auto& lim : sc.limits) {
        LimitPeak p{lim.label, 0.0, lim.bound};
        for (const auto& u : tr.inputs) p.peak = std::max(p.peak, std::abs(lim.weights.dot(u)));
        s.limits.push_back(p);
    }
    if (tr.storage_certified) s.lyapunov = lyapunov_monitor(tr);
    return s;
}

Json to_json(const RunSummary& s, const Scenario& sc) {
    Json j;
    j["scenario"] = sc.name;
    j["family"] = sc.controller ? family_name(*sc.controller) : std::string();
    j["tracked_channels"] = Json::array();
    for (int c : sc.tracked) j["tracked_channels"].push_back("x" + std::to_string(c + 1));
    j["target"] = vector_json(sc.tracked_target());
    j["steady_state_error"] = s.metrics.steady_state_error;
    j["steady_state_window"] = sc.window;
    j["settling_time"] = number_json(s.metrics.settling_time);
    j["settling_band"] = sc.band;
    j["oscillation_count"] = s.metrics.oscillation_count;
    Json sat = Json::array();
    for (std::size_t i = 0; i < s.metrics.saturation_intervals.size(); ++i) {
        Json ch;
        ch["channel"] = "u" + std::to_string(i + 1);
        ch["bounds"] = {sc.bounds[i].lo, sc.bounds[i].hi};
        ch["intervals"] = Json::array();
        for (const auto& iv : s.metrics.saturation_intervals[i]) ch["intervals"].push_back({iv.lo, iv.hi});
        sat.push_back(ch);
    }
    j["saturation"] = sat;
    j["max_abs_input"] = s.max_abs_input;
    j["final_state"] = vector_json(s.final_state);
    j["final_input"] = vector_json(s.final_input);
    if (!s.limits.empty()) {
        Json lim = Json::array();
        for (const auto& p : s.limits) lim.push_back({{"limit", p.label}, {"peak", p.peak}, {"bound", p.bound},
                                                       {"ok", p.ok()}});
        j["torque_limits"] = lim;
    }
    j["storage_certified"] = s.lyapunov.has_value();
    if (s.lyapunov) j["lyapunov_monitor"] = to_json(*s.lyapunov);
    j["runtime_seconds"] = s.runtime_seconds;
    j["notes"] = sc.notes;
    return j;
}

// ------------------------------------------------------------ verification

namespace {

template <class F>
void attempt(VerificationReport& r, const std::string& name, F&& f) {
    try {
        r.checks.push_back(f());
    } catch (const PreconditionError& e) {
        auto c = failed_check(name, e.what());
        c.residual = e.residual;
        r.checks.push_back(std::move(c));
    } catch (const EvaluationFailure& e) {
        auto c = failed_check(name, e.what());
        c.witness = e.point;
        r.checks.push_back(std::move(c));
    } catch (const Error& e) {
        r.checks.push_back(failed_check(name, e.what()));
    }
}

const Prop4Controller* prop4_of(const ControllerSpec& c) {
    if (const auto* p4 = std::get_if<Prop4Controller>(&c)) return p4;
    if (const auto* fc = std::get_if<FilteredController>(&c)) return std::get_if<Prop4Controller>(&fc->base);
    return nullptr;
}

std::string detectability_note(const Scenario& sc) {
    if (sc.kind == "coupling")
        return "Asymptotic stability rests on the implication chain from a stationary damped mass to the full "
               "equilibrium; it is argued analytically and not tested numerically.";
    if (sc.kind == "rlc")
        return "Asymptotic stability rests on the dissipation in the second inductor and the load, which forces "
               "x_c = 0 and x3 = x3*; argued analytically, not tested numerically.";
    return "Asymptotic stability of the mechanical loop follows from the controller damping alone; the "
           "linearization check is the numerical stand-in.";
}

}  // namespace

VerificationReport verify_scenario(const Scenario& sc, Exec exec) {
    VerificationReport r;
    r.subject = sc.name;
    const auto& model = sc.plant;

    attempt(r, "cyclo_passivity", [&] { return check_cyclo_passivity(model, sc.box, 1e-8, exec); });
    attempt(r, "equilibrium_gradient", [&] { return check_equilibrium_gradient(model, sc.x_star); });
    attempt(r, "shaped_hessian", [&] {
        if (sc.alpha_c.size() == 0 || sc.beta_c.size() == 0)
            throw ConfigError("controller section has no alpha_c/beta_c");
        return check_shaped_hessian(model, sc.x_star, sc.alpha_c, sc.beta_c);
    });
    attempt(r, "output_integral", [&] { return check_output_integral(model, sc.box, sc.u_bound, 1e-8, exec); });
    if (model.eta && model.lambda_ell && model.lambda_c)
        attempt(r, "assumption3", [&] { return check_assumption3(model, sc.box, sc.u_bound, 1e-8, exec); });
    if (sc.bm) {
        attempt(r, "integrability", [&] {
            const auto pts = draw_samples(sc.box);
            const auto bm = *sc.bm;
            const auto w = worst_case(pts, [&bm](const Vector& x) { return bm_integrability_residual(bm, x); },
                                      exec);
            return make_check("integrability", w.value, 1e-6, pts[w.index]);
        });
    }

    if (!sc.controller) {
        r.checks.push_back(failed_check("controller_config", sc.controller_error));
    } else {
        const auto& ctrl = *sc.controller;
        if (const auto* p4 = prop4_of(ctrl); p4 && model.lambda_ell && model.lambda_c) {
            attempt(r, "theta_psd", [&] {
                ThetaBlocks b{model.lambda_ell(sc.x_star), model.lambda_c(sc.x_star), p4->Upsilon, p4->Rl, p4->Kl};
                return check_theta_psd(b, false);
            });
        }
        if (std::holds_alternative<Prop2Controller>(ctrl) || std::holds_alternative<Prop4Controller>(ctrl))
            attempt(r, "closed_loop_hessian", [&] { return check_closed_loop_hessian(model, sc.x_star, ctrl); });
        attempt(r, "linearization_stability", [&] {
            const ClosedLoop loop = sc.loop();
            VectorField dyn = [&loop](const Vector& z) { return loop.derivative(z); };
            auto lin = linearization_stability(dyn, sc.zeta_star());
            return lin.check;
        });
        if (!sc.loop().storage_certified())
            r.notes.push_back("The recorded storage of this loop has no decrease guarantee; the Lyapunov monitor "
                              "is not applied.");
    }

    try {
        if (sc.plant.ell && dissipation_obstacle_flag(model, sc.x_star))
            r.notes.push_back("Dissipation obstacle: the dissipation map is nonzero at the target.");
    } catch (const Error&) {
    }
    r.notes.push_back(detectability_note(sc));
    for (const auto& n : sc.notes) r.notes.push_back(n);
    return r;
}

}  // namespace pbc
