#include "pbc/scenario_io.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include "pbc/errors.hpp"

namespace pbc {

namespace {

const std::set<std::string> kTopKeys = {"name", "model", "controller", "target", "x0", "t_span", "dt",
                                        "substeps", "disturbance", "outputs", "verify", "sweep"};
const std::set<std::string> kControllerKeys = {
    "family", "base", "alpha", "beta", "alpha_c", "beta_c", "alpha_ell", "beta_ell", "alpha_psi", "beta_psi",
    "Kc", "Rc", "Kl", "Rl", "Rpsi", "Upsilon", "kp", "xc0", "xl0", "psi0"};
const std::set<std::string> kModelKeys = {"kind", "params"};
const std::set<std::string> kOutputKeys = {"channels", "window", "band"};
const std::set<std::string> kVerifyKeys = {"lo", "hi", "samples", "u_bound"};
const std::set<std::string> kSweepKeys = {"param", "values"};
const std::set<std::string> kCouplingParams = {"R1", "R2", "C", "m1", "m2", "a0", "a1", "a2", "a3", "k"};
const std::set<std::string> kRlcParams = {"r", "L1", "L2", "C", "a", "b"};
const std::set<std::string> kPeraParams = {"g_r", "d_c2", "m3", "I1", "I2", "I3"};

const std::set<std::string>& params_for(const std::string& kind) {
    if (kind == "coupling") return kCouplingParams;
    if (kind == "rlc") return kRlcParams;
    if (kind == "pera") return kPeraParams;
    throw ConfigError("unknown model kind '" + kind + "'");
}

const std::set<std::string>* section_keys(const std::string& section) {
    if (section == "controller") return &kControllerKeys;
    if (section == "model") return &kModelKeys;
    if (section == "outputs") return &kOutputKeys;
    if (section == "verify") return &kVerifyKeys;
    if (section == "sweep") return &kSweepKeys;
    return nullptr;
}

std::vector<std::string> split_dots(const std::string& key) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        parts.push_back(key.substr(start, dot - start));
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    for (const auto& p : parts) {
        if (p.empty()) throw ConfigError("malformed key '" + key + "'");
    }
    return parts;
}

double number(const Json& j, const std::string& key) {
    if (!j.is_number()) throw ConfigError(key + " must be a number");
    return j.get<double>();
}

void check_keys(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [k, v] : obj.items()) {
        if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
    }
}

}  // namespace

Vector parse_vector(const Json& j, int n, const std::string& key) {
    if (j.is_number()) return Vector::Constant(n, j.get<double>());
    if (!j.is_array()) throw ConfigError(key + " must be a number or a list");
    if (static_cast<int>(j.size()) != n)
        throw ConfigError(key + " must have " + std::to_string(n) + " entries, got " + std::to_string(j.size()));
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = number(j[i], key);
    return v;
}

Matrix parse_matrix(const Json& j, int n, const std::string& key) {
    if (j.is_number()) return j.get<double>() * Matrix::Identity(n, n);
    if (!j.is_array()) throw ConfigError(key + " must be a number or a list");
    if (!j.empty() && j[0].is_array()) {
        if (static_cast<int>(j.size()) != n) throw ConfigError(key + " must have " + std::to_string(n) + " rows");
        Matrix a(n, n);
        for (int r = 0; r < n; ++r) a.row(r) = parse_vector(j[r], n, key).transpose();
        return a;
    }
    const int count = static_cast<int>(j.size());
    if (count == n) return parse_vector(j, n, key).asDiagonal();
    if (count == n * n) {
        const Vector v = parse_vector(j, n * n, key);
        Matrix a(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) a(r, c) = v[r * n + c];
        return a;
    }
    throw ConfigError(key + " must be a scalar, a diagonal list, or a full row-major matrix");
}

void validate_config(const Json& config) {
    check_keys(config, kTopKeys, "scenario");
    if (!config.contains("model")) throw ConfigError("scenario has no model section");
    if (!config.contains("controller")) throw ConfigError("scenario has no controller section");
    for (const auto& [k, v] : config.items()) {
        if (const auto* keys = section_keys(k)) check_keys(v, *keys, k);
    }
    const auto& model = config["model"];
    if (!model.contains("kind") || !model["kind"].is_string()) throw ConfigError("model.kind must be a string");
    if (model.contains("params")) check_keys(model["params"], params_for(model["kind"]), "model.params");
}

void set_config_value(Json& config, const std::string& dotted_key, const Json& value) {
    const auto parts = split_dots(dotted_key);
    const std::string& top = parts[0];
    if (!kTopKeys.count(top)) throw ConfigError("unknown scenario key '" + dotted_key + "'");
    if (parts.size() == 1) {
        config[top] = value;
        return;
    }
    if (top == "model" && parts.size() == 3 && parts[1] == "params") {
        const auto& kind = config["model"].value("kind", std::string());
        if (!params_for(kind).count(parts[2])) throw ConfigError("unknown model parameter '" + parts[2] + "'");
        config["model"]["params"][parts[2]] = value;
        return;
    }
    const auto* keys = section_keys(top);
    if (!keys || parts.size() != 2 || !keys->count(parts[1]))
        throw ConfigError("unknown scenario key '" + dotted_key + "'");
    // The generic amplitude/slope replaces the per-term values it covers.
    if (top == "controller" && (parts[1] == "alpha" || parts[1] == "beta")) {
        auto& c = config["controller"];
        c.erase(parts[1] + "_c");
        c.erase(parts[1] + "_ell");
    }
    config[top][parts[1]] = value;
}

void apply_override(Json& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value: " + assignment);
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    Json value = Json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    set_config_value(config, key, value);
}

bool is_known_scenario(const std::string& name_or_path) {
    if (find_builtin(name_or_path)) return true;
    std::error_code ec;
    return std::filesystem::is_regular_file(name_or_path, ec);
}

Json resolve_config(const std::string& name_or_path, std::string* name) {
    if (auto d = find_builtin(name_or_path)) {
        if (name) *name = d->name;
        return d->config;
    }
    std::error_code ec;
    if (!std::filesystem::is_regular_file(name_or_path, ec))
        throw ConfigError("unknown scenario '" + name_or_path + "'");
    std::ifstream in(name_or_path);
    Json j = Json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("scenario file is not valid JSON: " + name_or_path);
    if (name) {
        *name = j.contains("name") && j["name"].is_string() ? j["name"].get<std::string>()
                                                           : std::filesystem::path(name_or_path).stem().string();
    }
    return j;
}

// -------------------------------------------------------------- building

namespace {

template <class P>
void read_params(const Json& j, std::initializer_list<std::pair<const char*, double P::*>> fields, P& p) {
    for (const auto& [key, member] : fields) {
        if (j.contains(key)) p.*member = number(j[key], std::string("model.params.") + key);
    }
}

struct Amplitudes {
    Vector alpha_c, beta_c, alpha_ell, beta_ell;
};

Vector shape_entry(const Json& c, const char* specific, const char* generic, int m, bool required) {
    if (c.contains(specific)) return parse_vector(c[specific], m, std::string("controller.") + specific);
    if (c.contains(generic)) return parse_vector(c[generic], m, std::string("controller.") + generic);
    if (required) throw ConfigError(std::string("controller needs ") + specific + " or " + generic);
    return Vector();
}

Matrix matrix_or(const Json& c, const char* key, int m, double fallback) {
    if (c.contains(key)) return parse_matrix(c[key], m, std::string("controller.") + key);
    return fallback * Matrix::Identity(m, m);
}

Vector vector_or_empty(const Json& c, const char* key, int m) {
    return c.contains(key) ? parse_vector(c[key], m, std::string("controller.") + key) : Vector();
}

Matrix upsilon(const Json& c, int m, int s) {
    if (!c.contains("Upsilon")) {
        if (m != s) throw ConfigError("controller.Upsilon is required when m != s");
        return Matrix::Identity(m, s);
    }
    const Json& j = c["Upsilon"];
    if (j.is_number()) {
        if (m != s) throw ConfigError("scalar Upsilon needs m == s");
        return j.get<double>() * Matrix::Identity(m, s);
    }
    if (m == s) return parse_matrix(j, m, "controller.Upsilon");
    if (!j.is_array() || static_cast<int>(j.size()) != m * s)
        throw ConfigError("controller.Upsilon must list m*s entries row-major");
    Matrix u(m, s);
    for (int r = 0; r < m; ++r)
        for (int k = 0; k < s; ++k) u(r, k) = number(j[r * s + k], "controller.Upsilon");
    return u;
}

Prop2Controller make_prop2(const Json& c, const InputAffineModel& plant, const Vector& x_star, int m) {
    Prop2Controller p;
    p.shape_c = {shape_entry(c, "alpha_c", "alpha", m, true), shape_entry(c, "beta_c", "beta", m, true)};
    p.kappa = kappa(plant, x_star);
    p.gamma_star = plant.gamma(x_star);
    p.Kc = matrix_or(c, "Kc", m, 1.0);
    p.Rc = matrix_or(c, "Rc", m, 1.0);
    p.xc0 = vector_or_empty(c, "xc0", m);
    return p;
}

Prop4Controller make_prop4(const Json& c, const InputAffineModel& plant, const Vector& x_star, int m) {
    Prop4Controller p;
    p.core = make_prop2(c, plant, x_star, m);
    if (!plant.eta) throw ConfigError(plant.name + " has no damped coordinate map for the prop4 family");
    p.eta_star = plant.eta(x_star);
    const int s = static_cast<int>(p.eta_star.size());
    p.shape_ell = {shape_entry(c, "alpha_ell", "alpha", m, true), shape_entry(c, "beta_ell", "beta", m, true)};
    p.Upsilon = upsilon(c, m, s);
    p.Kl = matrix_or(c, "Kl", m, 1.0);
    p.Rl = matrix_or(c, "Rl", m, 1.0);
    p.xl0 = vector_or_empty(c, "xl0", m);
    return p;
}

FullyActuatedController make_fully(const Json& c, const InputAffineModel& plant, const Vector& x_star, int m,
                                   const Vector& gradV_bound) {
    if (!plant.mech) throw ConfigError("fully actuated family needs a mechanical plant");
    FullyActuatedController fa;
    fa.shape_c = {shape_entry(c, "alpha_c", "alpha", m, true), shape_entry(c, "beta_c", "beta", m, true)};
    fa.q_star = x_star.head(plant.mech->dof);
    fa.Kc = matrix_or(c, "Kc", m, 1.0);
    fa.Rc = matrix_or(c, "Rc", m, 1.0);
    fa.gradV = plant.mech->gradV;
    fa.gradV_bound = gradV_bound;
    fa.xc0 = vector_or_empty(c, "xc0", m);
    return fa;
}

bool all_zero(const Vector& v) { return v.size() > 0 && v.cwiseAbs().maxCoeff() == 0.0; }

ControllerSpec make_controller(const Json& c, const Scenario& sc, const Vector& gradV_bound,
                               std::vector<std::string>& notes) {
    const std::string family = c.value("family", std::string());
    const int m = sc.plant.m;
    const auto& plant = sc.plant;
    if (family == "prop1") {
        Prop1Controller p;
        p.shape = {shape_entry(c, "alpha_c", "alpha", m, true), shape_entry(c, "beta_c", "beta", m, true)};
        p.kp = c.contains("kp") ? parse_vector(c["kp"], m, "controller.kp") : Vector::Ones(m);
        p.kappa = kappa(plant, sc.x_star);
        p.gamma_star = plant.gamma(sc.x_star);
        return p;
    }
    if (family == "prop2") return make_prop2(c, plant, sc.x_star, m);
    if (family == "prop4") {
        const Vector al = shape_entry(c, "alpha_ell", "alpha", m, true);
        if (all_zero(al)) {
            notes.push_back("alpha_ell = 0 removes the virtual-state term; run with the prop2 family");
            return make_prop2(c, plant, sc.x_star, m);
        }
        return make_prop4(c, plant, sc.x_star, m);
    }
    if (family == "fully_actuated") return make_fully(c, plant, sc.x_star, m, gradV_bound);
    if (family == "filtered") {
        if (!plant.mech) throw ConfigError("filtered family needs a mechanical plant");
        FilteredController fc;
        const std::string base = c.value("base", std::string("fully_actuated"));
        if (base == "fully_actuated") fc.base = make_fully(c, plant, sc.x_star, m, gradV_bound);
        else if (base == "prop4") fc.base = make_prop4(c, plant, sc.x_star, m);
        else throw ConfigError("filtered base must be fully_actuated or prop4");
        fc.filter.shape_psi = {shape_entry(c, "alpha_psi", "alpha_psi", m, true),
                               shape_entry(c, "beta_psi", "beta_psi", m, true)};
        fc.filter.Rpsi = matrix_or(c, "Rpsi", m, 1.0);
        fc.filter.psi0 = vector_or_empty(c, "psi0", m);
        const int d = plant.mech->dof;
        fc.gravity_star = plant.mech->G.transpose() * plant.mech->gradV(sc.x_star.head(d));
        return fc;
    }
    throw ConfigError("unknown controller family '" + family + "'");
}

}  // namespace

Scenario build_scenario(const std::string& name, const Json& config, std::uint64_t seed) {
    validate_config(config);
    Scenario sc;
    sc.name = name;
    sc.config = config;
    const auto& model = config["model"];
    sc.kind = model["kind"].get<std::string>();
    const Json params = model.value("params", Json::object());
    const Json& target = config.contains("target") ? config["target"] : Json();

    Vector gradV_bound;
    if (sc.kind == "coupling") {
        CouplingDeviceParams p;
        read_params<CouplingDeviceParams>(params,
                                          {{"R1", &CouplingDeviceParams::R1},
                                           {"R2", &CouplingDeviceParams::R2},
                                           {"C", &CouplingDeviceParams::C},
                                           {"m1", &CouplingDeviceParams::m1},
                                           {"m2", &CouplingDeviceParams::m2},
                                           {"a0", &CouplingDeviceParams::a0},
                                           {"a1", &CouplingDeviceParams::a1},
                                           {"a2", &CouplingDeviceParams::a2},
                                           {"a3", &CouplingDeviceParams::a3},
                                           {"k", &CouplingDeviceParams::k}},
                                          p);
        sc.plant = coupling_device(p);
        sc.x_star = coupling_equilibrium(target.is_null() ? 0.025 : number(target, "target"));
        sc.tracked = {1, 2};
    } else if (sc.kind == "rlc") {
        RlcParams p;
        read_params<RlcParams>(params,
                               {{"r", &RlcParams::r},
                                {"L1", &RlcParams::L1},
                                {"L2", &RlcParams::L2},
                                {"C", &RlcParams::C},
                                {"a", &RlcParams::a},
                                {"b", &RlcParams::b}},
                               p);
        sc.bm = rlc_circuit(p);
        sc.plant = rlc_affine(p);
        if (target.is_null()) throw ConfigError("rlc scenario needs a target capacitor voltage");
        sc.x_star = rlc_equilibrium(p, number(target, "target"));
        sc.tracked = {2};
    } else {
        PeraParams p;
        read_params<PeraParams>(params,
                                {{"g_r", &PeraParams::g_r},
                                 {"d_c2", &PeraParams::d_c2},
                                 {"m3", &PeraParams::m3},
                                 {"I1", &PeraParams::I1},
                                 {"I2", &PeraParams::I2},
                                 {"I3", &PeraParams::I3}},
                                p);
        sc.plant = mech_to_affine(pera(p));
        if (target.is_null()) throw ConfigError("pera scenario needs a target configuration");
        sc.x_star = Vector::Zero(6);
        sc.x_star.head(3) = parse_vector(target, 3, "target");
        sc.tracked = {0, 1, 2};
        sc.limits = pera_torque_limits();
        gradV_bound = pera_gravity_bound(p);
    }
    const int n = sc.plant.n, m = sc.plant.m;

    sc.x0 = config.contains("x0") ? parse_vector(config["x0"], n, "x0") : Vector::Zero(n);
    sc.disturbance = config.contains("disturbance") ? parse_vector(config["disturbance"], m, "disturbance")
                                                    : Vector::Zero(m);
    if (config.contains("t_span")) {
        const auto& ts = config["t_span"];
        if (!ts.is_array() || ts.size() != 2) throw ConfigError("t_span must be [t0, tf]");
        sc.t0 = number(ts[0], "t_span");
        sc.tf = number(ts[1], "t_span");
    }
    if (config.contains("dt")) sc.dt = number(config["dt"], "dt");
    if (config.contains("substeps")) sc.substeps = config["substeps"].get<int>();
    if (!(sc.tf > sc.t0)) throw ConfigError("t_span must be increasing");
    if (!(sc.dt > 0.0)) throw ConfigError("dt must be positive");
    if (sc.substeps < 1) throw ConfigError("substeps must be at least 1");

    if (config.contains("outputs")) {
        const auto& o = config["outputs"];
        if (o.contains("channels")) {
            sc.tracked.clear();
            for (const auto& ch : o["channels"]) {
                const int i = ch.get<int>();
                if (i < 0 || i >= n) throw ConfigError("outputs.channels entry out of range");
                sc.tracked.push_back(i);
            }
        }
        if (o.contains("window")) sc.window = number(o["window"], "outputs.window");
        if (o.contains("band")) sc.band = number(o["band"], "outputs.band");
    }
    sc.window = std::min(sc.window, sc.tf - sc.t0);

    sc.box.seed = seed;
    sc.box.lo = sc.x_star.array() - 1.0;
    sc.box.hi = sc.x_star.array() + 1.0;
    if (config.contains("verify")) {
        const auto& v = config["verify"];
        if (v.contains("lo")) sc.box.lo = parse_vector(v["lo"], n, "verify.lo");
        if (v.contains("hi")) sc.box.hi = parse_vector(v["hi"], n, "verify.hi");
        if (v.contains("samples")) sc.box.count = v["samples"].get<int>();
        if (v.contains("u_bound")) sc.u_bound = number(v["u_bound"], "verify.u_bound");
    }
    sc.box.validate();

    if (config.contains("sweep")) {
        const auto& s = config["sweep"];
        SweepSpec sw;
        sw.param = s.value("param", std::string());
        for (const auto& v : s.value("values", Json::array())) sw.values.push_back(number(v, "sweep.values"));
        sc.sweep = sw;
    }

    const auto& c = config["controller"];
    sc.alpha_c = shape_entry(c, "alpha_c", "alpha", m, false);
    sc.beta_c = shape_entry(c, "beta_c", "beta", m, false);
    try {
        auto spec = make_controller(c, sc, gradV_bound, sc.notes);
        std::visit([](const auto& k) { k.validate(); }, spec);
        sc.bounds = saturation_bounds(spec);
        sc.controller = std::move(spec);
    } catch (const ConfigError& e) {
        sc.controller_error = e.what();
    }
    return sc;
}

Scenario load_scenario(const std::string& name_or_path, const std::vector<std::string>& overrides,
                       std::uint64_t seed) {
    std::string name;
    Json config = resolve_config(name_or_path, &name);
    for (const auto& o : overrides) apply_override(config, o);
    return build_scenario(name, config, seed);
}

// ---------------------------------------------------------- Scenario

const ControllerSpec& Scenario::controller_spec() const {
    if (!controller) throw ConfigError(name + ": " + controller_error);
    return *controller;
}

ClosedLoop Scenario::loop() const { return ClosedLoop(plant, controller_spec(), disturbance); }

Vector Scenario::zeta0() const { return loop().initial_state(x0); }

Vector Scenario::zeta_star() const {
    const ClosedLoop l = loop();
    Vector z = Vector::Zero(l.layout().dim());
    z.head(plant.n) = x_star;
    return z;
}

Vector Scenario::tracked_target() const {
    Vector t(tracked.size());
    for (std::size_t i = 0; i < tracked.size(); ++i) t[i] = x_star[tracked[i]];
    return t;
}

}  // namespace pbc
