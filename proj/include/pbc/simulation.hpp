#pragma once

#include <string>
#include <vector>

#include "pbc/controllers.hpp"
#include "pbc/models.hpp"

namespace pbc {

// Augmented state (x, x_c, x_l, psi); absent blocks have size zero.
struct StateLayout {
    int n = 0;
    int nc = 0;
    int nl = 0;
    int npsi = 0;

    int xc_offset() const { return n; }
    int xl_offset() const { return n + nc; }
    int psi_offset() const { return n + nc + nl; }
    int dim() const { return n + nc + nl + npsi; }
};

class ClosedLoop {
public:
    ClosedLoop(InputAffineModel plant, ControllerSpec controller, Vector disturbance = Vector());

    const InputAffineModel& plant() const { return plant_; }
    const ControllerSpec& controller() const { return controller_; }
    const StateLayout& layout() const { return layout_; }
    const Vector& disturbance() const { return disturbance_; }

    Vector control(const Vector& zeta) const;
    Vector derivative(const Vector& zeta) const;
    double storage(const Vector& zeta) const;
    // False when the recorded storage has no decrease guarantee (filtered law).
    bool storage_certified() const;
    Vector initial_state(const Vector& x0) const;
    Vector plant_state(const Vector& zeta) const { return zeta.head(layout_.n); }
    // Plant rows driven by an explicitly given input (used by negative controls).
    Vector derivative_with_input(const Vector& zeta, const Vector& u) const;

    // When false, controllers see the full plant state; used to test that
    // masked coordinates never influence the input.
    bool mask_unmeasured = true;

private:
    Vector view(const Vector& x) const;
    Vector positions(const Vector& x) const;
    Vector prop1_output(const Vector& x, const Prop1Controller& c) const;

    InputAffineModel plant_;
    ControllerSpec controller_;
    Vector disturbance_;
    StateLayout layout_;
};

struct SimulationTrace {
    StateLayout layout;
    std::vector<double> times;
    std::vector<Vector> states;
    std::vector<Vector> inputs;
    std::vector<double> storage;
    bool storage_certified = true;

    std::size_t size() const { return times.size(); }
    std::vector<double> channel(int index) const;      // augmented state component
    std::vector<double> input_channel(int index) const;
};

struct SimulationOptions {
    int substeps = 1;
};

SimulationTrace simulate(const ClosedLoop& loop, const Vector& zeta0, double t0, double tf, double dt,
                         const SimulationOptions& opt = {});

// Time-stepping with a caller-supplied input law; used to build negative controls.
SimulationTrace simulate_with_input(const ClosedLoop& loop,
                                    const std::function<Vector(const Vector&)>& input_law,
                                    const Vector& zeta0, double t0, double tf, double dt,
                                    const SimulationOptions& opt = {});

// ------------------------------------------------------------------ metrics

struct Metrics {
    std::vector<double> steady_state_error;
    double settling_time = 0.0;
    std::vector<std::vector<Interval>> saturation_intervals;
    std::vector<int> oscillation_count;
};

std::vector<double> metric_steady_state_error(const SimulationTrace& tr, const std::vector<int>& channels,
                                              const Vector& target, double window);
// First time after which every listed channel stays within band of its target; NaN if never.
double metric_settling_time(const SimulationTrace& tr, const std::vector<int>& channels, const Vector& target,
                            double band);
std::vector<std::vector<Interval>> metric_saturation_intervals(const SimulationTrace& tr,
                                                               const std::vector<Interval>& bounds);
int metric_oscillations(const SimulationTrace& tr, int channel);
int oscillation_count(const std::vector<double>& series);

}  // namespace pbc
