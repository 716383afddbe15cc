#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pbc/errors.hpp"
#include "pbc/simulation.hpp"

namespace pbc {

std::vector<double> metric_steady_state_error(const SimulationTrace& tr, const std::vector<int>& channels,
                                              const Vector& target, double window) {
    if (tr.size() == 0) throw ConfigError("empty trace");
    if (static_cast<Eigen::Index>(channels.size()) != target.size())
        throw ShapeError("one target value per channel is required");
    const double span = tr.times.back() - tr.times.front();
    if (!(window > 0.0) || window > span + 1e-12) throw ConfigError("window must lie within the time span");
    const double start = tr.times.back() - window;
    std::vector<double> err(channels.size(), 0.0);
    std::size_t count = 0;
    for (std::size_t k = 0; k < tr.size(); ++k) {
        if (tr.times[k] < start - 1e-12) continue;
        ++count;
        for (std::size_t c = 0; c < channels.size(); ++c) err[c] += std::abs(tr.states[k][channels[c]] - target[c]);
    }
    for (auto& e : err) e /= static_cast<double>(count);
    return err;
}

double metric_settling_time(const SimulationTrace& tr, const std::vector<int>& channels, const Vector& target,
                            double band) {
    std::size_t first_ok = tr.size();
    for (std::size_t k = tr.size(); k-- > 0;) {
        bool inside = true;
        for (std::size_t c = 0; c < channels.size(); ++c) {
            if (std::abs(tr.states[k][channels[c]] - target[c]) > band) inside = false;
        }
        if (!inside) break;
        first_ok = k;
    }
    if (first_ok == tr.size()) return std::numeric_limits<double>::quiet_NaN();
    return tr.times[first_ok];
}

std::vector<std::vector<Interval>> metric_saturation_intervals(const SimulationTrace& tr,
                                                               const std::vector<Interval>& bounds) {
    std::vector<std::vector<Interval>> out(bounds.size());
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        const auto [lo, hi] = bounds[i];
        const double touch = 1e-6 * (hi - lo);
        const double slack = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
        bool open = false;
        double t_on = 0.0, t_last = 0.0;
        for (std::size_t k = 0; k < tr.size(); ++k) {
            const double u = tr.inputs[k][static_cast<Eigen::Index>(i)];
            if (u > hi + slack || u < lo - slack || !std::isfinite(u)) {
                std::ostringstream msg;
                msg.precision(17);
                msg << "input " << i + 1 << " left its saturation interval [" << lo << ", " << hi << "] at t="
                    << tr.times[k] << " (u=" << u << ")";
                throw InvariantViolation(msg.str());
            }
            const bool at_bound = (hi - u <= touch) || (u - lo <= touch);
            if (at_bound && !open) {
                open = true;
                t_on = tr.times[k];
            }
            if (at_bound) t_last = tr.times[k];
            if (!at_bound && open) {
                out[i].push_back({t_on, t_last});
                open = false;
            }
        }
        if (open) out[i].push_back({t_on, t_last});
    }
    return out;
}

int oscillation_count(const std::vector<double>& series) {
    const std::size_t n = series.size();
    if (n < 3) return 0;
    std::vector<double> smooth(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t a = k >= 2 ? k - 2 : 0;
        const std::size_t b = std::min(n - 1, k + 2);
        std::vector<double> win(series.begin() + static_cast<long>(a), series.begin() + static_cast<long>(b) + 1);
        std::nth_element(win.begin(), win.begin() + static_cast<long>(win.size() / 2), win.end());
        smooth[k] = win[win.size() / 2];
    }
    double peak = 0.0;
    for (double v : series) peak = std::max(peak, std::abs(v));
    const double deadband = 1e-9 * (1.0 + peak);

    int count = 0;
    int last_sign = 0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double d = smooth[k + 1] - smooth[k];
        if (std::abs(d) <= deadband) continue;
        const int s = d > 0 ? 1 : -1;
        if (last_sign != 0 && s != last_sign) ++count;
        last_sign = s;
    }
    return count;
}

int metric_oscillations(const SimulationTrace& tr, int channel) { return oscillation_count(tr.channel(channel)); }

}  // namespace pbc
