#include "pbc/sampling.hpp"

#include <cmath>
#include <random>

#include "pbc/errors.hpp"

namespace pbc {

void SampleSpec::validate() const {
    if (lo.size() != hi.size()) throw ShapeError("sample box bounds differ in length");
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
        if (!(lo[i] <= hi[i])) throw ConfigError("sample box needs lo <= hi");
    }
    if (count < 0) throw ConfigError("sample count must be nonnegative");
}

SampleSpec SampleSpec::extended(const Vector& lo_extra, const Vector& hi_extra) const {
    SampleSpec out = *this;
    out.lo.resize(lo.size() + lo_extra.size());
    out.hi.resize(hi.size() + hi_extra.size());
    out.lo << lo, lo_extra;
    out.hi << hi, hi_extra;
    return out;
}

std::vector<Vector> draw_samples(const SampleSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Vector> out;
    out.reserve(spec.count);
    for (int k = 0; k < spec.count; ++k) {
        Vector x(spec.lo.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = spec.lo[i] + (spec.hi[i] - spec.lo[i]) * unit(rng);
        out.push_back(std::move(x));
    }
    return out;
}

std::vector<double> evaluate_serial(const std::vector<Vector>& points, const SampleKernel& kernel) {
    std::vector<double> out(points.size());
    for (std::size_t k = 0; k < points.size(); ++k) out[k] = kernel(points[k]);
    return out;
}

namespace {

WorstCase reduce(const std::vector<double>& values) {
    WorstCase w;
    if (values.empty()) return w;
    w.value = values[0];
    for (std::size_t k = 1; k < values.size(); ++k) {
        if (values[k] > w.value || (std::isnan(values[k]) && !std::isnan(w.value))) {
            w.value = values[k];
            w.index = k;
        }
    }
    return w;
}

}  // namespace

WorstCase worst_case_serial(const std::vector<Vector>& points, const SampleKernel& kernel) {
    return reduce(evaluate_serial(points, kernel));
}

WorstCase worst_case_parallel(const std::vector<Vector>& points, const SampleKernel& kernel) {
    return reduce(evaluate_parallel(points, kernel));
}

WorstCase worst_case(const std::vector<Vector>& points, const SampleKernel& kernel, Exec exec) {
    return exec == Exec::parallel ? worst_case_parallel(points, kernel) : worst_case_serial(points, kernel);
}

}  // namespace pbc
