#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pbc/numerics.hpp"

namespace pbc {

struct SampleSpec {
    Vector lo;
    Vector hi;
    int count = 1000;
    std::uint64_t seed = 1;

    void validate() const;
    SampleSpec extended(const Vector& lo_extra, const Vector& hi_extra) const;
};

// Deterministic given the seed; always generated serially.
std::vector<Vector> draw_samples(const SampleSpec& spec);

enum class Exec { serial, parallel };

struct WorstCase {
    double value = 0.0;
    std::size_t index = 0;
};

using SampleKernel = std::function<double(const Vector&)>;

// Max of kernel over points, first index on ties; both paths return identical results.
WorstCase worst_case_serial(const std::vector<Vector>& points, const SampleKernel& kernel);
WorstCase worst_case_parallel(const std::vector<Vector>& points, const SampleKernel& kernel);
WorstCase worst_case(const std::vector<Vector>& points, const SampleKernel& kernel, Exec exec);

// Element-wise evaluation with the same split.
std::vector<double> evaluate_serial(const std::vector<Vector>& points, const SampleKernel& kernel);
std::vector<double> evaluate_parallel(const std::vector<Vector>& points, const SampleKernel& kernel);

int max_threads();

}  // namespace pbc
