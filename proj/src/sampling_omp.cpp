#include <exception>

#include <omp.h>

#include "pbc/sampling.hpp"

namespace pbc {

std::vector<double> evaluate_parallel(const std::vector<Vector>& points, const SampleKernel& kernel) {
    const auto n = static_cast<long long>(points.size());
    std::vector<double> out(points.size());
    std::exception_ptr failure;
#pragma omp parallel for schedule(static)
    for (long long k = 0; k < n; ++k) {
        try {
            out[k] = kernel(points[k]);
        } catch (...) {
#pragma omp critical(pbc_sample_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace pbc
