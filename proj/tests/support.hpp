#pragma once

#include <cmath>
#include <initializer_list>
#include <random>

#include "pbc/models.hpp"

namespace testing {

inline pbc::Vector vec(std::initializer_list<double> v) {
    pbc::Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

inline pbc::Vector random_in(std::mt19937_64& rng, const pbc::Vector& lo, const pbc::Vector& hi) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    pbc::Vector x(lo.size());
    for (Eigen::Index i = 0; i < lo.size(); ++i) x[i] = lo[i] + (hi[i] - lo[i]) * u(rng);
    return x;
}

inline pbc::Vector random_vector(std::mt19937_64& rng, int n, double scale = 1.0) {
    return random_in(rng, pbc::Vector::Constant(n, -scale), pbc::Vector::Constant(n, scale));
}

// xdot = J x + B u, S = x'Px/2, gamma = B'P x.
inline pbc::InputAffineModel linear_model(const pbc::Matrix& J, const pbc::Matrix& B, const pbc::Matrix& P) {
    pbc::InputAffineModel m;
    m.name = "linear";
    m.n = static_cast<int>(J.rows());
    m.m = static_cast<int>(B.cols());
    m.f = [J](const pbc::Vector& x) -> pbc::Vector { return J * x; };
    m.g = [B](const pbc::Vector&) -> pbc::Matrix { return B; };
    m.S = [P](const pbc::Vector& x) { return 0.5 * x.dot(P * x); };
    m.grad_S = [P](const pbc::Vector& x) -> pbc::Vector { return P * x; };
    m.ell = [](const pbc::Vector&) -> pbc::Vector { return pbc::Vector::Zero(1); };
    const pbc::Matrix BtP = B.transpose() * P;
    m.gamma = [BtP](const pbc::Vector& x) -> pbc::Vector { return BtP * x; };
    return m;
}

inline double rel_err(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

}  // namespace testing
