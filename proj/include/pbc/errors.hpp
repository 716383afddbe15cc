#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace pbc {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct MetadataError : Error { using Error::Error; };
struct RankError : Error { using Error::Error; };
struct NumericFailure : Error { using Error::Error; };
struct DegenerateNetwork : Error { using Error::Error; };
struct AssumptionViolation : Error { using Error::Error; };
struct WiringError : Error { using Error::Error; };
struct InvariantViolation : Error { using Error::Error; };

struct EvaluationFailure : Error {
    EvaluationFailure(const std::string& msg, Eigen::VectorXd at)
        : Error(msg), point(std::move(at)) {}
    Eigen::VectorXd point;
};

struct NotAssignable : Error {
    NotAssignable(const std::string& msg, double r) : Error(msg), residual(r) {}
    double residual;
};

struct PreconditionError : Error {
    PreconditionError(const std::string& msg, double r) : Error(msg), residual(r) {}
    double residual;
};

struct DivergenceError : Error {
    DivergenceError(const std::string& msg, double t) : Error(msg), time(t) {}
    double time;
};

}  // namespace pbc
