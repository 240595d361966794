#pragma once

#include <stdexcept>
#include <string>

namespace risolve {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonFiniteEvaluation : Error {
    using Error::Error;
};

struct EigenSolveFailure : Error {
    using Error::Error;
};

struct LinearSolveFailure : Error {
    using Error::Error;
};

struct UnsupportedExponent : Error {
    using Error::Error;
};

struct OutOfDomain : Error {
    using Error::Error;
};

struct NoConvergence : Error {
    NoConvergence(const std::string& what, int step, double residual)
        : Error(what), step_index(step), last_residual(residual) {}
    int step_index = -1;
    double last_residual = 0.0;
};

struct NonConvexTotal : Error {
    using Error::Error;
};

struct AdmissibilityViolation : Error {
    using Error::Error;
};

struct InsufficientLevels : Error {
    using Error::Error;
};

} // namespace risolve
