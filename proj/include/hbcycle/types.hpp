#pragma once

#include <stdexcept>
#include <string>

namespace hbcycle {

// Strongly convex smooth class parameters, 0 < mu <= L.
struct FunctionClass {
    double mu = 1.0;
    double L = 1.0;
    double kappa() const { return mu / L; }
};

// Heavy-ball step size and momentum.
struct HbParams {
    double gamma = 0.0;
    double beta = 0.0;
};

struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverError : NumericalError {
    using NumericalError::NumericalError;
};

void validate(const FunctionClass& c);

}  // namespace hbcycle
