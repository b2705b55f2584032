#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace floqhhg {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of a function (e.g. J_n(x), x < 0).
struct DomainError : Error {
    using Error::Error;
};

// Evaluation exactly on a non-integrable singularity.
struct SingularityError : Error {
    using Error::Error;
};

// Iterative solver did not reach tolerance; carries the last iterate.
struct ConvergenceError : Error {
    ConvergenceError(const std::string& what, std::complex<double> last_iterate, double residual)
        : Error(what), last_iterate(last_iterate), residual(residual) {}
    std::complex<double> last_iterate;
    double residual;
};

// Discretization does not resolve the physics it is asked to represent.
struct ResolutionError : Error {
    using Error::Error;
};

// Step-doubling or unitarity certificate failed.
struct CertificationError : Error {
    using Error::Error;
};

struct FitError : Error {
    using Error::Error;
};

// Configuration parse or validation failure. line is 1-based, 0 when unknown.
struct ConfigError : Error {
    explicit ConfigError(const std::string& what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line(line) {}
    int line;
};

struct IoError : Error {
    using Error::Error;
};

} // namespace floqhhg
