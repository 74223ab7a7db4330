#pragma once

#include <stdexcept>
#include <string>

namespace fracprop {

// Base of every error raised by the library. The CLI maps these to exit
// code 2 and prints what() verbatim.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A value violates an operation precondition (alpha out of range, t < 0, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Power series hit its term cap before the stopping rule fired.
class NonConvergence : public Error {
public:
    using Error::Error;
};

// Kernel denominator r^2 - 2 r z cos(pi alpha) + z^2 is numerically zero.
class PoleProximity : public Error {
public:
    using Error::Error;
};

class QuadratureFailure : public Error {
public:
    using Error::Error;
};

class DegenerateGrid : public Error {
public:
    using Error::Error;
};

class NotHermitian : public Error {
public:
    using Error::Error;
};

class NotPositive : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// Mittag-Leffler evaluation failed at a specific spectral value.
class EvaluationFailure : public Error {
public:
    EvaluationFailure(const std::string& what, double omega)
        : Error(what), omega_(omega) {}

    double omega() const noexcept { return omega_; }

private:
    double omega_;
};

}  // namespace fracprop
