#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace thermoform {

/// Short form of a number for error messages.
inline std::string short_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

/// Input rejected before any numerics ran (bad config, schema violation).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A certified enclosure was too wide to decide the question asked of it.
/// The caller can usually recover by tightening tolerances.
class IndeterminateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative method ran out of iterations.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

} // namespace thermoform
