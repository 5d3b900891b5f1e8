#pragma once

#include <stdexcept>
#include <string>

namespace catmzi {

// Raised when a request is malformed: bad dimensions, out-of-range
// parameters, configurations that cannot produce a state.  The CLI maps
// this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a numerically sound request fails during evaluation:
// integrator step rejection budget exhausted, trace drift, degenerate
// norms.  The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace catmzi
