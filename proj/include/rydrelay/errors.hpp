#ifndef RYDRELAY_ERRORS_HPP
#define RYDRELAY_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rydrelay {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or degenerate atom placement (coincident atoms, minimum-distance
/// violation, malformed array layout).
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Adiabatic elimination failed because the relay matrix is (near-)singular.
class EliminationError : public Error {
public:
    EliminationError(const std::string& msg, double condition_number)
        : Error(msg), condition_number_(condition_number) {}
    double condition_number() const noexcept { return condition_number_; }

private:
    double condition_number_;
};

/// Time integration failed to meet the requested accuracy (trace/norm drift
/// or step-size collapse).
class IntegrationError : public Error {
public:
    using Error::Error;
};

/// Invalid run configuration (unknown keys, missing values, bad ranges).
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace rydrelay

#endif
