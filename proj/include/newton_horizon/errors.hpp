#pragma once

#include <stdexcept>
#include <string>

namespace newton_horizon {

/// Base class for all domain errors thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Evaluation point lies inside (or on the boundary of) the mass support.
struct InsideBody : Error {
    explicit InsideBody(const std::string& what) : Error(what) {}
};

/// Adaptive quadrature hit the subdivision cap before reaching the tolerance.
struct ToleranceNotMet : Error {
    explicit ToleranceNotMet(const std::string& what) : Error(what) {}
};

/// The support has zero volume, so a quantity per unit volume is undefined.
struct DegenerateSupport : Error {
    explicit DegenerateSupport(const std::string& what) : Error(what) {}
};

/// Launch speed meets or exceeds the escape threshold; no confinement bound exists.
struct AtOrAboveEscape : Error {
    explicit AtOrAboveEscape(const std::string& what) : Error(what) {}
};

/// A closed-form expression was evaluated outside its time/parameter domain.
struct DomainExceeded : Error {
    explicit DomainExceeded(const std::string& what) : Error(what) {}
};

/// Inputs violate a documented precondition.
struct BadParameters : Error {
    explicit BadParameters(const std::string& what) : Error(what) {}
};

/// The candidate region does not contain the body.
struct NotContaining : Error {
    explicit NotContaining(const std::string& what) : Error(what) {}
};

/// The requested criterion needs a body shape the given distribution doesn't have.
struct WrongShape : Error {
    explicit WrongShape(const std::string& what) : Error(what) {}
};

/// Scenario file is missing, malformed, or fails validation.
struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace newton_horizon
