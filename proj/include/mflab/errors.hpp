#pragma once

#include <stdexcept>
#include <string>

namespace mflab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid user-facing configuration (grid, field spec, config file keys).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Objects living on incompatible grids or bases.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation (p > N, empty input).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Caller broke a documented precondition (e.g. unnormalized state).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// An iterative method failed to converge.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Requested problem exceeds a configured resource cap.
class ResourceError : public Error {
public:
    using Error::Error;
};

/// A computed quantity violates an invariant it must satisfy
/// (self-adjointness, norm bounds, triangle inequality).
class ConsistencyError : public Error {
public:
    using Error::Error;
};

}  // namespace mflab
