#pragma once

#include <stdexcept>
#include <string>

namespace casimir {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: non-unit vectors, non-unitary matrices, bad grammar, ...
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A physical precondition failed: negative modes, bound states.
class PhysicsError : public Error {
public:
    using Error::Error;
};

class BoundStateError : public PhysicsError {
public:
    using PhysicsError::PhysicsError;
};

/// Evaluation landed on a zero of a function whose logarithm is required.
class SingularPointError : public PhysicsError {
public:
    using PhysicsError::PhysicsError;
};

/// Numerical machinery (quadrature, root bracketing) did not converge.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace casimir
