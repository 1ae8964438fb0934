#pragma once

#include <stdexcept>
#include <string>

namespace ramanecho {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad or missing configuration (unknown key, malformed value, wrong variant).
class ConfigError : public Error {
public:
    using Error::Error;
};

// A physics precondition does not hold for the requested operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// Grid cannot resolve the problem (Nyquist, step size, spacing).
class GridError : public DomainError {
public:
    using DomainError::DomainError;
};

class PoleError : public DomainError {
public:
    using DomainError::DomainError;
};

// Adaptive integrator gave up (step underflow or step budget exhausted).
class StiffnessError : public DomainError {
public:
    using DomainError::DomainError;
};

// Mathematically well posed but outside what the model covers.
class UnsupportedCase : public DomainError {
public:
    using DomainError::DomainError;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace ramanecho
