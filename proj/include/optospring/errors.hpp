#pragma once

#include <stdexcept>
#include <string>

namespace optospring {

// Base of every error thrown by the library. The CLI maps ConfigError to
// exit code 2 and everything else to exit code 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class VariantMismatchError : public DomainError {
public:
    using DomainError::DomainError;
};

class DegenerateModelError : public DomainError {
public:
    using DomainError::DomainError;
};

// Pole of a susceptibility or transfer function hit exactly.
class SingularityError : public DomainError {
public:
    using DomainError::DomainError;
};

class BandwidthUndefinedError : public DomainError {
public:
    using DomainError::DomainError;
};

// Squeezing formulas need finite nonzero g; pure-coupling limits have
// separate closed forms.
class PureCouplingError : public DomainError {
public:
    using DomainError::DomainError;
};

class AngleIndifferentError : public DomainError {
public:
    using DomainError::DomainError;
};

class InstabilityError : public Error {
public:
    using Error::Error;
};

class EstimatorError : public Error {
public:
    using Error::Error;
};

class TransientError : public Error {
public:
    using Error::Error;
};

// Internal identity that must hold by construction was violated.
class InvariantError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace optospring
