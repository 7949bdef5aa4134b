#pragma once

#include <stdexcept>
#include <string>

namespace pmc {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid grid or solver configuration (e.g. non power-of-two N).
class ConfigurationError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Operands live on incompatible grids or have the wrong number of components.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Mollifier radius is too small for the sampling lattice.
class ResolutionError : public Error {
public:
    using Error::Error;
};

/// A caller broke a documented precondition (e.g. right-hand side with nonzero mean).
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// Manufactured-solution construction produced a field that fails the hypotheses.
class ConstructionError : public Error {
public:
    using Error::Error;
};

/// Text input (config, expression, field file) could not be parsed.
class ParseError : public Error {
public:
    ParseError(const std::string& message, int line = 0, std::string key = {})
        : Error(message), line_(line), key_(std::move(key)) {}

    int line() const { return line_; }
    const std::string& key() const { return key_; }

private:
    int line_;
    std::string key_;
};

}  // namespace pmc
