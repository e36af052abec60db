#pragma once

#include <stdexcept>
#include <string>

namespace ergolab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A model, estimator or generator parameter is outside its admissible range.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Quadrature grid does not capture the density (insufficient decay at the ends).
class GridError : public Error {
public:
    using Error::Error;
};

/// Checkpoint schedule is malformed.
class ScheduleError : public Error {
public:
    using Error::Error;
};

/// Scheme/model combination or experiment configuration is invalid.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& field, const std::string& what)
        : Error(field.empty() ? what : field + ": " + what), field_(field) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace ergolab
