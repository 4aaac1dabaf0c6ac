#pragma once

#include <stdexcept>
#include <string>

namespace nimbus {

/// Base of the library's error hierarchy. CLI exit codes map io_error to 3
/// and every other subclass to 4.
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

/// File open/read/write failure.
class io_error : public error {
public:
    using error::error;
};

/// Malformed RAS1 magic or header.
class format_error : public error {
public:
    using error::error;
};

/// Payload shorter than the header declares.
class truncation_error : public error {
public:
    using error::error;
};

/// Data violates a type invariant (NaN/Inf, negative radiance, out-of-range).
class validation_error : public error {
public:
    using error::error;
};

/// A function argument is outside its allowed range.
class parameter_error : public error {
public:
    using error::error;
};

/// Input outside the mathematical domain of an operation.
class domain_error : public error {
public:
    using error::error;
};

/// Raster dimensions or band counts do not agree.
class shape_error : public error {
public:
    using error::error;
};

/// Too few usable data points (e.g. fewer than 2 non-empty LSGF bins).
class insufficient_data_error : public error {
public:
    using error::error;
};

} // namespace nimbus
