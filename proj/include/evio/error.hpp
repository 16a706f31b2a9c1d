#pragma once

#include <stdexcept>
#include <string>

namespace evio {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed text input (CSV rows, JSON scenarios). Messages carry the
/// offending line number where one exists.
struct ParseError : Error {
    using Error::Error;
};

/// Structural problems in binary or tabular files: bad magic, truncated
/// payload, index gaps.
struct FormatError : Error {
    using Error::Error;
};

/// Coordinates outside the declared sensor geometry.
struct BoundsError : Error {
    using Error::Error;
};

/// Precondition violations on operation arguments.
struct ArgumentError : Error {
    using Error::Error;
};

}  // namespace evio
