#pragma once

#include <stdexcept>
#include <string>

namespace bifrost {

/// Base class for every failure raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Vector or matrix dimensions do not match what an operation requires.
struct ShapeError : Error {
  using Error::Error;
};

/// A byte string is not a valid group element, frame, or file record.
struct EncodingError : Error {
  using Error::Error;
};

/// An id column contains repeated identifiers.
struct DuplicateIdError : Error {
  using Error::Error;
};

/// The two endpoints disagree on negotiated parameters.
struct ParamMismatchError : Error {
  using Error::Error;
};

/// Socket or channel failure, or a malformed frame.
struct TransportError : Error {
  using Error::Error;
};

/// A single-use shuffle correlation was consumed twice.
struct CorrelationReuseError : Error {
  using Error::Error;
};

/// File could not be read, written, or parsed.
struct IoError : Error {
  using Error::Error;
};

}  // namespace bifrost
