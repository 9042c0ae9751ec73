#pragma once

#include <stdexcept>
#include <string>

namespace rescal {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed triple record or configuration text.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Entity, relation, or cell index outside the tensor bounds.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// Dense materialization would exceed the configured entity cap.
class ResourceLimitError : public Error {
 public:
  using Error::Error;
};

/// Hyperparameters or run configuration violate their invariants.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Singular system, non-finite objective, or similar numerical failure.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Model file problems: version mismatch, corrupt payload, inconsistent dims.
class FormatError : public Error {
 public:
  using Error::Error;
};

class CorruptFileError : public FormatError {
 public:
  using FormatError::FormatError;
};

class VersionMismatchError : public FormatError {
 public:
  using FormatError::FormatError;
};

class DimensionError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// Metric is undefined for the given input (e.g. AUC-PR without positives).
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

}  // namespace rescal
