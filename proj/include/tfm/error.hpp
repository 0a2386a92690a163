#pragma once

#include <stdexcept>
#include <string>

namespace tfm {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Shape or dimension mismatch between operands.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Mode index outside 1..K.
class ModeIndexError : public DimensionError {
 public:
  using DimensionError::DimensionError;
};

/// Lag window too long for the series (h0 >= T).
class LagError : public Error {
 public:
  using Error::Error;
};

/// Requested rank/count outside the valid range.
class RankError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or a failed numerical routine.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Input claimed orthonormal is not.
class BasisError : public Error {
 public:
  using Error::Error;
};

/// Data carries no usable signal (e.g. an all-zero series).
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; message names the offending row where possible.
class IngestionError : public Error {
 public:
  using Error::Error;
};

/// Records fail the preconditions of a fitting routine.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Invalid command line or flag combination.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace tfm
