//
// latefusion - Copyright 2026 The latefusion Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATEFUSION_ERROR_HPP_
#define LATEFUSION_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace latefusion {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data. The CLI maps this family to exit
/// status 3.
class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string &reason,
             const std::string &file = {})
      : DataError((file.empty() ? std::string() : file + ": ") + "line "
                  + std::to_string(line) + ": " + reason),
        line_(line), reason_(reason) {}

  std::size_t line() const noexcept { return line_; }
  const std::string &reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

class DuplicateKeyError : public DataError {
 public:
  using DataError::DataError;
};

class AlignmentError : public DataError {
 public:
  using DataError::DataError;
};

class MissingLabelError : public DataError {
 public:
  using DataError::DataError;
};

class EmptyDatasetError : public DataError {
 public:
  using DataError::DataError;
};

class UndefinedMetricError : public DataError {
 public:
  using DataError::DataError;
};

/// Caller broke a precondition (dimension mismatch, bad bounds, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// An oracle refused a request it cannot serve exhaustively.
class OracleRefusal : public ContractError {
 public:
  using ContractError::ContractError;
};

/// Bad command line or configuration. Exit status 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// The objective produced a non-finite value. Exit status 4.
class OptimizationAbort : public Error {
 public:
  using Error::Error;
};

}  // namespace latefusion

#endif  // LATEFUSION_ERROR_HPP_
