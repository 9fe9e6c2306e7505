// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef IAEC_ERRORS_H_
#define IAEC_ERRORS_H_

#include <stdexcept>
#include <string>

namespace iaec {

// Exit codes used by the command line front-end. Each error class maps onto
// one of them so the tools never have to inspect messages.
enum class ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kData = 2,
  kNumerical = 3,
};

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual ExitCode code() const { return ExitCode::kData; }
};

// Bad flags, malformed configuration, inconsistent options.
class ConfigError : public Error {
 public:
  using Error::Error;
  ExitCode code() const override { return ExitCode::kUsage; }
};

// Missing files, unsupported WAV formats, invalid signals.
class DataError : public Error {
 public:
  using Error::Error;
};

class ShortInputError : public DataError {
 public:
  using DataError::DataError;
};

// NaN loss, diverging filters.
class NumericalError : public Error {
 public:
  using Error::Error;
  ExitCode code() const override { return ExitCode::kNumerical; }
};

}  // namespace iaec

#endif  // IAEC_ERRORS_H_
