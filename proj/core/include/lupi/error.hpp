#pragma once

#include <stdexcept>
#include <string>

namespace lupi {

// Base of every exception thrown by the library. The command-line tool maps
// the concrete subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller-side precondition failed (bad configuration, bad hyperparameter).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input data. Carries the offending file and line
// when the problem was found while parsing (line 0 means the whole file).
class DataError : public Error {
 public:
  explicit DataError(const std::string& what);
  DataError(const std::string& file, long line, const std::string& what);

  const std::string& file() const noexcept { return file_; }
  long line() const noexcept { return line_; }

 private:
  std::string file_;
  long line_ = 0;
};

// Matrix or vector shapes disagree.
class DimensionMismatch : public DataError {
 public:
  using DataError::DataError;
};

// A numerical solver could not produce a usable result.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace lupi
