#pragma once

#include <stdexcept>
#include <string>

namespace cadict {

// Coarse failure classes. The CLI maps them onto its exit codes.
enum class ErrorKind {
  usage,       // caller violated an API precondition or passed bad options
  data,        // malformed or inconsistent input files
  infeasible,  // inputs are well formed but cannot satisfy the request
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what) : Error(ErrorKind::infeasible, what) {}
};

}  // namespace cadict
