#pragma once

#include <stdexcept>
#include <string>

namespace ietlab {

// Error categories map one-to-one onto CLI exit codes.
enum class ErrorKind {
  Parse,         // malformed input text / JSON (exit 2)
  Precondition,  // operation called outside its contract (exit 3)
  Verification,  // an internal exact check failed (exit 4)
  Domain,        // arithmetic domain error, e.g. division by zero (exit 3)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ErrorKind::Parse, what) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what)
      : Error(ErrorKind::Precondition, what) {}
};

class VerificationError : public Error {
 public:
  explicit VerificationError(const std::string& what)
      : Error(ErrorKind::Verification, what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::Domain, what) {}
};

}  // namespace ietlab
