#ifndef KICKHO_ERROR_HPP
#define KICKHO_ERROR_HPP

#include <stdexcept>
#include <string>

namespace kickho {

// Every exception thrown by the core derives from Error and carries the
// status code reported through the C API.
enum class ErrorCode : int {
  Domain = 1,
  NonResonant = 2,
  Numeric = 3,
  Dimension = 4,
  InsufficientBasis = 5,
  Io = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCode::Domain, what) {}
};

class NonResonantError : public Error {
 public:
  explicit NonResonantError(const std::string& what)
      : Error(ErrorCode::NonResonant, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorCode::Numeric, what) {}
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what)
      : Error(ErrorCode::Dimension, what) {}
};

class InsufficientBasisError : public Error {
 public:
  explicit InsufficientBasisError(const std::string& what)
      : Error(ErrorCode::InsufficientBasis, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::Io, what) {}
};

}  // namespace kickho

#endif
