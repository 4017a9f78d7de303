#pragma once

#include <stdexcept>
#include <string>

namespace emden {

enum class ErrorKind {
  invalid_argument,
  evaluation,
  undefined_quotient,
  nehari_undefined,
  non_convergence,
  unsupported,
  wrong_exponent,
  inconclusive,
  io,
};

char const* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string const& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, std::string const& message) {
  throw Error(kind, message);
}

inline void require(bool condition, std::string const& message) {
  if (!condition) fail(ErrorKind::invalid_argument, message);
}

}  // namespace emden
