#pragma once

#include <stdexcept>
#include <string>

namespace intmean {

enum class ErrorKind {
  domain_violation,
  non_finite,
  uncertifiable_tail,
  unbounded_sup,
  quadrature,
  invalid_argument,
  missing_derivative,
  hypothesis,
  parse,
  non_differentiable,
  io,
};

const char* to_string(ErrorKind kind);

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace intmean
