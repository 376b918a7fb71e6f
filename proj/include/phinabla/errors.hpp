#pragma once

#include <stdexcept>
#include <string>

namespace phn {

enum class ErrorCode {
  invalid_argument,
  parse_error,
  non_prime,
  no_irreducible_polynomial,
  division_by_zero,
  context_mismatch,
  not_invertible,
  rank_error,
  unbounded_determinant,
  window_inconclusive,
  malformed_certificate,
  pattern_violation,
  wild_ramification,
  zero_scale,
  internal,
};

const char* error_code_name(ErrorCode code) noexcept;

// Every failure raised by the kernel carries one of the codes above; the C API
// maps them one-to-one onto phn_status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace phn
