#include "phinabla/errors.hpp"
#include "phinabla/rational.hpp"

#include <charconv>
#include <numeric>

namespace phn {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::non_prime: return "NonPrime";
    case ErrorCode::no_irreducible_polynomial: return "NoIrreduciblePolynomialFound";
    case ErrorCode::division_by_zero: return "DivisionByZero";
    case ErrorCode::context_mismatch: return "ContextMismatch";
    case ErrorCode::not_invertible: return "NotInvertibleAtPrecision";
    case ErrorCode::rank_error: return "RankError";
    case ErrorCode::unbounded_determinant: return "UnboundedDeterminant";
    case ErrorCode::window_inconclusive: return "WindowInconclusive";
    case ErrorCode::malformed_certificate: return "MalformedCertificate";
    case ErrorCode::pattern_violation: return "PatternViolation";
    case ErrorCode::wild_ramification: return "WildRamification";
    case ErrorCode::zero_scale: return "ZeroScale";
    case ErrorCode::internal: return "Internal";
  }
  return "Internal";
}

namespace {

std::int64_t parse_int(std::string_view text, std::string_view whole) {
  std::int64_t value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) {
    raise(ErrorCode::parse_error, "not a rational number: '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text, text));
  std::int64_t num = parse_int(text.substr(0, slash), text);
  std::int64_t den = parse_int(text.substr(slash + 1), text);
  if (den == 0) raise(ErrorCode::parse_error, "zero denominator in '" + std::string(text) + "'");
  return Rational(num, den);
}

std::string format_rational(const Rational& value) {
  if (value.denominator() == 1) return std::to_string(value.numerator());
  return std::to_string(value.numerator()) + "/" + std::to_string(value.denominator());
}

std::int64_t lcm_of(std::int64_t a, std::int64_t b) { return std::lcm(a, b); }

}  // namespace phn
