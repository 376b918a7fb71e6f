#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "phinabla/rational.hpp"

namespace phn {

// Sentinel for "+infinity" in valuations, precisions and index bounds. Kept
// far from the int64 limits so that sums of two sentinels do not overflow.
inline constexpr std::int64_t kInfinity = std::int64_t{1} << 50;
inline constexpr int kMaxResidueDegree = 8;

using Digits = std::array<std::int64_t, kMaxResidueDegree>;

// An element of K written as pi^val * unit, the unit known modulo pi^rel.
//
// Three shapes exist: the structural zero, a zero known only up to O(pi^val)
// (produced by cancellation), and a nonzero ball. Values are immutable from the
// outside; all arithmetic goes through a FieldContext.
class Scalar {
 public:
  enum class Kind : std::uint8_t { exact_zero, inexact_zero, nonzero };

  Scalar() = default;

  Kind kind() const noexcept { return kind_; }
  bool is_exact_zero() const noexcept { return kind_ == Kind::exact_zero; }
  bool is_zero() const noexcept { return kind_ != Kind::nonzero; }
  bool is_nonzero() const noexcept { return kind_ == Kind::nonzero; }

  // +infinity for the structural zero, the bound k of O(pi^k) for an inexact zero.
  std::int64_t valuation() const noexcept { return val_; }
  int relative_precision() const noexcept { return rel_; }
  std::int64_t absolute_precision() const noexcept {
    return kind_ == Kind::exact_zero ? kInfinity : val_ + rel_;
  }
  const Digits& unit() const noexcept { return unit_; }

  friend bool operator==(const Scalar&, const Scalar&) = default;

 private:
  friend class FieldContext;

  Kind kind_ = Kind::exact_zero;
  int rel_ = 0;
  std::int64_t val_ = kInfinity;
  Digits unit_{};
};

// The coefficient field K: an unramified extension of Q_p of degree f, worked
// at relative precision N, with uniformizer pi = p. The Frobenius on K is the
// lift of the q-power map with q = p^frobenius_degree(); for fields built with
// make() it is the identity.
class FieldContext {
 public:
  static std::shared_ptr<const FieldContext> make(int p, int f, int precision);

  // Residue-field enlargement of `base` to degree f2 (a multiple of base.f()).
  // The Frobenius stays the lift of the base q-power map, so it fixes the image
  // of base and acts nontrivially on the new constants.
  static std::shared_ptr<const FieldContext> make_extension(const FieldContext& base, int f2);

  int p() const noexcept { return p_; }
  int f() const noexcept { return f_; }
  int precision() const noexcept { return precision_; }
  int frobenius_degree() const noexcept { return frob_degree_; }
  // Residue size of the Frobenius: q = p^frobenius_degree().
  std::int64_t q() const noexcept { return q_; }
  // Monic lift of the residue polynomial, little-endian, size f + 1. Empty when f == 1.
  const std::vector<std::int64_t>& residue_poly() const noexcept { return residue_poly_; }
  std::int64_t prime_power(int k) const;

  bool same_field(const FieldContext& other) const noexcept;

  Scalar zero() const { return Scalar{}; }
  Scalar one() const { return from_int(1); }
  Scalar from_int(std::int64_t value) const;
  Scalar from_rational(const Rational& value) const;
  Scalar pi_power(std::int64_t exponent) const;
  Scalar inexact_zero(std::int64_t bound) const;
  // Validates and normalizes an explicit (val, unit digits, rel) triple.
  Scalar from_parts(std::int64_t val, std::span<const std::int64_t> unit, int rel) const;
  // The digits of an element of O_K/p^rel (not necessarily a unit), scaled by pi^shift.
  Scalar from_digits(const Digits& digits, int rel, std::int64_t shift) const;

  Scalar add(const Scalar& a, const Scalar& b) const;
  Scalar sub(const Scalar& a, const Scalar& b) const;
  Scalar neg(const Scalar& a) const;
  Scalar mul(const Scalar& a, const Scalar& b) const;
  Scalar mul_int(const Scalar& a, std::int64_t k) const;
  Scalar inv(const Scalar& a) const;
  // Caps the absolute precision of a at abs_prec.
  Scalar truncate(const Scalar& a, std::int64_t abs_prec) const;

  // True when a - b vanishes modulo pi^prec.
  bool equal_at(const Scalar& a, const Scalar& b, std::int64_t prec) const;

  Scalar frobenius(const Scalar& a) const;
  bool frobenius_is_identity() const noexcept { return frob_degree_ == f_; }

  // Image of a scalar of the base field (the one this field was enlarged from).
  Scalar embed_from_base(const Scalar& a) const;
  bool is_extension() const noexcept { return !base_image_.empty(); }

  std::string to_string(const Scalar& a) const;

 private:
  FieldContext() = default;

  Digits poly_mul(const Digits& a, const Digits& b, std::int64_t modulus) const;
  Digits unit_inverse(const Digits& a, int rel) const;
  Digits evaluate(const Digits& coeffs, const std::vector<Digits>& powers, std::int64_t modulus) const;
  std::int64_t digits_valuation(const Digits& d) const;
  Scalar normalize(Digits digits, std::int64_t val, std::int64_t abs_prec) const;

  int p_ = 2;
  int f_ = 1;
  int precision_ = 1;
  int frob_degree_ = 1;
  std::int64_t q_ = 2;
  std::vector<std::int64_t> residue_poly_;
  std::vector<std::int64_t> pow_table_;
  // Powers r^0..r^{f-1} of the Frobenius image r of the generator (extension fields only).
  std::vector<Digits> frob_powers_;
  // Powers s^0..s^{f_base-1} of the image s of the base generator (extension fields only).
  std::vector<Digits> base_image_;
  int base_f_ = 0;
};

using FieldPtr = std::shared_ptr<const FieldContext>;

bool is_prime(std::int64_t n);

}  // namespace phn
