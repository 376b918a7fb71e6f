#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "phinabla/field.hpp"
#include "phinabla/rational.hpp"

namespace phn {

struct Term {
  std::int64_t index = 0;
  Scalar coeff;

  friend bool operator==(const Term&, const Term&) = default;
};

class RobbaElement;

// Truncated Robba ring over a coefficient field: Laurent polynomials in t with
// support in the window [lo, hi] (lo <= 0 <= hi), together with a Frobenius
// lift t -> u(t), u congruent to t^q modulo pi.
class RingContext {
 public:
  static std::shared_ptr<const RingContext> make(FieldPtr field, std::int64_t lo, std::int64_t hi);
  // Same ring with a non-default Frobenius lift; `lift` must reduce to t^q mod pi.
  static std::shared_ptr<const RingContext> make_with_lift(FieldPtr field, std::int64_t lo, std::int64_t hi,
                                                           std::vector<Term> lift);

  const FieldContext& field() const noexcept { return *field_; }
  const FieldPtr& field_ptr() const noexcept { return field_; }
  std::int64_t lo() const noexcept { return lo_; }
  std::int64_t hi() const noexcept { return hi_; }
  std::int64_t width() const noexcept { return hi_ - lo_; }
  std::int64_t q() const noexcept { return field_->q(); }
  bool default_lift() const noexcept { return lift_.empty(); }
  // Terms of u(t); empty for the default lift t^q.
  const std::vector<Term>& lift_terms() const noexcept { return lift_; }

  bool same_ring(const RingContext& other) const noexcept;

 private:
  RingContext() = default;

  FieldPtr field_;
  std::int64_t lo_ = 0;
  std::int64_t hi_ = 0;
  std::vector<Term> lift_;
};

using RingPtr = std::shared_ptr<const RingContext>;

// A truncated Laurent polynomial sum c_i t^i.
//
// Besides its terms, an element records two kinds of uncertainty. precision()
// is a global bound: every coefficient is known modulo pi^precision() (on top
// of the precision of each stored coefficient). known_lo()/known_hi() delimit
// the indices whose coefficients are reliable; products and Frobenius images
// that spill past the window shrink this range.
class RobbaElement {
 public:
  RobbaElement() = default;
  explicit RobbaElement(RingPtr ring) : ring_(std::move(ring)) {}

  static RobbaElement zero(const RingPtr& ring) { return RobbaElement(ring); }
  static RobbaElement constant(const RingPtr& ring, const Scalar& c) { return monomial(ring, c, 0); }
  static RobbaElement one(const RingPtr& ring) { return constant(ring, ring->field().one()); }
  static RobbaElement from_int(const RingPtr& ring, std::int64_t value, std::int64_t index = 0);
  static RobbaElement monomial(const RingPtr& ring, const Scalar& c, std::int64_t index);
  // Collects, merges and normalizes arbitrary terms; indices outside the window are
  // discarded and narrow the known range.
  static RobbaElement from_terms(const RingPtr& ring, std::vector<Term> terms,
                                 std::int64_t precision = kInfinity, std::int64_t known_lo = -kInfinity,
                                 std::int64_t known_hi = kInfinity);

  const RingPtr& ring() const noexcept { return ring_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  std::int64_t precision() const noexcept { return prec_; }
  std::int64_t known_lo() const noexcept { return known_lo_; }
  std::int64_t known_hi() const noexcept { return known_hi_; }
  bool window_loss() const noexcept { return known_lo_ > -kInfinity || known_hi_ < kInfinity; }

  // No stored terms (the element is zero, possibly only at precision()).
  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_exact_zero() const noexcept { return terms_.empty() && prec_ >= kInfinity && !window_loss(); }
  Scalar coefficient(std::int64_t index) const;
  // Minimum coefficient valuation, +infinity for zero.
  std::int64_t min_valuation() const noexcept;
  std::int64_t min_index() const noexcept { return terms_.empty() ? kInfinity : terms_.front().index; }
  std::int64_t max_index() const noexcept { return terms_.empty() ? -kInfinity : terms_.back().index; }
  bool is_monomial() const noexcept { return terms_.size() == 1; }

  // Same data, ignoring the context pointer identity.
  bool identical(const RobbaElement& other) const;

 private:
  friend RobbaElement add(const RobbaElement&, const RobbaElement&);
  friend RobbaElement mul(const RobbaElement&, const RobbaElement&);

  RingPtr ring_;
  std::vector<Term> terms_;
  std::int64_t prec_ = kInfinity;
  std::int64_t known_lo_ = -kInfinity;
  std::int64_t known_hi_ = kInfinity;
};

void require_same_ring(const RobbaElement& x, const RobbaElement& y);

RobbaElement add(const RobbaElement& x, const RobbaElement& y);
RobbaElement sub(const RobbaElement& x, const RobbaElement& y);
RobbaElement neg(const RobbaElement& x);
RobbaElement mul(const RobbaElement& x, const RobbaElement& y);
RobbaElement scale(const RobbaElement& x, const Scalar& c);
// Multiplication by t^k.
RobbaElement shift(const RobbaElement& x, std::int64_t k);
RobbaElement power(const RobbaElement& x, std::int64_t n);

// d/dt.
RobbaElement derive(const RobbaElement& x);
// n-fold Frobenius: sum c_i t^i -> sum phi(c_i) u^i, iterated.
RobbaElement frobenius(const RobbaElement& x, std::int64_t n = 1);
// mu(phi^n, t) = mu * phi(mu) * ... * phi^{n-1}(mu), mu = d(u)/dt.
RobbaElement mu_factor(const RingPtr& ring, std::int64_t n);
// min_i (v(c_i) + i * r); nullopt stands for +infinity.
std::optional<Rational> gauss_valuation(const RobbaElement& x, const Rational& r);
// Inverse of c t^i0 (1 + eps) with eps topologically nilpotent; throws not_invertible otherwise.
RobbaElement invert(const RobbaElement& x);

// Tame Kummer extension t = u^m, optionally with the residue field enlarged to
// degree f2. Elements of the extension ring live in inner(), a ring in u whose
// window is the base window scaled by m and whose Frobenius is u -> u^q.
class ExtensionContext {
 public:
  static std::shared_ptr<const ExtensionContext> make(const RingPtr& base, std::int64_t m, int f2 = 0);

  const RingPtr& base() const noexcept { return base_; }
  const RingPtr& inner() const noexcept { return inner_; }
  std::int64_t m() const noexcept { return m_; }

  // Substitutes t = u^m (and embeds the coefficients).
  RobbaElement pullback(const RobbaElement& x) const;
  // d/dt on the extension ring: (1/m) u^{1-m} d/du.
  RobbaElement derive_t(const RobbaElement& y) const;
  // Embeds a coefficient of the base field.
  Scalar embed(const Scalar& c) const { return inner_->field().embed_from_base(c); }

 private:
  ExtensionContext() = default;

  RingPtr base_;
  RingPtr inner_;
  std::int64_t m_ = 1;
};

using ExtensionPtr = std::shared_ptr<const ExtensionContext>;

}  // namespace phn
