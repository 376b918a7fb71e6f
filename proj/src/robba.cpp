#include "phinabla/robba.hpp"

#include <algorithm>
#include <numeric>

#include "phinabla/errors.hpp"

namespace phn {

namespace {

std::int64_t sat_add(std::int64_t a, std::int64_t b) {
  if (a >= kInfinity || b >= kInfinity) return kInfinity;
  if (a <= -kInfinity || b <= -kInfinity) return -kInfinity;
  return std::clamp<std::int64_t>(a + b, -kInfinity, kInfinity);
}

// Lowest index the element may be nonzero at, counting unreliable regions.
std::int64_t support_lo(const RobbaElement& x) {
  if (x.known_lo() > -kInfinity) return -kInfinity;
  return x.min_index();
}

std::int64_t support_hi(const RobbaElement& x) {
  if (x.known_hi() < kInfinity) return kInfinity;
  return x.max_index();
}

// Upper end of the reliable range of x*y contributed by the unknown top of x.
std::int64_t product_known_hi(const RobbaElement& x, const RobbaElement& y) {
  if (x.known_hi() >= kInfinity) return kInfinity;
  std::int64_t s = support_lo(y);
  if (s >= kInfinity) return kInfinity;
  if (s <= -kInfinity) return -kInfinity;
  return x.known_hi() + s;
}

std::int64_t product_known_lo(const RobbaElement& x, const RobbaElement& y) {
  if (x.known_lo() <= -kInfinity) return -kInfinity;
  std::int64_t s = support_hi(y);
  if (s <= -kInfinity) return -kInfinity;
  if (s >= kInfinity) return kInfinity;
  return x.known_lo() + s;
}

// Image of the known range under i -> i * factor.
std::pair<std::int64_t, std::int64_t> scale_known(std::int64_t lo, std::int64_t hi, std::int64_t factor) {
  auto scale_edge = [&](std::int64_t edge, int dir) -> std::int64_t {
    if (edge <= -kInfinity || edge >= kInfinity) return edge;
    __int128 v = static_cast<__int128>(edge + dir) * factor - dir;
    if (v >= kInfinity) return kInfinity - 1;
    if (v <= -kInfinity) return -kInfinity + 1;
    return static_cast<std::int64_t>(v);
  };
  return {scale_edge(lo, -1), scale_edge(hi, 1)};
}

std::int64_t checked_pow(std::int64_t base, std::int64_t n) {
  __int128 r = 1;
  for (std::int64_t i = 0; i < n; ++i) {
    r *= base;
    if (r > kInfinity) return kInfinity;
  }
  return static_cast<std::int64_t>(r);
}

RobbaElement lift_element(const RingPtr& ring) {
  if (ring->default_lift()) return RobbaElement::monomial(ring, ring->field().one(), ring->q());
  return RobbaElement::from_terms(ring, ring->lift_terms());
}

}  // namespace

std::shared_ptr<const RingContext> RingContext::make(FieldPtr field, std::int64_t lo, std::int64_t hi) {
  if (!field) raise(ErrorCode::invalid_argument, "missing coefficient field");
  if (lo > 0 || hi < 0) raise(ErrorCode::invalid_argument, "window must satisfy lo <= 0 <= hi");
  if (hi - lo > 1'000'000) raise(ErrorCode::invalid_argument, "window too wide");
  std::shared_ptr<RingContext> ring(new RingContext());
  ring->field_ = std::move(field);
  ring->lo_ = lo;
  ring->hi_ = hi;
  return ring;
}

std::shared_ptr<const RingContext> RingContext::make_with_lift(FieldPtr field, std::int64_t lo, std::int64_t hi,
                                                               std::vector<Term> lift) {
  auto base = make(field, lo, hi);
  std::sort(lift.begin(), lift.end(), [](const Term& a, const Term& b) { return a.index < b.index; });
  const FieldContext& k = *field;
  const std::int64_t q = k.q();
  bool has_leading = false;
  for (size_t i = 0; i < lift.size(); ++i) {
    if (i > 0 && lift[i].index == lift[i - 1].index)
      raise(ErrorCode::invalid_argument, "duplicate index in Frobenius lift");
    const Scalar& c = lift[i].coeff;
    if (lift[i].index == q) {
      if (!c.is_nonzero() || !k.equal_at(c, k.one(), 1))
        raise(ErrorCode::invalid_argument, "Frobenius lift must reduce to t^q modulo pi");
      has_leading = true;
    } else if (c.is_nonzero() && c.valuation() < 1) {
      raise(ErrorCode::invalid_argument, "Frobenius lift must reduce to t^q modulo pi");
    }
  }
  if (!has_leading) raise(ErrorCode::invalid_argument, "Frobenius lift must reduce to t^q modulo pi");
  bool is_default = lift.size() == 1 && lift[0].coeff == k.one();
  std::shared_ptr<RingContext> ring(new RingContext(*base));
  if (!is_default) ring->lift_ = std::move(lift);
  return ring;
}

bool RingContext::same_ring(const RingContext& other) const noexcept {
  if (this == &other) return true;
  return field_->same_field(*other.field_) && lo_ == other.lo_ && hi_ == other.hi_ && lift_ == other.lift_;
}

void require_same_ring(const RobbaElement& x, const RobbaElement& y) {
  if (!x.ring() || !y.ring() || !x.ring()->same_ring(*y.ring()))
    raise(ErrorCode::context_mismatch, "elements belong to different rings");
}

RobbaElement RobbaElement::from_int(const RingPtr& ring, std::int64_t value, std::int64_t index) {
  return monomial(ring, ring->field().from_int(value), index);
}

RobbaElement RobbaElement::monomial(const RingPtr& ring, const Scalar& c, std::int64_t index) {
  return from_terms(ring, {Term{index, c}});
}

RobbaElement RobbaElement::from_terms(const RingPtr& ring, std::vector<Term> terms, std::int64_t precision,
                                      std::int64_t known_lo, std::int64_t known_hi) {
  const FieldContext& k = ring->field();
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.index < b.index; });
  std::vector<Term> merged;
  merged.reserve(terms.size());
  for (auto& term : terms) {
    if (term.coeff.is_exact_zero()) continue;
    if (!merged.empty() && merged.back().index == term.index)
      merged.back().coeff = k.add(merged.back().coeff, term.coeff);
    else
      merged.push_back(std::move(term));
  }
  RobbaElement out(ring);
  out.prec_ = std::min(precision, kInfinity);
  out.known_lo_ = known_lo;
  out.known_hi_ = known_hi;
  for (const auto& term : merged) {
    if (term.coeff.is_exact_zero()) continue;
    if (term.index > ring->hi()) {
      out.known_hi_ = std::min(out.known_hi_, ring->hi());
      continue;
    }
    if (term.index < ring->lo()) {
      out.known_lo_ = std::max(out.known_lo_, ring->lo());
      continue;
    }
    if (!term.coeff.is_nonzero()) {
      out.prec_ = std::min(out.prec_, term.coeff.valuation());
      continue;
    }
    out.terms_.push_back(term);
  }
  std::erase_if(out.terms_, [&](const Term& t) { return t.coeff.valuation() >= out.prec_; });
  return out;
}

Scalar RobbaElement::coefficient(std::int64_t index) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), index,
                             [](const Term& t, std::int64_t i) { return t.index < i; });
  if (it != terms_.end() && it->index == index) return it->coeff;
  return Scalar{};
}

std::int64_t RobbaElement::min_valuation() const noexcept {
  std::int64_t v = kInfinity;
  for (const auto& t : terms_) v = std::min(v, t.coeff.valuation());
  return v;
}

bool RobbaElement::identical(const RobbaElement& other) const {
  return ring_ && other.ring_ && ring_->same_ring(*other.ring_) && terms_ == other.terms_ && prec_ == other.prec_ &&
         known_lo_ == other.known_lo_ && known_hi_ == other.known_hi_;
}

RobbaElement add(const RobbaElement& x, const RobbaElement& y) {
  require_same_ring(x, y);
  std::vector<Term> all;
  all.reserve(x.terms().size() + y.terms().size());
  all.insert(all.end(), x.terms().begin(), x.terms().end());
  all.insert(all.end(), y.terms().begin(), y.terms().end());
  return RobbaElement::from_terms(x.ring(), std::move(all), std::min(x.precision(), y.precision()),
                                  std::max(x.known_lo(), y.known_lo()), std::min(x.known_hi(), y.known_hi()));
}

RobbaElement neg(const RobbaElement& x) {
  const FieldContext& k = x.ring()->field();
  std::vector<Term> terms = x.terms();
  for (auto& t : terms) t.coeff = k.neg(t.coeff);
  return RobbaElement::from_terms(x.ring(), std::move(terms), x.precision(), x.known_lo(), x.known_hi());
}

RobbaElement sub(const RobbaElement& x, const RobbaElement& y) { return add(x, neg(y)); }

RobbaElement mul(const RobbaElement& x, const RobbaElement& y) {
  require_same_ring(x, y);
  const RingPtr& ring = x.ring();
  const FieldContext& k = ring->field();
  if (x.is_exact_zero() || y.is_exact_zero()) return RobbaElement::zero(ring);

  const std::int64_t lo = ring->lo();
  const std::int64_t hi = ring->hi();
  std::vector<Scalar> acc(static_cast<size_t>(hi - lo + 1));
  std::int64_t known_lo = std::max(product_known_lo(x, y), product_known_lo(y, x));
  std::int64_t known_hi = std::min(product_known_hi(x, y), product_known_hi(y, x));
  for (const auto& a : x.terms()) {
    for (const auto& b : y.terms()) {
      std::int64_t idx = a.index + b.index;
      if (idx > hi) {
        known_hi = std::min(known_hi, hi);
        continue;
      }
      if (idx < lo) {
        known_lo = std::max(known_lo, lo);
        continue;
      }
      Scalar& slot = acc[static_cast<size_t>(idx - lo)];
      slot = k.add(slot, k.mul(a.coeff, b.coeff));
    }
  }
  std::vector<Term> terms;
  for (size_t i = 0; i < acc.size(); ++i)
    if (!acc[i].is_exact_zero()) terms.push_back(Term{lo + static_cast<std::int64_t>(i), acc[i]});

  std::int64_t prec = kInfinity;
  if (x.precision() < kInfinity) prec = std::min(prec, sat_add(x.precision(), std::min(y.min_valuation(), y.precision())));
  if (y.precision() < kInfinity) prec = std::min(prec, sat_add(y.precision(), std::min(x.min_valuation(), x.precision())));
  return RobbaElement::from_terms(ring, std::move(terms), prec, known_lo, known_hi);
}

RobbaElement scale(const RobbaElement& x, const Scalar& c) {
  const FieldContext& k = x.ring()->field();
  if (c.is_exact_zero()) return RobbaElement::zero(x.ring());
  if (!c.is_nonzero()) {
    std::int64_t bound = sat_add(c.valuation(), std::min(x.min_valuation(), x.precision()));
    return RobbaElement::from_terms(x.ring(), {}, bound, x.known_lo(), x.known_hi());
  }
  std::vector<Term> terms = x.terms();
  for (auto& t : terms) t.coeff = k.mul(t.coeff, c);
  return RobbaElement::from_terms(x.ring(), std::move(terms), sat_add(x.precision(), c.valuation()), x.known_lo(),
                                  x.known_hi());
}

RobbaElement shift(const RobbaElement& x, std::int64_t s) {
  std::vector<Term> terms = x.terms();
  for (auto& t : terms) t.index += s;
  return RobbaElement::from_terms(x.ring(), std::move(terms), x.precision(), sat_add(x.known_lo(), s),
                                  sat_add(x.known_hi(), s));
}

RobbaElement power(const RobbaElement& x, std::int64_t n) {
  if (n < 0) return power(invert(x), -n);
  RobbaElement result = RobbaElement::one(x.ring());
  RobbaElement base = x;
  while (n > 0) {
    if (n & 1) result = mul(result, base);
    n >>= 1;
    if (n > 0) base = mul(base, base);
  }
  return result;
}

RobbaElement derive(const RobbaElement& x) {
  const FieldContext& k = x.ring()->field();
  std::vector<Term> terms;
  terms.reserve(x.terms().size());
  for (const auto& t : x.terms()) {
    if (t.index == 0) continue;
    terms.push_back(Term{t.index - 1, k.mul_int(t.coeff, t.index)});
  }
  return RobbaElement::from_terms(x.ring(), std::move(terms), x.precision(), sat_add(x.known_lo(), -1),
                                  sat_add(x.known_hi(), -1));
}

namespace {

RobbaElement frobenius_once_general(const RobbaElement& x) {
  const RingPtr& ring = x.ring();
  const FieldContext& k = ring->field();
  RobbaElement u = lift_element(ring);
  RobbaElement result = RobbaElement::from_terms(ring, {}, x.precision());
  if (x.is_zero()) return result;
  std::int64_t top = std::max<std::int64_t>(x.max_index(), 0);
  std::int64_t bottom = std::min<std::int64_t>(x.min_index(), 0);
  std::vector<RobbaElement> pos{RobbaElement::one(ring)};
  for (std::int64_t i = 1; i <= top; ++i) pos.push_back(mul(pos.back(), u));
  std::vector<RobbaElement> negp{RobbaElement::one(ring)};
  if (bottom < 0) {
    RobbaElement uinv = invert(u);
    for (std::int64_t i = 1; i <= -bottom; ++i) negp.push_back(mul(negp.back(), uinv));
  }
  for (const auto& t : x.terms()) {
    const RobbaElement& p = t.index >= 0 ? pos[static_cast<size_t>(t.index)] : negp[static_cast<size_t>(-t.index)];
    result = add(result, scale(p, k.frobenius(t.coeff)));
  }
  if (x.window_loss()) result = RobbaElement::from_terms(ring, result.terms(), result.precision(), 1, 0);
  return result;
}

}  // namespace

RobbaElement frobenius(const RobbaElement& x, std::int64_t n) {
  if (n < 0) raise(ErrorCode::invalid_argument, "Frobenius power must be nonnegative");
  const RingPtr& ring = x.ring();
  if (n == 0) return x;
  if (!ring->default_lift()) {
    RobbaElement y = x;
    for (std::int64_t i = 0; i < n; ++i) y = frobenius_once_general(y);
    return y;
  }
  const FieldContext& k = ring->field();
  const std::int64_t qn = checked_pow(ring->q(), n);
  std::int64_t known_lo = x.known_lo();
  std::int64_t known_hi = x.known_hi();
  std::tie(known_lo, known_hi) = scale_known(known_lo, known_hi, qn);
  std::vector<Term> terms;
  terms.reserve(x.terms().size());
  for (const auto& t : x.terms()) {
    __int128 idx = static_cast<__int128>(t.index) * qn;
    if (idx > ring->hi()) {
      known_hi = std::min(known_hi, ring->hi());
      continue;
    }
    if (idx < ring->lo()) {
      known_lo = std::max(known_lo, ring->lo());
      continue;
    }
    Scalar c = t.coeff;
    for (std::int64_t i = 0; i < n && !k.frobenius_is_identity(); ++i) c = k.frobenius(c);
    terms.push_back(Term{static_cast<std::int64_t>(idx), c});
  }
  return RobbaElement::from_terms(ring, std::move(terms), x.precision(), known_lo, known_hi);
}

RobbaElement mu_factor(const RingPtr& ring, std::int64_t n) {
  if (n < 1) raise(ErrorCode::invalid_argument, "mu_factor needs n >= 1");
  RobbaElement mu = ring->default_lift()
                        ? RobbaElement::monomial(ring, ring->field().from_int(ring->q()), ring->q() - 1)
                        : derive(lift_element(ring));
  RobbaElement result = mu;
  RobbaElement image = mu;
  for (std::int64_t i = 1; i < n; ++i) {
    image = frobenius(image, 1);
    result = mul(result, image);
  }
  return result;
}

std::optional<Rational> gauss_valuation(const RobbaElement& x, const Rational& r) {
  if (r < Rational(0)) raise(ErrorCode::invalid_argument, "Gauss parameter must be nonnegative");
  std::optional<Rational> best;
  for (const auto& t : x.terms()) {
    Rational v = Rational(t.coeff.valuation()) + r * Rational(t.index);
    if (!best || v < *best) best = v;
  }
  return best;
}

RobbaElement invert(const RobbaElement& x) {
  const RingPtr& ring = x.ring();
  const FieldContext& k = ring->field();
  if (x.is_zero()) raise(ErrorCode::not_invertible, "zero is not invertible");
  if (x.window_loss()) raise(ErrorCode::not_invertible, "element with window loss cannot be inverted reliably");

  const std::int64_t vmin = x.min_valuation();
  const Term* dominant = nullptr;
  for (const auto& t : x.terms()) {
    if (t.coeff.valuation() == vmin) {
      dominant = &t;
      break;
    }
  }
  const std::int64_t i0 = dominant->index;
  if (-i0 < ring->lo() || -i0 > ring->hi())
    raise(ErrorCode::not_invertible, "inverse of the dominant monomial falls outside the window");
  // The series for 1 / (1 + eps) only terminates when eps is topologically nilpotent.
  for (const auto& t : x.terms())
    if (t.index != i0 && t.coeff.valuation() <= vmin)
      raise(ErrorCode::not_invertible, "no strictly dominant term");

  const Scalar cinv = k.inv(dominant->coeff);
  const std::int64_t n = k.precision();
  // eps = x / (c t^i0) - 1; relative precision is capped at N.
  std::vector<Term> eps_terms;
  for (const auto& t : x.terms()) {
    if (&t == dominant) continue;
    eps_terms.push_back(Term{t.index - i0, k.neg(k.mul(t.coeff, cinv))});
  }
  const std::int64_t eps_prec = x.precision() < kInfinity ? x.precision() - vmin : kInfinity;
  RobbaElement minus_eps = RobbaElement::from_terms(ring, std::move(eps_terms), eps_prec);
  if (minus_eps.window_loss())
    raise(ErrorCode::not_invertible, "normalized element does not fit the window");

  RobbaElement sum = RobbaElement::from_terms(ring, {Term{0, k.one()}}, eps_prec);
  RobbaElement power_term = sum;
  // Corrections of valuation >= N are below the working precision.
  auto drop_small = [&](const RobbaElement& e) {
    for (const auto& t : e.terms())
      if (t.coeff.valuation() >= n)
        return RobbaElement::from_terms(ring, e.terms(), std::min(e.precision(), n), e.known_lo(), e.known_hi());
    return e;
  };
  const std::int64_t cap = n * (1 + ring->width());
  std::int64_t iter = 0;
  while (true) {
    power_term = drop_small(mul(power_term, minus_eps));
    if (power_term.is_zero()) break;
    sum = add(sum, power_term);
    if (++iter > cap) raise(ErrorCode::not_invertible, "geometric series did not terminate within the iteration cap");
  }
  return scale(shift(sum, -i0), cinv);
}

std::shared_ptr<const ExtensionContext> ExtensionContext::make(const RingPtr& base, std::int64_t m, int f2) {
  const FieldContext& k = base->field();
  if (m < 1) raise(ErrorCode::invalid_argument, "Kummer degree must be positive");
  if (std::gcd<std::int64_t>(m, k.p()) != 1)
    raise(ErrorCode::wild_ramification, "Kummer degree " + std::to_string(m) + " is divisible by p");
  if (!base->default_lift()) raise(ErrorCode::invalid_argument, "extensions require the default Frobenius lift");
  FieldPtr field = base->field_ptr();
  if (f2 != 0 && f2 != k.f()) field = FieldContext::make_extension(k, f2);
  std::shared_ptr<ExtensionContext> ext(new ExtensionContext());
  ext->base_ = base;
  ext->m_ = m;
  ext->inner_ = RingContext::make(field, base->lo() * m, base->hi() * m);
  return ext;
}

RobbaElement ExtensionContext::pullback(const RobbaElement& x) const {
  if (!x.ring()->same_ring(*base_)) raise(ErrorCode::context_mismatch, "element is not in the base ring");
  std::vector<Term> terms;
  terms.reserve(x.terms().size());
  for (const auto& t : x.terms()) terms.push_back(Term{t.index * m_, embed(t.coeff)});
  auto [lo, hi] = scale_known(x.known_lo(), x.known_hi(), m_);
  return RobbaElement::from_terms(inner_, std::move(terms), x.precision(), lo, hi);
}

RobbaElement ExtensionContext::derive_t(const RobbaElement& y) const {
  const FieldContext& k = inner_->field();
  Scalar inv_m = k.from_rational(Rational(1, m_));
  return shift(scale(derive(y), inv_m), 1 - m_);
}

}  // namespace phn
