#include "phinabla/field.hpp"

#include <algorithm>
#include <sstream>

#include "phinabla/errors.hpp"

namespace phn {

namespace {

using Poly = std::vector<std::int64_t>;  // little-endian, coefficients in [0, p)

std::int64_t mod_mul(std::int64_t a, std::int64_t b, std::int64_t m) {
  return static_cast<std::int64_t>(static_cast<__int128>(a) * b % m);
}

std::int64_t mod_norm(std::int64_t a, std::int64_t m) {
  a %= m;
  return a < 0 ? a + m : a;
}

std::int64_t inverse_mod(std::int64_t a, std::int64_t m) {
  std::int64_t old_r = mod_norm(a, m), r = m;
  std::int64_t old_s = 1, s = 0;
  while (r != 0) {
    std::int64_t quot = old_r / r;
    std::int64_t tmp = old_r - quot * r;
    old_r = r;
    r = tmp;
    tmp = old_s - quot * s;
    old_s = s;
    s = tmp;
  }
  if (old_r != 1) raise(ErrorCode::division_by_zero, "element is not invertible modulo " + std::to_string(m));
  return mod_norm(old_s, m);
}

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

Poly poly_mul_fp(const Poly& a, const Poly& b, std::int64_t p) {
  if (a.empty() || b.empty()) return {};
  Poly out(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) out[i + j] = (out[i + j] + mod_mul(a[i], b[j], p)) % p;
  trim(out);
  return out;
}

// Remainder and quotient of a by b over F_p (b nonzero).
std::pair<Poly, Poly> poly_divmod_fp(Poly a, const Poly& b, std::int64_t p) {
  trim(a);
  Poly quot;
  if (a.size() < b.size()) return {quot, a};
  quot.assign(a.size() - b.size() + 1, 0);
  std::int64_t lead_inv = inverse_mod(b.back(), p);
  while (a.size() >= b.size() && !a.empty()) {
    size_t shift = a.size() - b.size();
    std::int64_t c = mod_mul(a.back(), lead_inv, p);
    quot[shift] = c;
    for (size_t j = 0; j < b.size(); ++j) a[shift + j] = mod_norm(a[shift + j] - mod_mul(c, b[j], p), p);
    trim(a);
  }
  trim(quot);
  return {quot, a};
}

Poly poly_mod_fp(const Poly& a, const Poly& m, std::int64_t p) { return poly_divmod_fp(a, m, p).second; }

Poly poly_gcd_fp(Poly a, Poly b, std::int64_t p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = poly_mod_fp(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

Poly poly_powmod_fp(Poly base, std::int64_t e, const Poly& m, std::int64_t p) {
  Poly result{1};
  base = poly_mod_fp(base, m, p);
  while (e > 0) {
    if (e & 1) result = poly_mod_fp(poly_mul_fp(result, base, p), m, p);
    base = poly_mod_fp(poly_mul_fp(base, base, p), m, p);
    e >>= 1;
  }
  return result;
}

// x^(p^k) mod m over F_p.
Poly frobenius_power_of_x(int k, const Poly& m, std::int64_t p) {
  Poly y{0, 1};
  for (int i = 0; i < k; ++i) y = poly_powmod_fp(y, p, m, p);
  return y;
}

std::vector<int> prime_factors(int n) {
  std::vector<int> out;
  for (int d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

// Rabin's irreducibility test for a monic polynomial of degree f over F_p.
bool is_irreducible(const Poly& poly, int f, std::int64_t p) {
  Poly x{0, 1};
  Poly xq = frobenius_power_of_x(f, poly, p);
  Poly diff = xq;
  diff.resize(std::max<size_t>(diff.size(), 2), 0);
  diff[1] = mod_norm(diff[1] - 1, p);
  trim(diff);
  if (!diff.empty()) return false;
  for (int r : prime_factors(f)) {
    Poly h = frobenius_power_of_x(f / r, poly, p);
    h.resize(std::max<size_t>(h.size(), 2), 0);
    h[1] = mod_norm(h[1] - 1, p);
    trim(h);
    Poly g = poly_gcd_fp(h, poly, p);
    if (g.size() != 1) return false;
  }
  return true;
}

Poly poly_inverse_mod_fp(const Poly& a, const Poly& m, std::int64_t p) {
  Poly old_r = m, r = a;
  trim(r);
  Poly old_s{}, s{1};
  while (!r.empty()) {
    auto [quot, rem] = poly_divmod_fp(old_r, r, p);
    old_r = std::move(r);
    r = std::move(rem);
    Poly prod = poly_mul_fp(quot, s, p);
    Poly next(std::max(old_s.size(), prod.size()), 0);
    for (size_t i = 0; i < next.size(); ++i) {
      std::int64_t lhs = i < old_s.size() ? old_s[i] : 0;
      std::int64_t rhs = i < prod.size() ? prod[i] : 0;
      next[i] = mod_norm(lhs - rhs, p);
    }
    trim(next);
    old_s = std::move(s);
    s = std::move(next);
  }
  if (old_r.size() != 1) raise(ErrorCode::division_by_zero, "residue is not invertible");
  std::int64_t c = inverse_mod(old_r[0], p);
  for (auto& x : old_s) x = mod_mul(x, c, p);
  return old_s;
}

std::int64_t int_valuation(std::int64_t x, int p) {
  if (x == 0) return kInfinity;
  std::int64_t v = 0;
  while (x % p == 0) {
    x /= p;
    ++v;
  }
  return v;
}

}  // namespace

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::shared_ptr<const FieldContext> FieldContext::make(int p, int f, int precision) {
  if (!is_prime(p)) raise(ErrorCode::non_prime, std::to_string(p) + " is not prime");
  if (f < 1 || f > kMaxResidueDegree)
    raise(ErrorCode::invalid_argument, "residue degree must lie in [1, 8], got " + std::to_string(f));
  if (precision < 1) raise(ErrorCode::invalid_argument, "precision must be positive");

  std::shared_ptr<FieldContext> ctx(new FieldContext());
  ctx->p_ = p;
  ctx->f_ = f;
  ctx->precision_ = precision;
  ctx->frob_degree_ = f;

  ctx->pow_table_.assign(1, 1);
  for (int k = 1; k <= precision; ++k) {
    std::int64_t prev = ctx->pow_table_.back();
    if (prev > (std::int64_t{1} << 62) / p)
      raise(ErrorCode::invalid_argument, "p^N does not fit the 62-bit working modulus");
    ctx->pow_table_.push_back(prev * p);
  }
  std::int64_t q = 1;
  for (int i = 0; i < f; ++i) {
    if (q > (std::int64_t{1} << 62) / p) raise(ErrorCode::invalid_argument, "q = p^f overflows");
    q *= p;
  }
  ctx->q_ = q;

  if (f > 1) {
    // Deterministic search: monic candidates ordered by their base-p code.
    Poly candidate(f + 1, 0);
    candidate[f] = 1;
    bool found = false;
    for (std::int64_t code = 1; code < q && !found; ++code) {
      std::int64_t c = code;
      for (int i = 0; i < f; ++i) {
        candidate[i] = c % p;
        c /= p;
      }
      if (candidate[0] == 0) continue;
      if (is_irreducible(candidate, f, p)) found = true;
    }
    if (!found) raise(ErrorCode::no_irreducible_polynomial, "no irreducible polynomial of degree " + std::to_string(f));
    ctx->residue_poly_ = candidate;
  }
  return ctx;
}

std::shared_ptr<const FieldContext> FieldContext::make_extension(const FieldContext& base, int f2) {
  if (f2 < base.f() || f2 % base.f() != 0)
    raise(ErrorCode::invalid_argument, "extension degree must be a multiple of the base residue degree");
  auto plain = make(base.p(), f2, base.precision());
  std::shared_ptr<FieldContext> ctx(new FieldContext(*plain));
  ctx->frob_degree_ = base.frob_degree_;
  ctx->q_ = base.q_;
  ctx->base_f_ = base.f();
  const std::int64_t p = ctx->p_;
  const std::int64_t top = ctx->prime_power(ctx->precision_);

  auto digits_from = [&](const Poly& poly) {
    Digits d{};
    for (size_t i = 0; i < poly.size() && i < static_cast<size_t>(kMaxResidueDegree); ++i) d[i] = poly[i];
    return d;
  };
  auto eval_poly = [&](const std::vector<std::int64_t>& coeffs, const Digits& at, std::int64_t modulus) {
    Digits acc{};
    for (size_t i = coeffs.size(); i-- > 0;) {
      acc = ctx->poly_mul(acc, at, modulus);
      acc[0] = mod_norm(acc[0] + coeffs[i], modulus);
    }
    return acc;
  };
  auto derivative = [](const std::vector<std::int64_t>& coeffs) {
    std::vector<std::int64_t> out;
    for (size_t i = 1; i < coeffs.size(); ++i) out.push_back(coeffs[i] * static_cast<std::int64_t>(i));
    return out;
  };
  // Newton iteration towards the simple root of `coeffs` congruent to `root` mod p.
  auto hensel = [&](const std::vector<std::int64_t>& coeffs, Digits root) {
    auto dcoeffs = derivative(coeffs);
    for (int it = 0; it < ctx->precision_ + 1; ++it) {
      Digits value = eval_poly(coeffs, root, top);
      Digits slope = eval_poly(dcoeffs, root, top);
      Digits step = ctx->poly_mul(value, ctx->unit_inverse(slope, ctx->precision_), top);
      for (int i = 0; i < ctx->f_; ++i) root[i] = mod_norm(root[i] - step[i], top);
    }
    return root;
  };

  if (f2 > 1) {
    Poly modulus(ctx->residue_poly_.begin(), ctx->residue_poly_.end());
    Poly r0 = frobenius_power_of_x(ctx->frob_degree_, modulus, p);
    Digits root = hensel(ctx->residue_poly_, digits_from(r0));
    ctx->frob_powers_.clear();
    Digits power{};
    power[0] = 1;
    for (int j = 0; j < f2; ++j) {
      ctx->frob_powers_.push_back(power);
      power = ctx->poly_mul(power, root, top);
    }
  }

  if (base.f() == 1) {
    Digits one{};
    one[0] = 1;
    ctx->base_image_ = {one};
  } else {
    std::int64_t count = 1;
    for (int i = 0; i < f2; ++i) count *= p;
    if (count > (std::int64_t{1} << 22))
      raise(ErrorCode::invalid_argument, "residue field too large for the embedding search");
    Digits found{};
    bool ok = false;
    for (std::int64_t code = 0; code < count && !ok; ++code) {
      Digits cand{};
      std::int64_t c = code;
      for (int i = 0; i < f2; ++i) {
        cand[i] = c % p;
        c /= p;
      }
      Digits value = eval_poly(base.residue_poly_, cand, p);
      if (std::all_of(value.begin(), value.end(), [](std::int64_t x) { return x == 0; })) {
        found = cand;
        ok = true;
      }
    }
    if (!ok) raise(ErrorCode::internal, "base residue polynomial has no root in the extension");
    Digits root = hensel(base.residue_poly_, found);
    Digits power{};
    power[0] = 1;
    for (int j = 0; j < base.f(); ++j) {
      ctx->base_image_.push_back(power);
      power = ctx->poly_mul(power, root, top);
    }
  }
  return ctx;
}

std::int64_t FieldContext::prime_power(int k) const {
  if (k < 0 || k >= static_cast<int>(pow_table_.size()))
    raise(ErrorCode::internal, "prime power index out of range: " + std::to_string(k));
  return pow_table_[static_cast<size_t>(k)];
}

bool FieldContext::same_field(const FieldContext& other) const noexcept {
  return p_ == other.p_ && f_ == other.f_ && precision_ == other.precision_ &&
         frob_degree_ == other.frob_degree_ && residue_poly_ == other.residue_poly_;
}

Digits FieldContext::poly_mul(const Digits& a, const Digits& b, std::int64_t modulus) const {
  Digits out{};
  if (f_ == 1) {
    out[0] = mod_mul(a[0], b[0], modulus);
    return out;
  }
  std::array<std::int64_t, 2 * kMaxResidueDegree> full{};
  for (int i = 0; i < f_; ++i) {
    if (a[i] == 0) continue;
    for (int j = 0; j < f_; ++j) full[i + j] = (full[i + j] + mod_mul(a[i], b[j], modulus)) % modulus;
  }
  for (int k = 2 * f_ - 2; k >= f_; --k) {
    std::int64_t c = full[k];
    if (c == 0) continue;
    full[k] = 0;
    for (int j = 0; j < f_; ++j)
      full[k - f_ + j] = mod_norm(full[k - f_ + j] - mod_mul(c, residue_poly_[j], modulus), modulus);
  }
  for (int i = 0; i < f_; ++i) out[i] = full[i];
  return out;
}

Digits FieldContext::evaluate(const Digits& coeffs, const std::vector<Digits>& powers, std::int64_t modulus) const {
  Digits out{};
  for (size_t j = 0; j < powers.size(); ++j) {
    if (coeffs[j] == 0) continue;
    for (int i = 0; i < f_; ++i) out[i] = (out[i] + mod_mul(coeffs[j], mod_norm(powers[j][i], modulus), modulus)) % modulus;
  }
  return out;
}

std::int64_t FieldContext::digits_valuation(const Digits& d) const {
  std::int64_t v = kInfinity;
  for (int i = 0; i < f_; ++i) v = std::min(v, int_valuation(d[i], p_));
  return v;
}

Digits FieldContext::unit_inverse(const Digits& a, int rel) const {
  Digits y{};
  if (f_ == 1) {
    y[0] = inverse_mod(a[0] % p_, p_);
  } else {
    Poly residue(static_cast<size_t>(f_));
    for (int i = 0; i < f_; ++i) residue[i] = mod_norm(a[i], p_);
    trim(residue);
    Poly modulus(residue_poly_.begin(), residue_poly_.end());
    Poly inv = poly_inverse_mod_fp(residue, modulus, p_);
    for (size_t i = 0; i < inv.size(); ++i) y[i] = inv[i];
  }
  int have = 1;
  while (have < rel) {
    have = std::min(2 * have, rel);
    std::int64_t m = prime_power(have);
    Digits ay = poly_mul(a, y, m);
    Digits two_minus{};
    for (int i = 0; i < f_; ++i) two_minus[i] = mod_norm(-ay[i], m);
    two_minus[0] = mod_norm(two_minus[0] + 2, m);
    y = poly_mul(y, two_minus, m);
  }
  std::int64_t m = prime_power(rel);
  for (int i = 0; i < f_; ++i) y[i] = mod_norm(y[i], m);
  return y;
}

Scalar FieldContext::from_digits(const Digits& digits, int rel, std::int64_t shift) const {
  if (rel <= 0) return inexact_zero(shift + std::max(rel, 0));
  rel = std::min(rel, precision_);
  std::int64_t m = prime_power(rel);
  Digits d{};
  for (int i = 0; i < f_; ++i) d[i] = mod_norm(digits[i], m);
  std::int64_t w = digits_valuation(d);
  if (w >= rel) return inexact_zero(shift + rel);
  Scalar out;
  out.kind_ = Scalar::Kind::nonzero;
  out.val_ = shift + w;
  out.rel_ = rel - static_cast<int>(w);
  std::int64_t div = prime_power(static_cast<int>(w));
  std::int64_t m2 = prime_power(out.rel_);
  for (int i = 0; i < f_; ++i) out.unit_[i] = (d[i] / div) % m2;
  return out;
}

Scalar FieldContext::normalize(Digits digits, std::int64_t val, std::int64_t abs_prec) const {
  return from_digits(digits, static_cast<int>(std::min<std::int64_t>(abs_prec - val, precision_)), val);
}

Scalar FieldContext::from_int(std::int64_t value) const {
  if (value == 0) return Scalar{};
  std::int64_t v = 0;
  while (value % p_ == 0) {
    value /= p_;
    ++v;
  }
  Scalar out;
  out.kind_ = Scalar::Kind::nonzero;
  out.val_ = v;
  out.rel_ = precision_;
  out.unit_[0] = mod_norm(value, prime_power(precision_));
  return out;
}

Scalar FieldContext::from_rational(const Rational& value) const {
  return mul(from_int(value.numerator()), inv(from_int(value.denominator())));
}

Scalar FieldContext::pi_power(std::int64_t exponent) const {
  Scalar out;
  out.kind_ = Scalar::Kind::nonzero;
  out.val_ = exponent;
  out.rel_ = precision_;
  out.unit_[0] = 1;
  return out;
}

Scalar FieldContext::inexact_zero(std::int64_t bound) const {
  Scalar out;
  out.kind_ = Scalar::Kind::inexact_zero;
  out.val_ = bound;
  out.rel_ = 0;
  return out;
}

Scalar FieldContext::from_parts(std::int64_t val, std::span<const std::int64_t> unit, int rel) const {
  if (rel < 1 || rel > precision_) raise(ErrorCode::parse_error, "relative precision out of range");
  if (unit.size() > static_cast<size_t>(f_)) raise(ErrorCode::parse_error, "unit has more digits than the residue degree");
  Digits d{};
  std::int64_t m = prime_power(rel);
  for (size_t i = 0; i < unit.size(); ++i) d[i] = mod_norm(unit[i], m);
  if (digits_valuation(d) != 0) raise(ErrorCode::parse_error, "unit part is divisible by p");
  Scalar out;
  out.kind_ = Scalar::Kind::nonzero;
  out.val_ = val;
  out.rel_ = rel;
  out.unit_ = d;
  return out;
}

Scalar FieldContext::add(const Scalar& a, const Scalar& b) const {
  if (a.is_exact_zero()) return b;
  if (b.is_exact_zero()) return a;
  const std::int64_t cap = std::min(a.absolute_precision(), b.absolute_precision());
  if (!a.is_nonzero() && !b.is_nonzero()) return inexact_zero(cap);
  if (!a.is_nonzero()) return truncate(b, cap);
  if (!b.is_nonzero()) return truncate(a, cap);
  const std::int64_t m = std::min(a.val_, b.val_);
  const std::int64_t k = cap - m;
  if (k <= 0) return inexact_zero(cap);
  const std::int64_t modulus = prime_power(static_cast<int>(k));
  Digits sum{};
  for (const Scalar* s : {&a, &b}) {
    std::int64_t shift = s->val_ - m;
    if (shift >= k) continue;
    std::int64_t scale = prime_power(static_cast<int>(shift));
    for (int i = 0; i < f_; ++i) sum[i] = (sum[i] + mod_mul(s->unit_[i], scale, modulus)) % modulus;
  }
  return from_digits(sum, static_cast<int>(k), m);
}

Scalar FieldContext::neg(const Scalar& a) const {
  if (!a.is_nonzero()) return a;
  Scalar out = a;
  std::int64_t m = prime_power(a.rel_);
  for (int i = 0; i < f_; ++i) out.unit_[i] = mod_norm(-a.unit_[i], m);
  return out;
}

Scalar FieldContext::sub(const Scalar& a, const Scalar& b) const { return add(a, neg(b)); }

Scalar FieldContext::mul(const Scalar& a, const Scalar& b) const {
  if (a.is_exact_zero() || b.is_exact_zero()) return Scalar{};
  if (!a.is_nonzero() || !b.is_nonzero()) return inexact_zero(a.val_ + b.val_);
  Scalar out;
  out.kind_ = Scalar::Kind::nonzero;
  out.val_ = a.val_ + b.val_;
  out.rel_ = std::min(a.rel_, b.rel_);
  out.unit_ = poly_mul(a.unit_, b.unit_, prime_power(out.rel_));
  return out;
}

Scalar FieldContext::mul_int(const Scalar& a, std::int64_t k) const { return mul(a, from_int(k)); }

Scalar FieldContext::inv(const Scalar& a) const {
  if (!a.is_nonzero()) raise(ErrorCode::division_by_zero, "inverse of zero");
  Scalar out;
  out.kind_ = Scalar::Kind::nonzero;
  out.val_ = -a.val_;
  out.rel_ = a.rel_;
  out.unit_ = unit_inverse(a.unit_, a.rel_);
  return out;
}

Scalar FieldContext::truncate(const Scalar& a, std::int64_t abs_prec) const {
  if (a.is_exact_zero()) return inexact_zero(abs_prec);
  if (!a.is_nonzero()) return inexact_zero(std::min(a.val_, abs_prec));
  if (abs_prec >= a.absolute_precision()) return a;
  return normalize(a.unit_, a.val_, abs_prec);
}

bool FieldContext::equal_at(const Scalar& a, const Scalar& b, std::int64_t prec) const {
  Scalar d = sub(a, b);
  return d.is_zero() ? d.valuation() >= prec || d.is_exact_zero() : d.valuation() >= prec;
}

Scalar FieldContext::frobenius(const Scalar& a) const {
  if (frobenius_is_identity() || !a.is_nonzero()) return a;
  Scalar out = a;
  out.unit_ = evaluate(a.unit_, frob_powers_, prime_power(a.rel_));
  return out;
}

Scalar FieldContext::embed_from_base(const Scalar& a) const {
  if (!is_extension() || !a.is_nonzero()) return a;
  Scalar out = a;
  out.unit_ = evaluate(a.unit_, base_image_, prime_power(a.rel_));
  return out;
}

std::string FieldContext::to_string(const Scalar& a) const {
  std::ostringstream os;
  if (a.is_exact_zero()) return "0";
  if (!a.is_nonzero()) {
    os << "O(" << p_ << "^" << a.valuation() << ")";
    return os.str();
  }
  os << p_ << "^" << a.valuation() << "*";
  if (f_ == 1) {
    os << a.unit()[0];
  } else {
    os << "[";
    for (int i = 0; i < f_; ++i) os << (i ? "," : "") << a.unit()[i];
    os << "]";
  }
  os << "+O(" << p_ << "^" << a.absolute_precision() << ")";
  return os.str();
}

}  // namespace phn
