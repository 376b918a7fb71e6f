#pragma once

// Bridges between library values and the oracle representations.

#include <random>

#include "oracle.hpp"
#include "phinabla/generators.hpp"
#include "phinabla/robba.hpp"

namespace support {

using namespace phn;

// An integral scalar of a prime field as an integer modulo M = p^k, k <= N.
inline std::int64_t to_int(const FieldContext& k, const Scalar& s, std::int64_t M) {
  if (!s.is_nonzero()) return 0;
  oracle::i128 v = s.unit()[0];
  for (std::int64_t i = 0; i < s.valuation(); ++i) v = v * k.p() % M;
  return oracle::mod(v, M);
}

inline oracle::Poly to_poly(const RobbaElement& x, std::int64_t M) {
  oracle::Poly out{M, {}};
  for (const auto& t : x.terms()) out.set(t.index, to_int(x.ring()->field(), t.coeff, M));
  return out;
}

inline RobbaElement from_poly(const RingPtr& ring, const oracle::Poly& p) {
  std::vector<Term> terms;
  for (auto [i, v] : p.c) terms.push_back(Term{i, ring->field().from_int(v)});
  return RobbaElement::from_terms(ring, terms);
}

// Integral element with `count` terms in [lo, hi] and small integer coefficients.
inline RobbaElement random_integral(const RingPtr& ring, std::mt19937_64& rng, std::int64_t lo, std::int64_t hi,
                                    int count) {
  std::uniform_int_distribution<std::int64_t> idx(lo, hi), coef(-20, 20);
  std::vector<Term> terms;
  for (int i = 0; i < count; ++i) terms.push_back(Term{idx(rng), ring->field().from_int(coef(rng))});
  return RobbaElement::from_terms(ring, terms);
}

inline RingPtr ring(int p, int N, std::int64_t lo, std::int64_t hi, int f = 1) {
  return RingContext::make(FieldContext::make(p, f, N), lo, hi);
}

inline RobbaElement mono(const RingPtr& r, std::int64_t c, std::int64_t i) { return RobbaElement::from_int(r, c, i); }

inline RobbaElement poly(const RingPtr& r, std::initializer_list<std::pair<std::int64_t, std::int64_t>> terms) {
  std::vector<Term> ts;
  for (auto [i, c] : terms) ts.push_back(Term{i, r->field().from_int(c)});
  return RobbaElement::from_terms(r, ts);
}

inline Matrix int_matrix(const RingPtr& r, std::initializer_list<std::initializer_list<std::int64_t>> rows) {
  Matrix m(r, rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& row : rows) {
    std::size_t j = 0;
    for (auto v : row) m(i, j++) = RobbaElement::from_int(r, v);
    ++i;
  }
  return m;
}

// Both elements agree exactly: same coefficients, as balls, up to precision.
inline bool same(const RobbaElement& a, const RobbaElement& b) { return sub(a, b).is_zero(); }

inline bool same(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (!same(a(i, j), b(i, j))) return false;
  return true;
}

}  // namespace support
