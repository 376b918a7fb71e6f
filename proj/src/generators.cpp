#include "phinabla/generators.hpp"

#include <numeric>

#include "phinabla/errors.hpp"

namespace phn {

namespace {

std::int64_t kummer_exponent(const RingPtr& ring, std::int64_t a, std::int64_t m) {
  if (m < 1) raise(ErrorCode::invalid_argument, "Kummer degree must be positive");
  const std::int64_t num = (ring->q() - 1) * a;
  if (num % m != 0) raise(ErrorCode::invalid_argument, "m must divide (q-1) a");
  return num / m;
}

std::int64_t draw(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

}  // namespace

Matrix companion(const RingPtr& ring, std::int64_t s, std::int64_t r, bool unimodular_sign) {
  if (r < 1) raise(ErrorCode::rank_error, "standard module rank must be positive");
  const FieldContext& k = ring->field();
  const auto n = static_cast<std::size_t>(r);
  Matrix A(ring, n, n);
  for (std::size_t i = 0; i + 1 < n; ++i) A(i + 1, i) = RobbaElement::one(ring);
  Scalar corner = k.pi_power(s);
  if (unimodular_sign && (r - 1) % 2 == 1) corner = k.neg(corner);
  A(0, n - 1) = RobbaElement::constant(ring, corner);
  return A;
}

Module standard_module(const RingPtr& ring, std::int64_t s, std::int64_t r, bool unimodular_sign) {
  Matrix A = companion(ring, s, r, unimodular_sign);
  return make_module(A, Matrix(ring, A.rows(), A.cols()));
}

Module kummer_block(const RingPtr& ring, const BlockSpec& spec, bool unimodular_sign) {
  const std::int64_t e = kummer_exponent(ring, spec.a, spec.m);
  const FieldContext& k = ring->field();
  Matrix A = companion(ring, spec.s, spec.r, unimodular_sign);
  if (e != 0) A = scale(A, RobbaElement::monomial(ring, k.one(), e));
  Matrix N(ring, A.rows(), A.cols());
  if (spec.a != 0) {
    RobbaElement c = RobbaElement::monomial(ring, k.from_rational(Rational(spec.a, spec.m)), -1);
    for (std::size_t i = 0; i < N.rows(); ++i) N(i, i) = c;
  }
  return make_module(std::move(A), std::move(N));
}

Module kummer_module(const RingPtr& ring, std::int64_t a, std::int64_t m) {
  return kummer_block(ring, BlockSpec{0, 1, a, m});
}

GPair kummer_sl2_pair(const RingPtr& ring, std::int64_t a, std::int64_t m) {
  const Module up = kummer_module(ring, a, m);
  const Module down = kummer_module(ring, -a, m);
  return GPair{make_group(GroupKind::SL, 2), block_diagonal({up.A, down.A}), block_diagonal({*up.N, *down.N}), 1};
}

Matrix kummer_witness(const ExtensionContext& ext, std::int64_t a) {
  const RingPtr& ring = ext.inner();
  const Scalar one = ring->field().one();
  return Matrix::diagonal(ring, {RobbaElement::monomial(ring, one, a), RobbaElement::monomial(ring, one, -a)});
}

Seed split_seed(const RingPtr& ring, const std::vector<BlockSpec>& blocks, bool unimodular_sign) {
  if (blocks.empty()) raise(ErrorCode::invalid_argument, "split seed needs at least one block");
  std::vector<Matrix> As, Ns;
  SlopeCertificate cert;
  for (const auto& spec : blocks) {
    Module b = kummer_block(ring, spec, unimodular_sign);
    As.push_back(b.A);
    Ns.push_back(*b.N);
    Rational slope(spec.s, spec.r);
    if (!cert.blocks.empty() && !(cert.blocks.back().slope < slope))
      raise(ErrorCode::invalid_argument, "split seed blocks must have strictly increasing slopes");
    cert.blocks.push_back(SlopeBlock{spec.r, slope});
  }
  Module m = make_module(block_diagonal(As), block_diagonal(Ns));
  cert.U = Matrix::identity(ring, m.dim());
  return Seed{std::move(m), std::move(cert)};
}

RobbaElement random_element(const RingPtr& ring, std::mt19937_64& rng, std::int64_t lo, std::int64_t hi,
                            std::size_t terms, std::int64_t min_valuation) {
  const FieldContext& k = ring->field();
  std::vector<Term> ts;
  for (std::size_t i = 0; i < terms; ++i) {
    std::int64_t c = draw(rng, -4, 4);
    if (c == 0) continue;
    Scalar coeff = k.mul(k.from_int(c), k.pi_power(min_valuation + draw(rng, 0, 1)));
    ts.push_back(Term{draw(rng, lo, hi), coeff});
  }
  return RobbaElement::from_terms(ring, std::move(ts));
}

Matrix random_unipotent(const RingPtr& ring, std::size_t d, std::mt19937_64& rng, std::int64_t degree) {
  Matrix L = Matrix::identity(ring, d);
  Matrix V = Matrix::identity(ring, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (i > j) L(i, j) = RobbaElement::from_int(ring, draw(rng, -1, 1));
      if (i < j) V(i, j) = random_element(ring, rng, -degree, degree, 2);
    }
  }
  return mul(L, V);
}

Matrix random_block_unipotent(const RingPtr& ring, const std::vector<std::size_t>& sizes, std::mt19937_64& rng,
                              std::int64_t degree) {
  std::vector<std::size_t> blk;
  for (std::size_t b = 0; b < sizes.size(); ++b) blk.insert(blk.end(), sizes[b], b);
  Matrix u = Matrix::identity(ring, blk.size());
  for (std::size_t i = 0; i < blk.size(); ++i)
    for (std::size_t j = 0; j < blk.size(); ++j)
      if (blk[i] < blk[j]) u(i, j) = random_element(ring, rng, -degree, degree, 2);
  return u;
}

Seed scramble(const Seed& seed, const Matrix& V) {
  Matrix Vinv = inverse(V);
  Seed out{base_change(seed.module, Vinv), seed.certificate};
  out.certificate.U = mul(V, seed.certificate.U);
  return out;
}

GPair pair_from_module(const Module& m, const GroupDescriptor& group) {
  if (m.dim() != group.size) raise(ErrorCode::rank_error, "module rank does not match the group");
  Matrix X = m.N ? *m.N : Matrix(m.ring(), m.dim(), m.dim());
  return GPair{group, m.A, std::move(X), m.frob_power};
}

}  // namespace phn
