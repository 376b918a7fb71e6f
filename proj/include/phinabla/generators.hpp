#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "phinabla/gstruct.hpp"
#include "phinabla/phimod.hpp"

namespace phn {

// Companion matrix of x^r - pi^s: A^r = pi^s I. With `unimodular_sign` the corner
// entry carries (-1)^{r-1}, so that det A = pi^s exactly.
Matrix companion(const RingPtr& ring, std::int64_t s, std::int64_t r, bool unimodular_sign = false);

// standard(s, r) with zero connection.
Module standard_module(const RingPtr& ring, std::int64_t s, std::int64_t r, bool unimodular_sign = false);

// One block of a split seed: t^e Std(s, r) with connection (a/m) t^{-1} I_r, where
// e = (q-1) a / m must be an integer.
struct BlockSpec {
  std::int64_t s = 0;
  std::int64_t r = 1;
  std::int64_t a = 0;
  std::int64_t m = 1;
};

Module kummer_block(const RingPtr& ring, const BlockSpec& spec, bool unimodular_sign = false);
// Rank-one Kummer seed A = t^{(q-1)a/m}, N = (a/m) t^{-1}.
Module kummer_module(const RingPtr& ring, std::int64_t a, std::int64_t m);
// The rank-one seed embedded in SL(2): (diag(A, A^{-1}), diag(N, -N)).
GPair kummer_sl2_pair(const RingPtr& ring, std::int64_t a, std::int64_t m);
// diag(u^a, u^{-a}) over the Kummer extension t = u^m.
Matrix kummer_witness(const ExtensionContext& ext, std::int64_t a);

struct Seed {
  Module module;
  SlopeCertificate certificate;
};

// Direct sum of blocks; the blocks must be listed by strictly increasing slope s/r.
Seed split_seed(const RingPtr& ring, const std::vector<BlockSpec>& blocks, bool unimodular_sign = false);

// L * V with L constant lower unitriangular and V upper unitriangular with Laurent
// entries of degree in [-degree, degree]; its determinant is exactly 1.
Matrix random_unipotent(const RingPtr& ring, std::size_t d, std::mt19937_64& rng, std::int64_t degree = 1);
// I + (random entries in the strictly block-upper pattern).
Matrix random_block_unipotent(const RingPtr& ring, const std::vector<std::size_t>& sizes, std::mt19937_64& rng,
                              std::int64_t degree = 1);
RobbaElement random_element(const RingPtr& ring, std::mt19937_64& rng, std::int64_t lo, std::int64_t hi,
                            std::size_t terms, std::int64_t min_valuation = 0);

// Expresses the seed in the basis e V^{-1}; the certificate basis becomes V.
Seed scramble(const Seed& seed, const Matrix& V);

GPair pair_from_module(const Module& m, const GroupDescriptor& group);

}  // namespace phn
