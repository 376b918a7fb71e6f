#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "phinabla/matrix.hpp"
#include "phinabla/rational.hpp"
#include "phinabla/verdict.hpp"

namespace phn {

// A phi^frob_power-module with Frobenius matrix A, optionally carrying a
// connection matrix N (a (phi, nabla)-module). Conventions: Phi(e_j) = sum_i
// A_ij e_i and nabla(e_j) = sum_i N_ij e_i.
struct Module {
  Matrix A;
  std::optional<Matrix> N;
  std::int64_t frob_power = 1;

  std::size_t dim() const noexcept { return A.rows(); }
  const RingPtr& ring() const noexcept { return A.ring(); }
};

// Validates shapes; the module is not checked for gauge compatibility.
Module make_module(Matrix A, std::optional<Matrix> N = std::nullopt, std::int64_t frob_power = 1);

// mu_n A phi^n(N) - d(A) - N A, which vanishes exactly for compatible pairs.
Matrix gauge_residual(const Module& m);
// Matrix form and operator form (Theta Phi v = mu Phi Theta v on sample vectors).
Check gauge_matrix_check(const Module& m);
Check gauge_operator_check(const Module& m);
Report gauge_compat_check(const Module& m);

Module tensor(const Module& a, const Module& b);
Module dual(const Module& m);
Module exterior_power(const Module& m, std::size_t k);
Module direct_sum(const Module& a, const Module& b);
Module pushforward(const Module& m, std::int64_t n);
Module twist(const Module& m, std::int64_t s);
// New basis e U: A -> U^{-1} A phi(U), N -> U^{-1} N U + U^{-1} dU.
Module base_change(const Module& m, const Matrix& U);

// 1-Gauss valuation of det(A).
Rational det_valuation(const Module& m);
Report unit_root_check(const Module& m);
Report purity_check(const Module& m, std::int64_t s, std::int64_t r);

struct SlopeBlock {
  std::int64_t rank = 0;
  Rational slope;
};

struct SlopeCertificate {
  Matrix U;
  std::vector<SlopeBlock> blocks;
};

std::vector<std::size_t> block_sizes(const SlopeCertificate& c);
Report verify_slope_certificate(const Module& m, const SlopeCertificate& c);

// Cumulative (rank, rank * slope) vertices starting at the origin.
std::vector<std::pair<std::int64_t, Rational>> newton_polygon(const std::vector<SlopeBlock>& blocks);
std::string newton_polygon_tsv(const std::vector<std::pair<std::int64_t, Rational>>& points);
std::string newton_polygon_svg(const std::vector<std::pair<std::int64_t, Rational>>& points);

enum class HomProbe { only_zero, nonzero_found, window_inconclusive };
const char* hom_probe_name(HomProbe h) noexcept;
// Solutions x of phi(x) = pi^{a-b} x over the window, via the Smith form of the
// coefficient system over O_K / pi^N.
HomProbe rank1_hom_probe(const RingPtr& ring, std::int64_t a, std::int64_t b);
// Exponents of the elementary divisors of an integer matrix over Z/p^N (N for zero divisors).
std::vector<std::int64_t> smith_exponents(std::vector<std::vector<std::int64_t>> rows, std::int64_t p, int n);

}  // namespace phn
