#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phinabla/matrix.hpp"
#include "phinabla/phimod.hpp"
#include "phinabla/robba.hpp"
#include "phinabla/verdict.hpp"

namespace phn {

enum class GroupKind { GL, SL, Sp, SO };

const char* group_kind_name(GroupKind k) noexcept;
GroupKind parse_group_kind(const std::string& name);

// A classical group given by its defining equations. The bilinear form of Sp
// and SO has integer entries, so it makes sense over every ring.
struct GroupDescriptor {
  GroupKind kind = GroupKind::GL;
  std::size_t size = 0;
  std::vector<std::vector<std::int64_t>> form;

  Matrix form_matrix(const RingPtr& ring) const;
};

// Default forms: J = [[0, I], [-I, 0]] for Sp, the antidiagonal form for SO.
GroupDescriptor make_group(GroupKind kind, std::size_t size,
                           std::optional<std::vector<std::vector<std::int64_t>>> form = std::nullopt);

// (g, X) in G(R) x Lie(G)_R; frob_power > 1 after pushforward.
struct GPair {
  GroupDescriptor group;
  Matrix g;
  Matrix X;
  std::int64_t frob_power = 1;
};

Check group_membership(const Matrix& g, const GroupDescriptor& d);
Check lie_membership(const Matrix& X, const GroupDescriptor& d);

// d(g) g^{-1}.
Matrix dlog(const Matrix& g);
// g X g^{-1}.
Matrix adjoint(const Matrix& g, const Matrix& X);
// Gamma_x(X) = x X x^{-1} - d(x) x^{-1}.
Matrix gauge(const Matrix& x, const Matrix& X);

// Membership plus X = Gamma_g(mu phi(X)), checked as mu g phi(X) - dg - X g = 0.
Report bphinabla_check(const GPair& p);
// (x g phi(x^{-1}), Gamma_x(X)); throws invalid_argument when x is not in G.
GPair morphism_apply(const Matrix& x, const GPair& p);

struct PushforwardPair {
  GPair pair;
  Check identity;
};
// ([n]_* g, X), with X + dlog(G) = mu(phi^n) Ad(G)(phi^n X) verified as
// mu_n G phi^n(X) - dG - X G = 0.
PushforwardPair pushforward_pair(const GPair& p, std::int64_t n);

struct Cocharacter {
  std::vector<std::int64_t> exponents;
  std::int64_t denominator = 1;
  std::vector<std::size_t> block_sizes;
};

Cocharacter cocharacter_from_blocks(const std::vector<SlopeBlock>& blocks);

// Entry (i, j) scales by t^{sign (k_i - k_j)} under conjugation by the
// cocharacter; P keeps exponents >= 0, Z exactly 0, U > 0. With sign = -1 and
// increasing slopes, U is the strictly block-upper pattern.
struct Patterns {
  std::size_t n = 0;
  std::vector<std::int64_t> scaling;  // row-major n x n

  std::int64_t exponent(std::size_t i, std::size_t j) const { return scaling[i * n + j]; }
  bool in_P(std::size_t i, std::size_t j) const { return exponent(i, j) >= 0; }
  bool in_Z(std::size_t i, std::size_t j) const { return exponent(i, j) == 0; }
  bool in_U(std::size_t i, std::size_t j) const { return exponent(i, j) > 0; }
};

Patterns parabolic_patterns(const Cocharacter& lambda, int sign);

enum class PatternKind { P, Z, U };
// Entries of `a` outside the chosen pattern must vanish.
Check pattern_check(std::string name, const Matrix& a, const Patterns& pat, PatternKind kind);

// Z - u Z u^{-1} supported in the U pattern, for Z in the Z pattern and u - I in the U pattern.
Check lieU_conjugation_probe(const Matrix& Z, const Matrix& u, const Patterns& pat);

struct BlockReduction {
  GPair adapted;
  Matrix z;
  Matrix X0;
  Cocharacter lambda;
  Report report;
};

// Transports P to the certificate basis, checks the parabolic shape and the
// reduction identity X0 = Gamma_z(mu phi(X0)). Throws pattern_violation when the
// blocks do not fit.
BlockReduction block_reduce(const GPair& p, const SlopeCertificate& c);

// lambda(pi^{-1}) [d]_*(z) must be unit-root and phi^d-compatible with X0.
Report unit_root_reduce(const Matrix& z, const Matrix& X0, const Cocharacter& lambda, std::int64_t frob_power = 1);

// Gamma_b(X) over the extension ring must lie in Lie(U(-lambda)).
Report monodromy_certificate_check(const GPair& p, const Cocharacter& lambda, const Matrix& b,
                                   const ExtensionContext& ext);
// b g phi(b^{-1}) over the extension ring.
Matrix transformed_frobenius(const GPair& p, const Matrix& b, const ExtensionContext& ext);
Matrix gauge_over_extension(const Matrix& b, const Matrix& X_pulled, const ExtensionContext& ext);
Matrix pullback(const Matrix& a, const ExtensionContext& ext);

}  // namespace phn
