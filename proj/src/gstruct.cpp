#include "phinabla/gstruct.hpp"

#include <algorithm>
#include <numeric>

#include "phinabla/errors.hpp"
#include "phinabla/filtration.hpp"

namespace phn {

namespace {

Check worst_of(Check a, const Check& b) {
  if (static_cast<int>(b.status) > static_cast<int>(a.status)) {
    Check out = b;
    out.name = a.name;
    out.window_loss = a.window_loss || b.window_loss;
    return out;
  }
  a.window_loss = a.window_loss || b.window_loss;
  a.precision = std::min(a.precision, b.precision);
  return a;
}

Rational rational_det(std::vector<std::vector<Rational>> m) {
  const std::size_t n = m.size();
  Rational d = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && m[piv][c] == Rational(0)) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      std::swap(m[piv], m[c]);
      d = -d;
    }
    d *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      Rational f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return d;
}

Check det_one_check(const std::string& name, const RobbaElement& d, int n) {
  RobbaElement one = RobbaElement::one(d.ring());
  return residual_check(name, sub(d, one), std::min<std::int64_t>(d.min_valuation(), 0), n);
}

Check form_check(const std::string& name, const Matrix& g, const Matrix& form, int n) {
  Matrix lhs = mul(mul(transpose(g), form), g);
  std::int64_t s = std::min(lhs.min_valuation(), form.min_valuation());
  return residual_check(name, sub(lhs, form), s, n);
}

// Gamma_x(X) with both x and x^{-1} supplied, and an explicit derivation.
template <typename Derive>
Matrix gauge_with(const Matrix& x, const Matrix& xinv, const Matrix& X, Derive&& d) {
  return sub(mul(mul(x, X), xinv), mul(d(x), xinv));
}

Matrix derive_t_matrix(const Matrix& a, const ExtensionContext& ext) {
  Matrix out(a.ring(), a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = ext.derive_t(a(i, j));
  return out;
}

Check identity_check(const std::string& name, const Matrix& g, const Matrix& X, std::int64_t n_frob, int n) {
  const RobbaElement mu = mu_factor(g.ring(), n_frob);
  Matrix lhs = scale(mul(g, frobenius(X, n_frob)), mu);
  Matrix dg = derive(g);
  Matrix Xg = mul(X, g);
  std::int64_t s = std::min({lhs.min_valuation(), dg.min_valuation(), Xg.min_valuation()});
  return residual_check(name, sub(sub(lhs, dg), Xg), s, n);
}

GPair apply_with_inverse(const Matrix& x, const Matrix& xinv, const GPair& p) {
  GPair out = p;
  out.g = mul(mul(x, p.g), frobenius(xinv, p.frob_power));
  out.X = gauge_with(x, xinv, p.X, [](const Matrix& m) { return derive(m); });
  return out;
}

}  // namespace

const char* group_kind_name(GroupKind k) noexcept {
  switch (k) {
    case GroupKind::GL: return "GL";
    case GroupKind::SL: return "SL";
    case GroupKind::Sp: return "Sp";
    case GroupKind::SO: return "SO";
  }
  return "?";
}

GroupKind parse_group_kind(const std::string& name) {
  if (name == "GL") return GroupKind::GL;
  if (name == "SL") return GroupKind::SL;
  if (name == "Sp") return GroupKind::Sp;
  if (name == "SO") return GroupKind::SO;
  raise(ErrorCode::parse_error, "unknown group kind '" + name + "'");
}

Matrix GroupDescriptor::form_matrix(const RingPtr& ring) const {
  Matrix out(ring, size, size);
  for (std::size_t i = 0; i < size; ++i)
    for (std::size_t j = 0; j < size; ++j)
      if (form[i][j] != 0) out(i, j) = RobbaElement::from_int(ring, form[i][j]);
  return out;
}

GroupDescriptor make_group(GroupKind kind, std::size_t size,
                           std::optional<std::vector<std::vector<std::int64_t>>> form) {
  if (size < 1) raise(ErrorCode::invalid_argument, "group size must be positive");
  GroupDescriptor d{kind, size, {}};
  if (kind == GroupKind::GL || kind == GroupKind::SL) {
    if (form) raise(ErrorCode::invalid_argument, "GL and SL take no bilinear form");
    return d;
  }
  if (kind == GroupKind::Sp && size % 2 != 0) raise(ErrorCode::invalid_argument, "Sp needs an even size");
  if (form) {
    d.form = *form;
  } else {
    d.form.assign(size, std::vector<std::int64_t>(size, 0));
    if (kind == GroupKind::Sp) {
      const std::size_t h = size / 2;
      for (std::size_t i = 0; i < h; ++i) {
        d.form[i][h + i] = 1;
        d.form[h + i][i] = -1;
      }
    } else {
      for (std::size_t i = 0; i < size; ++i) d.form[i][size - 1 - i] = 1;
    }
  }
  if (d.form.size() != size) raise(ErrorCode::invalid_argument, "form has the wrong size");
  std::vector<std::vector<Rational>> q(size, std::vector<Rational>(size));
  for (std::size_t i = 0; i < size; ++i) {
    if (d.form[i].size() != size) raise(ErrorCode::invalid_argument, "form has the wrong size");
    for (std::size_t j = 0; j < size; ++j) {
      std::int64_t sym = kind == GroupKind::Sp ? -d.form[j][i] : d.form[j][i];
      if (d.form[i][j] != sym)
        raise(ErrorCode::invalid_argument, kind == GroupKind::Sp ? "Sp form must be antisymmetric" : "SO form must be symmetric");
      q[i][j] = Rational(d.form[i][j]);
    }
  }
  if (rational_det(q) == Rational(0)) raise(ErrorCode::invalid_argument, "bilinear form must be invertible");
  return d;
}

Check group_membership(const Matrix& g, const GroupDescriptor& d) {
  const int n = g.ring()->field().precision();
  Check c;
  c.name = "group.membership";
  c.precision = n;
  if (!g.square() || g.rows() != d.size) {
    c.status = Status::fail;
    c.precision = 0;
    c.detail = "matrix size does not match the group";
    return c;
  }
  RobbaElement dt = det(g);
  if (dt.window_loss()) {
    c.status = Status::inconclusive;
    c.window_loss = true;
    c.detail = "determinant affected by window truncation";
  } else {
    try {
      (void)invert(dt);
      c.status = g.window_loss() ? Status::pass_at_precision : Status::pass;
    } catch (const Error&) {
      c.status = Status::fail;
      c.precision = 0;
      c.detail = "determinant is not a unit";
      return c;
    }
  }
  if (d.kind == GroupKind::SL || d.kind == GroupKind::SO) c = worst_of(c, det_one_check("det", dt, n));
  if (d.kind == GroupKind::Sp || d.kind == GroupKind::SO) c = worst_of(c, form_check("form", g, d.form_matrix(g.ring()), n));
  return c;
}

Check lie_membership(const Matrix& X, const GroupDescriptor& d) {
  const int n = X.ring()->field().precision();
  if (!X.square() || X.rows() != d.size) return boolean_check("lie.membership", false, "matrix size does not match the group", n);
  switch (d.kind) {
    case GroupKind::GL: return boolean_check("lie.membership", true, "", n, X.window_loss());
    case GroupKind::SL: {
      RobbaElement tr = trace(X);
      return residual_check("lie.membership", tr, X.min_valuation(), n);
    }
    case GroupKind::Sp:
    case GroupKind::SO: {
      Matrix form = d.form_matrix(X.ring());
      Matrix r = add(mul(transpose(X), form), mul(form, X));
      return residual_check("lie.membership", r, X.min_valuation(), n);
    }
  }
  return boolean_check("lie.membership", false, "unknown group", n);
}

Matrix dlog(const Matrix& g) { return mul(derive(g), inverse(g)); }

Matrix adjoint(const Matrix& g, const Matrix& X) { return mul(mul(g, X), inverse(g)); }

Matrix gauge(const Matrix& x, const Matrix& X) {
  return gauge_with(x, inverse(x), X, [](const Matrix& m) { return derive(m); });
}

Report bphinabla_check(const GPair& p) {
  const int n = p.g.ring()->field().precision();
  Report r;
  r.command = "check-pair";
  Check gm = group_membership(p.g, p.group);
  gm.name = "group.g";
  r.add(gm);
  Check lm = lie_membership(p.X, p.group);
  lm.name = "lie.X";
  r.add(lm);
  r.add(identity_check("bphinabla.identity", p.g, p.X, p.frob_power, n));
  return r;
}

GPair morphism_apply(const Matrix& x, const GPair& p) {
  Check c = group_membership(x, p.group);
  if (c.status == Status::fail) raise(ErrorCode::invalid_argument, "morphism is not in the group: " + c.detail);
  return apply_with_inverse(x, inverse(x), p);
}

PushforwardPair pushforward_pair(const GPair& p, std::int64_t n) {
  if (n < 1) raise(ErrorCode::invalid_argument, "pushforward degree must be positive");
  Matrix acc = p.g;
  Matrix image = p.g;
  for (std::int64_t k = 1; k < n; ++k) {
    image = frobenius(image, p.frob_power);
    acc = mul(acc, image);
  }
  PushforwardPair out{p, {}};
  out.pair.g = std::move(acc);
  out.pair.frob_power = p.frob_power * n;
  out.identity = identity_check("pushforward.identity", out.pair.g, out.pair.X, out.pair.frob_power,
                                p.g.ring()->field().precision());
  return out;
}

Cocharacter cocharacter_from_blocks(const std::vector<SlopeBlock>& blocks) {
  if (blocks.empty()) raise(ErrorCode::malformed_certificate, "certificate has no blocks");
  std::vector<Rational> jumps;
  for (const auto& b : blocks) {
    if (b.rank < 1) raise(ErrorCode::malformed_certificate, "block ranks must be positive");
    jumps.push_back(b.slope);
  }
  Cocharacter out;
  out.denominator = lcm_denominator({jumps});
  for (const auto& b : blocks) {
    Rational k = b.slope * Rational(out.denominator);
    out.exponents.insert(out.exponents.end(), static_cast<std::size_t>(b.rank), k.numerator());
    out.block_sizes.push_back(static_cast<std::size_t>(b.rank));
  }
  return out;
}

Patterns parabolic_patterns(const Cocharacter& lambda, int sign) {
  if (sign != 1 && sign != -1) raise(ErrorCode::invalid_argument, "pattern sign must be +1 or -1");
  Patterns p;
  p.n = lambda.exponents.size();
  p.scaling.resize(p.n * p.n);
  for (std::size_t i = 0; i < p.n; ++i)
    for (std::size_t j = 0; j < p.n; ++j) p.scaling[i * p.n + j] = sign * (lambda.exponents[i] - lambda.exponents[j]);
  return p;
}

Check pattern_check(std::string name, const Matrix& a, const Patterns& pat, PatternKind kind) {
  if (a.rows() != pat.n || a.cols() != pat.n) raise(ErrorCode::pattern_violation, "matrix size does not match the pattern");
  Matrix outside(a.ring(), a.rows(), a.cols());
  for (std::size_t i = 0; i < pat.n; ++i) {
    for (std::size_t j = 0; j < pat.n; ++j) {
      bool inside = kind == PatternKind::P ? pat.in_P(i, j) : kind == PatternKind::Z ? pat.in_Z(i, j) : pat.in_U(i, j);
      if (!inside) outside(i, j) = a(i, j);
    }
  }
  return residual_check(std::move(name), outside, a.min_valuation(), a.ring()->field().precision());
}

Check lieU_conjugation_probe(const Matrix& Z, const Matrix& u, const Patterns& pat) {
  if (pattern_check("Z", Z, pat, PatternKind::Z).status == Status::fail)
    raise(ErrorCode::pattern_violation, "Z is not block diagonal for the pattern");
  Matrix unip = sub(u, Matrix::identity(u.ring(), u.rows()));
  if (pattern_check("u", unip, pat, PatternKind::U).status == Status::fail)
    raise(ErrorCode::pattern_violation, "u - I is not in the U pattern");
  Matrix diff = sub(Z, adjoint(u, Z));
  return pattern_check("lieU.conjugation", diff, pat, PatternKind::U);
}

BlockReduction block_reduce(const GPair& p, const SlopeCertificate& c) {
  const std::size_t d = p.g.rows();
  const int n = p.g.ring()->field().precision();
  std::int64_t total = 0;
  for (const auto& b : c.blocks) total += b.rank;
  if (c.blocks.empty() || total != static_cast<std::int64_t>(d))
    raise(ErrorCode::pattern_violation, "certificate block sizes do not add up to the dimension");
  if (!c.U.square() || c.U.rows() != d) raise(ErrorCode::malformed_certificate, "certificate basis has the wrong size");

  BlockReduction out{p, Matrix(), Matrix(), cocharacter_from_blocks(c.blocks), {}};
  out.report.command = "reduce";
  const Patterns pat = parabolic_patterns(out.lambda, -1);

  Matrix Uinv = inverse(c.U);
  Check uc = group_membership(Uinv, p.group);
  uc.name = "certificate.in_group";
  out.report.add(uc);
  out.adapted = apply_with_inverse(Uinv, c.U, p);

  Check gp = pattern_check("A.in_P", out.adapted.g, pat, PatternKind::P);
  Check xp = pattern_check("N.in_LieP", out.adapted.X, pat, PatternKind::P);
  if (gp.status == Status::fail || xp.status == Status::fail)
    raise(ErrorCode::pattern_violation, "transported pair leaves the parabolic pattern: " +
                                            (gp.status == Status::fail ? gp.detail : xp.detail));
  out.report.add(gp);
  out.report.add(xp);

  out.z = block_diagonal_part(out.adapted.g, out.lambda.block_sizes);
  out.X0 = block_diagonal_part(out.adapted.X, out.lambda.block_sizes);
  out.report.add(identity_check("reduction.identity", out.z, out.X0, p.frob_power, n));
  return out;
}

Report unit_root_reduce(const Matrix& z, const Matrix& X0, const Cocharacter& lambda, std::int64_t frob_power) {
  if (lambda.exponents.size() != z.rows()) raise(ErrorCode::rank_error, "cocharacter size does not match z");
  const RingPtr& ring = z.ring();
  const FieldContext& k = ring->field();
  Module pushed = pushforward(make_module(z, X0, frob_power), lambda.denominator);
  std::vector<RobbaElement> diag;
  for (auto e : lambda.exponents) diag.push_back(RobbaElement::constant(ring, k.pi_power(-e)));
  Module reduced = make_module(mul(Matrix::diagonal(ring, diag), pushed.A), X0, pushed.frob_power);

  Report r = unit_root_check(reduced);
  r.command = "reduce";
  for (auto& c : r.checks) c.name = "unit_root_reduce." + c.name;
  Check g = gauge_matrix_check(reduced);
  g.name = "unit_root_reduce.gauge";
  r.add(g);
  return r;
}

Matrix pullback(const Matrix& a, const ExtensionContext& ext) {
  Matrix out(ext.inner(), a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = ext.pullback(a(i, j));
  return out;
}

Matrix gauge_over_extension(const Matrix& b, const Matrix& X_pulled, const ExtensionContext& ext) {
  return gauge_with(b, inverse(b), X_pulled, [&](const Matrix& m) { return derive_t_matrix(m, ext); });
}

Matrix transformed_frobenius(const GPair& p, const Matrix& b, const ExtensionContext& ext) {
  return mul(mul(b, pullback(p.g, ext)), frobenius(inverse(b), p.frob_power));
}

Report monodromy_certificate_check(const GPair& p, const Cocharacter& lambda, const Matrix& b,
                                   const ExtensionContext& ext) {
  if (!b.ring()->same_ring(*ext.inner())) raise(ErrorCode::context_mismatch, "witness does not live in the extension ring");
  if (lambda.exponents.size() != p.X.rows()) raise(ErrorCode::rank_error, "cocharacter size does not match the pair");
  Report r;
  r.command = "monodromy-verify";
  Check bm = group_membership(b, p.group);
  bm.name = "witness.in_group";
  r.add(bm);
  Matrix Y = gauge_over_extension(b, pullback(p.X, ext), ext);
  r.add(pattern_check("gauge.in_LieU", Y, parabolic_patterns(lambda, -1), PatternKind::U));
  return r;
}

}  // namespace phn
