#include "phinabla/phimod.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "phinabla/errors.hpp"

namespace phn {

namespace {

struct Residual {
  Matrix value;
  std::int64_t scale;
};

Matrix connection_or_zero(const Module& m) { return m.N ? *m.N : Matrix(m.ring(), m.dim(), m.dim()); }

Residual gauge_residual_scaled(const Module& m) {
  const Matrix N = connection_or_zero(m);
  const RobbaElement mu = mu_factor(m.ring(), m.frob_power);
  Matrix lhs = scale(mul(m.A, frobenius(N, m.frob_power)), mu);
  Matrix dA = derive(m.A);
  Matrix NA = mul(N, m.A);
  std::int64_t s = std::min({lhs.min_valuation(), dA.min_valuation(), NA.min_valuation()});
  return {sub(sub(lhs, dA), NA), s};
}

std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur;
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (cur.size() == k) {
      out.push_back(cur);
      return;
    }
    for (std::size_t i = start; i < n; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

Matrix minor_matrix(const Matrix& a, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
  Matrix out(a.ring(), rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = a(rows[i], cols[j]);
  return out;
}

std::vector<std::size_t> block_index(const std::vector<std::size_t>& sizes) {
  std::vector<std::size_t> out;
  for (std::size_t b = 0; b < sizes.size(); ++b) out.insert(out.end(), sizes[b], b);
  return out;
}

Check lower_part_check(const std::string& name, const Matrix& a, const std::vector<std::size_t>& sizes, int n) {
  auto blk = block_index(sizes);
  Matrix lower(a.ring(), a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (blk[i] > blk[j]) lower(i, j) = a(i, j);
  return residual_check(name, lower, a.min_valuation(), n);
}

std::int64_t mod_pow_inverse(std::int64_t a, std::int64_t m) {
  std::int64_t old_r = a % m, r = m, old_s = 1, s = 0;
  if (old_r < 0) old_r += m;
  while (r != 0) {
    std::int64_t q = old_r / r;
    std::int64_t t = old_r - q * r;
    old_r = r;
    r = t;
    t = old_s - q * s;
    old_s = s;
    s = t;
  }
  return ((old_s % m) + m) % m;
}

}  // namespace

Module make_module(Matrix A, std::optional<Matrix> N, std::int64_t frob_power) {
  if (!A.square() || A.rows() == 0) raise(ErrorCode::rank_error, "Frobenius matrix must be square and nonempty");
  if (N && (N->rows() != A.rows() || N->cols() != A.cols()))
    raise(ErrorCode::rank_error, "connection matrix shape differs from the Frobenius matrix");
  if (N && !N->ring()->same_ring(*A.ring())) raise(ErrorCode::context_mismatch, "A and N live in different rings");
  if (frob_power < 1) raise(ErrorCode::invalid_argument, "Frobenius power must be positive");
  return Module{std::move(A), std::move(N), frob_power};
}

Matrix gauge_residual(const Module& m) { return gauge_residual_scaled(m).value; }

Check gauge_matrix_check(const Module& m) {
  auto r = gauge_residual_scaled(m);
  return residual_check("gauge.matrix", r.value, r.scale, m.ring()->field().precision());
}

Check gauge_operator_check(const Module& m) {
  const RingPtr& ring = m.ring();
  const std::size_t d = m.dim();
  const Matrix N = connection_or_zero(m);
  const RobbaElement mu = mu_factor(ring, m.frob_power);
  auto Phi = [&](const Matrix& v) { return mul(m.A, frobenius(v, m.frob_power)); };

  std::vector<Matrix> samples;
  for (std::size_t j = 0; j < d; ++j) {
    Matrix e(ring, d, 1);
    e(j, 0) = RobbaElement::one(ring);
    samples.push_back(e);
  }
  Matrix mixed(ring, d, 1);
  for (std::size_t j = 0; j < d; ++j) mixed(j, 0) = RobbaElement::from_int(ring, static_cast<std::int64_t>(j) + 1);
  samples.push_back(mixed);

  Check worst;
  worst.name = "gauge.operator";
  worst.precision = ring->field().precision();
  // Theta(Phi v) = dPhi(v) + N Phi(v) against mu Phi(Theta v) = mu Phi(dv) + mu Phi(N v).
  for (const auto& v : samples) {
    const Matrix pv = Phi(v);
    const Matrix parts[] = {derive(pv), mul(N, pv), scale(Phi(derive(v)), mu), scale(Phi(mul(N, v)), mu)};
    std::int64_t s = kInfinity;
    for (const auto& part : parts) s = std::min(s, part.min_valuation());
    Matrix residual = sub(add(parts[0], parts[1]), add(parts[2], parts[3]));
    Check c = residual_check("gauge.operator", residual, s, ring->field().precision());
    if (static_cast<int>(c.status) > static_cast<int>(worst.status) ||
        (c.status == worst.status && c.precision < worst.precision)) {
      worst = c;
    }
    worst.window_loss = worst.window_loss || c.window_loss;
  }
  return worst;
}

Report gauge_compat_check(const Module& m) {
  Report r;
  r.command = "check-gauge";
  r.add(gauge_matrix_check(m));
  r.add(gauge_operator_check(m));
  return r;
}

Module tensor(const Module& a, const Module& b) {
  if (a.frob_power != b.frob_power) raise(ErrorCode::context_mismatch, "Frobenius powers differ");
  Matrix A = kronecker(a.A, b.A);
  std::optional<Matrix> N;
  if (a.N || b.N) {
    Matrix Ia = Matrix::identity(a.ring(), a.dim());
    Matrix Ib = Matrix::identity(b.ring(), b.dim());
    N = add(kronecker(connection_or_zero(a), Ib), kronecker(Ia, connection_or_zero(b)));
  }
  return make_module(std::move(A), std::move(N), a.frob_power);
}

Module dual(const Module& m) {
  Matrix A = transpose(inverse(m.A));
  std::optional<Matrix> N;
  if (m.N) N = neg(transpose(*m.N));
  return make_module(std::move(A), std::move(N), m.frob_power);
}

Module exterior_power(const Module& m, std::size_t k) {
  const std::size_t d = m.dim();
  if (k < 1 || k > d) raise(ErrorCode::rank_error, "exterior power degree out of range");
  const auto sets = subsets(d, k);
  const RingPtr& ring = m.ring();
  Matrix A(ring, sets.size(), sets.size());
  for (std::size_t I = 0; I < sets.size(); ++I)
    for (std::size_t J = 0; J < sets.size(); ++J) A(I, J) = det(minor_matrix(m.A, sets[I], sets[J]));

  std::optional<Matrix> N;
  if (m.N) {
    Matrix out(ring, sets.size(), sets.size());
    // nabla(e_J) = sum_s e_{j_1} ^ ... ^ nabla(e_{j_s}) ^ ... ^ e_{j_k}.
    for (std::size_t J = 0; J < sets.size(); ++J) {
      for (std::size_t s = 0; s < k; ++s) {
        for (std::size_t i = 0; i < d; ++i) {
          std::vector<std::size_t> idx = sets[J];
          idx[s] = i;
          std::vector<std::size_t> sorted = idx;
          std::sort(sorted.begin(), sorted.end());
          if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) continue;
          int inversions = 0;
          for (std::size_t x = 0; x < k; ++x)
            for (std::size_t y = x + 1; y < k; ++y)
              if (idx[x] > idx[y]) ++inversions;
          std::size_t I = static_cast<std::size_t>(std::find(sets.begin(), sets.end(), sorted) - sets.begin());
          RobbaElement term = (*m.N)(i, sets[J][s]);
          if (inversions % 2) term = neg(term);
          out(I, J) = add(out(I, J), term);
        }
      }
    }
    N = std::move(out);
  }
  return make_module(std::move(A), std::move(N), m.frob_power);
}

Module direct_sum(const Module& a, const Module& b) {
  if (a.frob_power != b.frob_power) raise(ErrorCode::context_mismatch, "Frobenius powers differ");
  Matrix A = block_diagonal({a.A, b.A});
  std::optional<Matrix> N;
  if (a.N || b.N) N = block_diagonal({connection_or_zero(a), connection_or_zero(b)});
  return make_module(std::move(A), std::move(N), a.frob_power);
}

Module pushforward(const Module& m, std::int64_t n) {
  if (n < 1) raise(ErrorCode::invalid_argument, "pushforward degree must be positive");
  Matrix acc = m.A;
  Matrix image = m.A;
  for (std::int64_t k = 1; k < n; ++k) {
    image = frobenius(image, m.frob_power);
    acc = mul(acc, image);
  }
  return make_module(std::move(acc), m.N, m.frob_power * n);
}

Module twist(const Module& m, std::int64_t s) {
  return make_module(scale(m.A, m.ring()->field().pi_power(s)), m.N, m.frob_power);
}

Module base_change(const Module& m, const Matrix& U) {
  if (!U.square() || U.rows() != m.dim()) raise(ErrorCode::rank_error, "change of basis has the wrong size");
  Matrix Uinv = inverse(U);
  Matrix A = mul(mul(Uinv, m.A), frobenius(U, m.frob_power));
  std::optional<Matrix> N;
  if (m.N) N = mul(Uinv, add(mul(*m.N, U), derive(U)));
  return make_module(std::move(A), std::move(N), m.frob_power);
}

Rational det_valuation(const Module& m) {
  RobbaElement d = det(m.A);
  if (d.is_zero()) raise(ErrorCode::unbounded_determinant, "determinant vanishes at the working precision");
  if (d.window_loss())
    raise(ErrorCode::window_inconclusive, "determinant has coefficients outside the reliable window");
  return *gauss_valuation(d, Rational(0));
}

Report unit_root_check(const Module& m) {
  Report r;
  r.command = "unit-root";
  const int n = m.ring()->field().precision();
  Check integral;
  integral.name = "unit_root.integral";
  integral.precision = n;
  integral.window_loss = m.A.window_loss();
  integral.status = integral.window_loss ? Status::pass_at_precision : Status::pass;
  for (std::size_t i = 0; i < m.dim() && integral.status != Status::fail; ++i) {
    for (std::size_t j = 0; j < m.dim(); ++j) {
      const RobbaElement& e = m.A(i, j);
      for (const auto& t : e.terms()) {
        if (t.coeff.valuation() >= 0) continue;
        bool reliable = t.index >= e.known_lo() && t.index <= e.known_hi();
        if (reliable) {
          integral.status = Status::fail;
          integral.precision = 0;
          integral.detail = "entry (" + std::to_string(i) + "," + std::to_string(j) + ") has a coefficient of valuation " +
                            std::to_string(t.coeff.valuation());
          break;
        }
        integral.status = combine(integral.status, Status::inconclusive);
      }
      if (integral.status == Status::fail) break;
    }
  }
  r.add(integral);

  Check dv;
  dv.name = "unit_root.det_valuation";
  dv.precision = n;
  try {
    Rational v = det_valuation(m);
    dv.status = v == Rational(0) ? (m.A.window_loss() ? Status::pass_at_precision : Status::pass) : Status::fail;
    dv.detail = "det valuation " + format_rational(v);
    if (v != Rational(0)) dv.precision = 0;
  } catch (const Error& e) {
    dv.status = e.code() == ErrorCode::window_inconclusive ? Status::inconclusive : Status::fail;
    dv.window_loss = e.code() == ErrorCode::window_inconclusive;
    dv.detail = e.what();
  }
  r.add(dv);
  return r;
}

Report purity_check(const Module& m, std::int64_t s, std::int64_t r) {
  if (r < 1) raise(ErrorCode::invalid_argument, "purity denominator must be positive");
  if (std::gcd(s, r) != 1) raise(ErrorCode::invalid_argument, "purity slope s/r must be in lowest terms");
  Report out = unit_root_check(twist(pushforward(m, r), -s));
  out.command = "purity";
  return out;
}

std::vector<std::size_t> block_sizes(const SlopeCertificate& c) {
  std::vector<std::size_t> out;
  for (const auto& b : c.blocks) out.push_back(static_cast<std::size_t>(b.rank));
  return out;
}

Report verify_slope_certificate(const Module& m, const SlopeCertificate& c) {
  const std::size_t d = m.dim();
  const int n = m.ring()->field().precision();
  if (c.blocks.empty()) raise(ErrorCode::malformed_certificate, "certificate has no blocks");
  if (!c.U.square() || c.U.rows() != d) raise(ErrorCode::malformed_certificate, "certificate basis has the wrong size");

  Report r;
  r.command = "verify-slopes";
  std::int64_t total = 0;
  bool ranks_positive = true;
  for (const auto& b : c.blocks) {
    total += b.rank;
    ranks_positive = ranks_positive && b.rank > 0;
  }
  bool ranks_ok = ranks_positive && total == static_cast<std::int64_t>(d);
  r.add(boolean_check("certificate.ranks", ranks_ok,
                      "block ranks sum to " + std::to_string(total) + ", dimension " + std::to_string(d), n));
  bool increasing = true;
  for (std::size_t i = 1; i < c.blocks.size(); ++i) increasing = increasing && c.blocks[i - 1].slope < c.blocks[i].slope;
  r.add(boolean_check("certificate.jumps_increasing", increasing, increasing ? "" : "slopes are not strictly increasing", n));
  if (!ranks_ok) return r;

  const auto sizes = block_sizes(c);
  Module adapted = base_change(m, c.U);
  r.add(lower_part_check("A.block_upper", adapted.A, sizes, n));
  if (adapted.N) r.add(lower_part_check("N.block_upper", *adapted.N, sizes, n));

  std::size_t off = 0;
  for (std::size_t k = 0; k < c.blocks.size(); ++k) {
    const auto& b = c.blocks[k];
    const auto rk = static_cast<std::size_t>(b.rank);
    Module block = make_module(submatrix(adapted.A, off, off, rk, rk), std::nullopt, m.frob_power);
    Report pr = purity_check(block, b.slope.numerator(), b.slope.denominator());
    r.merge(pr, "block" + std::to_string(k) + ".purity.");
    off += rk;
  }
  return r;
}

std::vector<std::pair<std::int64_t, Rational>> newton_polygon(const std::vector<SlopeBlock>& blocks) {
  std::vector<std::pair<std::int64_t, Rational>> pts{{0, Rational(0)}};
  for (const auto& b : blocks) {
    if (b.rank < 1) raise(ErrorCode::malformed_certificate, "block ranks must be positive");
    pts.emplace_back(pts.back().first + b.rank, pts.back().second + b.slope * Rational(b.rank));
  }
  return pts;
}

std::string newton_polygon_tsv(const std::vector<std::pair<std::int64_t, Rational>>& points) {
  std::string out;
  for (const auto& [x, y] : points) out += std::to_string(x) + "\t" + format_rational(y) + "\n";
  return out;
}

std::string newton_polygon_svg(const std::vector<std::pair<std::int64_t, Rational>>& points) {
  std::int64_t xmax = 1;
  double ymin = 0, ymax = 1;
  for (const auto& [x, y] : points) {
    xmax = std::max(xmax, x);
    double yd = boost::rational_cast<double>(y);
    ymin = std::min(ymin, yd);
    ymax = std::max(ymax, yd);
  }
  const auto ylo = static_cast<std::int64_t>(std::floor(ymin));
  const auto yhi = static_cast<std::int64_t>(std::ceil(ymax));
  const int cell = 40, margin = 20;
  const std::int64_t width = xmax * cell + 2 * margin;
  const std::int64_t height = (yhi - ylo) * cell + 2 * margin;
  auto px = [&](double x) { return margin + x * cell; };
  auto py = [&](double y) { return margin + (static_cast<double>(yhi) - y) * cell; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  os << "<g stroke=\"#ccc\" stroke-width=\"1\">\n";
  for (std::int64_t x = 0; x <= xmax; ++x)
    os << "<line x1=\"" << px(x) << "\" y1=\"" << py(ylo) << "\" x2=\"" << px(x) << "\" y2=\"" << py(yhi) << "\"/>\n";
  for (std::int64_t y = ylo; y <= yhi; ++y)
    os << "<line x1=\"" << px(0) << "\" y1=\"" << py(y) << "\" x2=\"" << px(xmax) << "\" y2=\"" << py(y) << "\"/>\n";
  os << "</g>\n<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"2\" points=\"";
  for (const auto& [x, y] : points) os << px(x) << "," << py(boost::rational_cast<double>(y)) << " ";
  os << "\"/>\n";
  for (const auto& [x, y] : points)
    os << "<circle cx=\"" << px(x) << "\" cy=\"" << py(boost::rational_cast<double>(y)) << "\" r=\"3\" fill=\"#1f4e9c\"/>\n";
  os << "</svg>\n";
  return os.str();
}

const char* hom_probe_name(HomProbe h) noexcept {
  switch (h) {
    case HomProbe::only_zero: return "only-zero";
    case HomProbe::nonzero_found: return "nonzero-found";
    case HomProbe::window_inconclusive: return "window-inconclusive";
  }
  return "unknown";
}

std::vector<std::int64_t> smith_exponents(std::vector<std::vector<std::int64_t>> rows, std::int64_t p, int n) {
  std::int64_t modulus = 1;
  for (int i = 0; i < n; ++i) modulus *= p;
  const std::size_t nr = rows.size();
  const std::size_t nc = nr ? rows[0].size() : 0;
  for (auto& row : rows)
    for (auto& x : row) x = ((x % modulus) + modulus) % modulus;
  auto val = [&](std::int64_t x) -> std::int64_t {
    if (x == 0) return n;
    std::int64_t v = 0;
    while (x % p == 0) {
      x /= p;
      ++v;
    }
    return std::min<std::int64_t>(v, n);
  };
  std::vector<std::int64_t> out;
  std::vector<bool> row_used(nr, false), col_used(nc, false);
  for (std::size_t step = 0; step < std::min(nr, nc); ++step) {
    std::int64_t best = n + 1;
    std::size_t br = 0, bc = 0;
    for (std::size_t i = 0; i < nr; ++i) {
      if (row_used[i]) continue;
      for (std::size_t j = 0; j < nc; ++j) {
        if (col_used[j]) continue;
        std::int64_t v = val(rows[i][j]);
        if (v < best) {
          best = v;
          br = i;
          bc = j;
        }
      }
    }
    if (best >= n) {
      out.insert(out.end(), std::min(nr, nc) - step, n);
      break;
    }
    out.push_back(best);
    row_used[br] = col_used[bc] = true;
    std::int64_t pv = 1;
    for (std::int64_t i = 0; i < best; ++i) pv *= p;
    std::int64_t unit_inv = mod_pow_inverse(rows[br][bc] / pv, modulus);
    for (std::size_t i = 0; i < nr; ++i) {
      if (row_used[i] || rows[i][bc] == 0) continue;
      auto factor = static_cast<std::int64_t>(static_cast<__int128>(rows[i][bc] / pv) * unit_inv % modulus);
      for (std::size_t j = 0; j < nc; ++j) {
        __int128 v = rows[i][j] - static_cast<__int128>(factor) * rows[br][j] % modulus;
        rows[i][j] = static_cast<std::int64_t>(((v % modulus) + modulus) % modulus);
      }
    }
  }
  return out;
}

HomProbe rank1_hom_probe(const RingPtr& ring, std::int64_t a, std::int64_t b) {
  const FieldContext& k = ring->field();
  const int n = k.precision();
  const std::int64_t e = a - b;
  if (e >= n) return HomProbe::window_inconclusive;
  const std::int64_t lo = ring->lo(), hi = ring->hi(), q = k.q();
  const std::size_t size = static_cast<std::size_t>(hi - lo + 1);
  const std::int64_t pe = k.prime_power(static_cast<int>(std::abs(e)));
  // Row k: [q | k] c_{k/q} - pi^e c_k = 0, multiplied through by pi^{-e} when e < 0.
  const std::int64_t frob_coeff = e < 0 ? pe : 1;
  const std::int64_t self_coeff = e < 0 ? -1 : -pe;
  std::vector<std::vector<std::int64_t>> rows(size, std::vector<std::int64_t>(size, 0));
  for (std::int64_t idx = lo; idx <= hi; ++idx) {
    auto row = static_cast<std::size_t>(idx - lo);
    rows[row][row] += self_coeff;
    if (idx % q == 0) rows[row][static_cast<std::size_t>(idx / q - lo)] += frob_coeff;
  }
  auto exps = smith_exponents(std::move(rows), k.p(), n);
  bool zero_divisor = std::any_of(exps.begin(), exps.end(), [&](std::int64_t x) { return x >= n; });
  if (zero_divisor) return HomProbe::nonzero_found;
  bool torsion = std::any_of(exps.begin(), exps.end(), [](std::int64_t x) { return x >= 1; });
  return torsion ? HomProbe::window_inconclusive : HomProbe::only_zero;
}

}  // namespace phn
