#include "phinabla/matrix.hpp"

#include <algorithm>

#include "phinabla/errors.hpp"

namespace phn {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) raise(ErrorCode::rank_error, "matrix shapes differ");
  if (!a.ring()->same_ring(*b.ring())) raise(ErrorCode::context_mismatch, "matrices belong to different rings");
}

template <typename F>
Matrix map_entries(const Matrix& a, F&& f) {
  Matrix out(a.ring(), a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = f(a(i, j));
  return out;
}

}  // namespace

Matrix::Matrix(RingPtr ring, std::size_t rows, std::size_t cols)
    : ring_(std::move(ring)), rows_(rows), cols_(cols), data_(rows * cols, RobbaElement(ring_)) {}

Matrix Matrix::identity(const RingPtr& ring, std::size_t n) {
  Matrix out(ring, n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = RobbaElement::one(ring);
  return out;
}

Matrix Matrix::diagonal(const RingPtr& ring, const std::vector<RobbaElement>& entries) {
  Matrix out(ring, entries.size(), entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) out(i, i) = entries[i];
  return out;
}

bool Matrix::window_loss() const {
  return std::any_of(data_.begin(), data_.end(), [](const RobbaElement& e) { return e.window_loss(); });
}

std::int64_t Matrix::min_valuation() const {
  std::int64_t v = kInfinity;
  for (const auto& e : data_) v = std::min(v, e.min_valuation());
  return v;
}

std::int64_t Matrix::precision() const {
  std::int64_t v = kInfinity;
  for (const auto& e : data_) v = std::min(v, e.precision());
  return v;
}

bool Matrix::identical(const Matrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_) return false;
  for (std::size_t k = 0; k < data_.size(); ++k)
    if (!data_[k].identical(other.data_[k])) return false;
  return true;
}

Matrix add(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b);
  Matrix out(a.ring(), a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = add(a(i, j), b(i, j));
  return out;
}

Matrix sub(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b);
  Matrix out(a.ring(), a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = sub(a(i, j), b(i, j));
  return out;
}

Matrix neg(const Matrix& a) {
  return map_entries(a, [](const RobbaElement& e) { return neg(e); });
}

Matrix mul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) raise(ErrorCode::rank_error, "matrix product shape mismatch");
  if (!a.ring()->same_ring(*b.ring())) raise(ErrorCode::context_mismatch, "matrices belong to different rings");
  Matrix out(a.ring(), a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      RobbaElement acc(a.ring());
      for (std::size_t k = 0; k < a.cols(); ++k) {
        if (a(i, k).is_exact_zero() || b(k, j).is_exact_zero()) continue;
        acc = add(acc, mul(a(i, k), b(k, j)));
      }
      out(i, j) = std::move(acc);
    }
  }
  return out;
}

Matrix scale(const Matrix& a, const Scalar& c) {
  return map_entries(a, [&](const RobbaElement& e) { return scale(e, c); });
}

Matrix scale(const Matrix& a, const RobbaElement& c) {
  return map_entries(a, [&](const RobbaElement& e) { return mul(c, e); });
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.ring(), a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
  if (!a.ring()->same_ring(*b.ring())) raise(ErrorCode::context_mismatch, "matrices belong to different rings");
  Matrix out(a.ring(), a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = mul(a(i, j), b(k, l));
  return out;
}

Matrix derive(const Matrix& a) {
  return map_entries(a, [](const RobbaElement& e) { return derive(e); });
}

Matrix frobenius(const Matrix& a, std::int64_t n) {
  return map_entries(a, [n](const RobbaElement& e) { return frobenius(e, n); });
}

Matrix submatrix(const Matrix& a, std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) {
  if (r0 + nr > a.rows() || c0 + nc > a.cols()) raise(ErrorCode::rank_error, "submatrix out of range");
  Matrix out(a.ring(), nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) out(i, j) = a(r0 + i, c0 + j);
  return out;
}

Matrix block_diagonal(const std::vector<Matrix>& blocks) {
  if (blocks.empty()) raise(ErrorCode::rank_error, "no blocks given");
  std::size_t n = 0;
  for (const auto& b : blocks) {
    if (!b.square()) raise(ErrorCode::rank_error, "diagonal blocks must be square");
    n += b.rows();
  }
  Matrix out(blocks.front().ring(), n, n);
  std::size_t off = 0;
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) out(off + i, off + j) = b(i, j);
    off += b.rows();
  }
  return out;
}

Matrix block_diagonal_part(const Matrix& a, const std::vector<std::size_t>& sizes) {
  std::vector<std::size_t> block_of;
  for (std::size_t b = 0; b < sizes.size(); ++b) block_of.insert(block_of.end(), sizes[b], b);
  if (block_of.size() != a.rows() || !a.square()) raise(ErrorCode::rank_error, "block sizes do not match the matrix");
  Matrix out(a.ring(), a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (block_of[i] == block_of[j]) out(i, j) = a(i, j);
  return out;
}

RobbaElement trace(const Matrix& a) {
  if (!a.square()) raise(ErrorCode::rank_error, "trace of a non-square matrix");
  RobbaElement acc(a.ring());
  for (std::size_t i = 0; i < a.rows(); ++i) acc = add(acc, a(i, i));
  return acc;
}

// Berkowitz: the characteristic polynomial of the leading (k+1)x(k+1) block is a
// lower-triangular Toeplitz matrix applied to that of the leading k x k block.
std::vector<RobbaElement> characteristic_polynomial(const Matrix& a) {
  if (!a.square()) raise(ErrorCode::rank_error, "characteristic polynomial of a non-square matrix");
  const RingPtr& ring = a.ring();
  const std::size_t n = a.rows();
  std::vector<RobbaElement> v{RobbaElement::one(ring)};
  for (std::size_t k = 0; k < n; ++k) {
    // Column of the Toeplitz matrix: 1, -a_kk, -R C, -R M C, ..., -R M^{k-1} C.
    std::vector<RobbaElement> col{RobbaElement::one(ring), neg(a(k, k))};
    std::vector<RobbaElement> vec(k);
    for (std::size_t i = 0; i < k; ++i) vec[i] = a(i, k);
    for (std::size_t j = 0; j < k; ++j) {
      RobbaElement acc(ring);
      for (std::size_t i = 0; i < k; ++i) acc = add(acc, mul(a(k, i), vec[i]));
      col.push_back(neg(acc));
      if (j + 1 < k) {
        std::vector<RobbaElement> next(k, RobbaElement(ring));
        for (std::size_t r = 0; r < k; ++r)
          for (std::size_t c = 0; c < k; ++c)
            if (!a(r, c).is_exact_zero() && !vec[c].is_exact_zero()) next[r] = add(next[r], mul(a(r, c), vec[c]));
        vec = std::move(next);
      }
    }
    std::vector<RobbaElement> w(k + 2, RobbaElement(ring));
    for (std::size_t i = 0; i < k + 2; ++i)
      for (std::size_t j = 0; j <= i && j < v.size(); ++j)
        if (!col[i - j].is_exact_zero() && !v[j].is_exact_zero()) w[i] = add(w[i], mul(col[i - j], v[j]));
    v = std::move(w);
  }
  return v;
}

RobbaElement det(const Matrix& a) {
  auto c = characteristic_polynomial(a);
  return a.rows() % 2 == 0 ? c.back() : neg(c.back());
}

Matrix adjugate(const Matrix& a) {
  const std::size_t n = a.rows();
  auto c = characteristic_polynomial(a);
  // adj(A) = (-1)^{n+1} (A^{n-1} + c_1 A^{n-2} + ... + c_{n-1} I), by Horner.
  Matrix acc = Matrix::identity(a.ring(), n);
  for (std::size_t k = 1; k < n; ++k) {
    acc = mul(acc, a);
    for (std::size_t i = 0; i < n; ++i) acc(i, i) = add(acc(i, i), c[k]);
  }
  return n % 2 == 1 ? acc : neg(acc);
}

Matrix inverse(const Matrix& a) {
  if (!a.square()) raise(ErrorCode::rank_error, "inverse of a non-square matrix");
  RobbaElement d = det(a);
  RobbaElement dinv = invert(d);
  return scale(adjugate(a), dinv);
}

}  // namespace phn
