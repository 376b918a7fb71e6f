#pragma once

#include <cstddef>
#include <vector>

#include "phinabla/robba.hpp"

namespace phn {

// Dense matrix over a truncated Robba ring.
class Matrix {
 public:
  Matrix() = default;
  Matrix(RingPtr ring, std::size_t rows, std::size_t cols);

  static Matrix identity(const RingPtr& ring, std::size_t n);
  // Diagonal matrix with the given entries.
  static Matrix diagonal(const RingPtr& ring, const std::vector<RobbaElement>& entries);

  const RingPtr& ring() const noexcept { return ring_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  RobbaElement& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const RobbaElement& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  bool window_loss() const;
  // Smallest coefficient valuation over all entries (+infinity for zero).
  std::int64_t min_valuation() const;
  // Smallest global precision bound over all entries.
  std::int64_t precision() const;
  bool identical(const Matrix& other) const;

 private:
  RingPtr ring_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<RobbaElement> data_;
};

Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix neg(const Matrix& a);
Matrix mul(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, const Scalar& c);
Matrix scale(const Matrix& a, const RobbaElement& c);
Matrix transpose(const Matrix& a);
Matrix kronecker(const Matrix& a, const Matrix& b);
Matrix derive(const Matrix& a);
Matrix frobenius(const Matrix& a, std::int64_t n = 1);

Matrix submatrix(const Matrix& a, std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc);
Matrix block_diagonal(const std::vector<Matrix>& blocks);
// Zeroes every entry outside the diagonal blocks of the given sizes.
Matrix block_diagonal_part(const Matrix& a, const std::vector<std::size_t>& sizes);

RobbaElement trace(const Matrix& a);
// Coefficients c_0 = 1, c_1, ..., c_n of det(x I - A), computed division-free.
std::vector<RobbaElement> characteristic_polynomial(const Matrix& a);
RobbaElement det(const Matrix& a);
// Adjugate from the characteristic polynomial (Cayley-Hamilton).
Matrix adjugate(const Matrix& a);
// Throws not_invertible when det(a) is not a unit of the truncated ring.
Matrix inverse(const Matrix& a);

}  // namespace phn
