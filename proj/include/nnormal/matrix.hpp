#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nnormal/scalar.hpp"

namespace nnormal {

/// Dense row-major matrix of exact scalars. 0x0 is a valid (empty) matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  Matrix(std::initializer_list<std::initializer_list<Scalar>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const Scalar> values);
  /// Block-diagonal concatenation.
  static Matrix direct_sum(std::span<const Matrix> blocks);
  /// Columns side by side; all must have equal row count.
  static Matrix hstack(std::span<const Matrix> parts);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  Scalar& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Scalar& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Matrix block(std::size_t r0, std::size_t c0, std::size_t rows, std::size_t cols) const;
  void set_block(std::size_t r0, std::size_t c0, const Matrix& m);
  Matrix column(std::size_t j) const { return block(0, j, rows_, 1); }
  Matrix transpose() const;

  bool is_zero() const;
  bool is_upper_triangular() const;
  Scalar trace() const;

  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(const Scalar& s);

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, const Scalar& s) { return a *= s; }
  friend Matrix operator*(const Scalar& s, Matrix a) { return a *= s; }
  friend Matrix operator*(const Matrix& a, const Matrix& b);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Scalar> data_;
};

/// Multi-line rendering, one bracketed row per line.
std::string to_display(const Matrix& m);

}  // namespace nnormal
