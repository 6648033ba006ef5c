#include "nnormal/matrix.hpp"

#include <sstream>

#include "nnormal/errors.hpp"

namespace nnormal {

Matrix::Matrix(std::initializer_list<std::initializer_list<Scalar>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw DimensionMismatch("ragged matrix literal");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

Matrix Matrix::diagonal(std::span<const Scalar> values) {
  Matrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

Matrix Matrix::direct_sum(std::span<const Matrix> blocks) {
  std::size_t r = 0;
  std::size_t c = 0;
  for (const Matrix& b : blocks) {
    r += b.rows();
    c += b.cols();
  }
  Matrix out(r, c);
  r = c = 0;
  for (const Matrix& b : blocks) {
    out.set_block(r, c, b);
    r += b.rows();
    c += b.cols();
  }
  return out;
}

Matrix Matrix::hstack(std::span<const Matrix> parts) {
  if (parts.empty()) return {};
  std::size_t rows = parts.front().rows();
  std::size_t cols = 0;
  for (const Matrix& p : parts) {
    if (p.rows() != rows) throw DimensionMismatch("hstack: row counts differ");
    cols += p.cols();
  }
  Matrix out(rows, cols);
  cols = 0;
  for (const Matrix& p : parts) {
    out.set_block(0, cols, p);
    cols += p.cols();
  }
  return out;
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t rows, std::size_t cols) const {
  if (r0 + rows > rows_ || c0 + cols > cols_) throw DimensionMismatch("block out of range");
  Matrix out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) out(i, j) = (*this)(r0 + i, c0 + j);
  }
  return out;
}

void Matrix::set_block(std::size_t r0, std::size_t c0, const Matrix& m) {
  if (r0 + m.rows() > rows_ || c0 + m.cols() > cols_) throw DimensionMismatch("set_block out of range");
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) (*this)(r0 + i, c0 + j) = m(i, j);
  }
}

Matrix Matrix::transpose() const {
  Matrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  }
  return out;
}

bool Matrix::is_zero() const {
  for (const Scalar& s : data_) {
    if (!s.is_zero()) return false;
  }
  return true;
}

bool Matrix::is_upper_triangular() const {
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < i && j < cols_; ++j) {
      if (!(*this)(i, j).is_zero()) return false;
    }
  }
  return true;
}

Scalar Matrix::trace() const {
  Scalar t;
  for (std::size_t i = 0; i < rows_ && i < cols_; ++i) t += (*this)(i, i);
  return t;
}

Matrix& Matrix::operator+=(const Matrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("matrix sum: shapes differ");
  for (std::size_t k = 0; k < data_.size(); ++k) {
    if (!o.data_[k].is_zero()) data_[k] += o.data_[k];
  }
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("matrix difference: shapes differ");
  for (std::size_t k = 0; k < data_.size(); ++k) {
    if (!o.data_[k].is_zero()) data_[k] -= o.data_[k];
  }
  return *this;
}

Matrix& Matrix::operator*=(const Scalar& s) {
  for (Scalar& x : data_) {
    if (!x.is_zero()) x *= s;
  }
  return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols_ != b.rows_) throw DimensionMismatch("matrix product: inner dimensions differ");
  Matrix out(a.rows_, b.cols_);
  // i-k-j order with zero skipping; fibers are block-sparse
  for (std::size_t i = 0; i < a.rows_; ++i) {
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const Scalar& aik = a(i, k);
      if (aik.is_zero()) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) {
        const Scalar& bkj = b(k, j);
        if (bkj.is_zero()) continue;
        out(i, j) += aik * bkj;
      }
    }
  }
  return out;
}

std::string to_display(const Matrix& m) {
  std::ostringstream os;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    os << '[';
    for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? ", " : "") << to_display(m(i, j));
    os << "]\n";
  }
  return os.str();
}

}  // namespace nnormal
