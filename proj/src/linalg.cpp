#include "nnormal/linalg.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "nnormal/errors.hpp"

namespace nnormal {

namespace {

void swap_rows(Matrix& m, std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(a, j), m(b, j));
}

std::vector<Scalar> unique_sorted(std::span<const Scalar> values) {
  std::set<Scalar> s(values.begin(), values.end());
  return {s.begin(), s.end()};
}

// Vectors kept in echelon form for cheap independence tests. Each stored
// vector has a distinct pivot where it equals 1; later vectors are zero at
// earlier pivots.
class EchelonSpan {
 public:
  explicit EchelonSpan(std::size_t dim) : dim_(dim) {}

  // Adds v and reports whether it enlarged the span.
  bool add(Matrix v) {
    reduce(v);
    for (std::size_t i = 0; i < dim_; ++i) {
      if (v(i, 0).is_zero()) continue;
      Scalar inv = Scalar(1) / v(i, 0);
      v *= inv;
      basis_.emplace_back(i, std::move(v));
      return true;
    }
    return false;
  }

  std::size_t size() const { return basis_.size(); }

 private:
  void reduce(Matrix& v) const {
    for (const auto& [p, b] : basis_) {
      if (v(p, 0).is_zero()) continue;
      Scalar f = v(p, 0);
      v -= b * f;
    }
  }

  std::size_t dim_;
  std::vector<std::pair<std::size_t, Matrix>> basis_;
};

Matrix shifted(const Matrix& m, const Scalar& c) {
  Matrix n = m;
  for (std::size_t i = 0; i < n.rows(); ++i) n(i, i) -= c;
  return n;
}

}  // namespace

RowEchelon row_echelon(Matrix m) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && m(p, c).is_zero()) ++p;
    if (p == m.rows()) continue;
    swap_rows(m, p, r);
    if (!m(r, c).is_one()) {
      Scalar inv = Scalar(1) / m(r, c);
      for (std::size_t j = c; j < m.cols(); ++j) {
        if (!m(r, j).is_zero()) m(r, j) *= inv;
      }
    }
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c).is_zero()) continue;
      Scalar f = m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j) {
        if (!m(r, j).is_zero()) m(i, j) -= f * m(r, j);
      }
    }
    pivots.push_back(c);
    ++r;
  }
  return {std::move(m), std::move(pivots)};
}

std::size_t rank(const Matrix& m) { return row_echelon(m).pivots.size(); }

Matrix nullspace(const Matrix& m) {
  RowEchelon e = row_echelon(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (std::size_t c : e.pivots) is_pivot[c] = true;
  std::size_t nfree = m.cols() - e.pivots.size();
  Matrix basis(m.cols(), nfree);
  std::size_t k = 0;
  for (std::size_t f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    basis(f, k) = 1;
    for (std::size_t row = 0; row < e.pivots.size(); ++row) {
      const Scalar& v = e.reduced(row, f);
      if (!v.is_zero()) basis(e.pivots[row], k) = -v;
    }
    ++k;
  }
  return basis;
}

std::optional<Matrix> inverse(const Matrix& m) {
  if (!m.is_square()) return std::nullopt;
  std::size_t n = m.rows();
  Matrix aug(n, 2 * n);
  aug.set_block(0, 0, m);
  aug.set_block(0, n, Matrix::identity(n));
  RowEchelon e = row_echelon(std::move(aug));
  if (e.pivots.size() < n || (n > 0 && e.pivots[n - 1] != n - 1)) return std::nullopt;
  return e.reduced.block(0, n, n, n);
}

Matrix power(const Matrix& m, std::size_t k) {
  Matrix out = Matrix::identity(m.rows());
  for (std::size_t i = 0; i < k; ++i) out = out * m;
  return out;
}

std::vector<Scalar> diagonal_values(const Matrix& m) {
  std::set<Scalar> s;
  for (std::size_t i = 0; i < m.rows() && i < m.cols(); ++i) s.insert(m(i, i));
  return {s.begin(), s.end()};
}

JordanStructure jordan_structure(const Matrix& m, std::span<const Scalar> eigenvalues) {
  if (!m.is_square()) throw DimensionMismatch("jordan_structure: matrix is not square");
  const std::size_t n = m.rows();
  JordanStructure out;
  std::size_t total = 0;
  for (const Scalar& c : unique_sorted(eigenvalues)) {
    Matrix nil = shifted(m, c);
    std::vector<std::size_t> ranks{n};
    Matrix pw = nil;
    while (true) {
      std::size_t r = rank(pw);
      if (r == ranks.back()) break;
      ranks.push_back(r);
      pw = pw * nil;
    }
    if (ranks.size() == 1) continue;
    // at_least[k] = number of blocks of size >= k
    std::vector<std::size_t> at_least(ranks.size() + 1, 0);
    for (std::size_t k = 1; k < ranks.size(); ++k) at_least[k] = ranks[k - 1] - ranks[k];
    std::vector<std::size_t> sizes;
    for (std::size_t k = ranks.size() - 1; k >= 1; --k) {
      sizes.insert(sizes.end(), at_least[k] - at_least[k + 1], k);
      total += k * (at_least[k] - at_least[k + 1]);
    }
    out.emplace(c, std::move(sizes));
  }
  if (total != n) {
    throw DimensionMismatch("jordan_structure: eigenvalue list accounts for " + std::to_string(total) +
                            " of " + std::to_string(n) + " dimensions");
  }
  return out;
}

Matrix jordan_matrix(const JordanStructure& s) {
  std::size_t n = 0;
  for (const auto& [c, sizes] : s) {
    for (std::size_t k : sizes) n += k;
  }
  Matrix j(n, n);
  std::size_t off = 0;
  for (const auto& [c, sizes] : s) {
    for (std::size_t k : sizes) {
      for (std::size_t i = 0; i < k; ++i) {
        j(off + i, off + i) = c;
        if (i + 1 < k) j(off + i, off + i + 1) = 1;
      }
      off += k;
    }
  }
  return j;
}

JordanDecomposition jordan_decomposition(const Matrix& m, std::span<const Scalar> eigenvalues) {
  JordanStructure structure = jordan_structure(m, eigenvalues);
  const std::size_t n = m.rows();
  std::vector<Matrix> columns;
  columns.reserve(n);
  for (const auto& [c, sizes] : structure) {
    const Matrix nil = shifted(m, c);
    const std::size_t index = sizes.front();
    std::vector<Matrix> kernels{Matrix(n, 0)};
    Matrix pw = Matrix::identity(n);
    for (std::size_t k = 1; k <= index; ++k) {
      pw = pw * nil;
      kernels.push_back(nullspace(pw));
    }
    struct Chain {
      Matrix head;
      std::size_t length;
    };
    std::vector<Chain> chains;
    for (std::size_t k = index; k >= 1; --k) {
      // Span of ker N^{k-1} plus level-k images of the longer chains; new
      // heads at level k must extend it.
      EchelonSpan span(n);
      for (std::size_t j = 0; j < kernels[k - 1].cols(); ++j) span.add(kernels[k - 1].column(j));
      for (const Chain& ch : chains) span.add(power(nil, ch.length - k) * ch.head);
      for (std::size_t j = 0; j < kernels[k].cols(); ++j) {
        Matrix w = kernels[k].column(j);
        if (span.add(w)) chains.push_back({std::move(w), k});
      }
    }
    for (const Chain& ch : chains) {
      std::vector<Matrix> chain_cols(ch.length);
      Matrix v = ch.head;
      for (std::size_t i = ch.length; i-- > 0;) {
        chain_cols[i] = v;
        v = nil * v;
      }
      for (Matrix& col : chain_cols) columns.push_back(std::move(col));
    }
  }
  Matrix basis = Matrix::hstack(columns);
  if (basis.cols() != n || !(m * basis == basis * jordan_matrix(structure)) || !inverse(basis)) {
    throw InvariantBreach("jordan_decomposition: constructed basis does not verify");
  }
  return {std::move(structure), std::move(basis)};
}

std::optional<Matrix> similarity_transform(const Matrix& m1, const Matrix& m2,
                                           std::span<const Scalar> eigenvalues) {
  if (!m1.is_square() || !m2.is_square() || m1.rows() != m2.rows()) {
    throw DimensionMismatch("similarity_transform: matrices must be square of equal size");
  }
  if (m1 == m2) return Matrix::identity(m1.rows());
  JordanDecomposition d1 = jordan_decomposition(m1, eigenvalues);
  JordanDecomposition d2 = jordan_decomposition(m2, eigenvalues);
  if (d1.structure != d2.structure) return std::nullopt;
  auto p1_inv = inverse(d1.basis);
  if (!p1_inv) throw InvariantBreach("similarity_transform: Jordan basis not invertible");
  Matrix s = d2.basis * *p1_inv;
  if (!(s * m1 == m2 * s) || !inverse(s)) throw InvariantBreach("similarity_transform: witness does not verify");
  return s;
}

std::vector<Matrix> solve_intertwiner(const Matrix& m1, const Matrix& m2) {
  if (!m1.is_square() || !m2.is_square()) throw DimensionMismatch("solve_intertwiner: square inputs required");
  const std::size_t p = m1.rows();
  const std::size_t q = m2.rows();
  if (p == 0 || q == 0) return {};
  // unknown X(i, j) sits at column i*q + j; equation (i, j) is (M1 X - X M2)(i, j) = 0
  Matrix system(p * q, p * q);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < q; ++j) {
      const std::size_t row = i * q + j;
      for (std::size_t k = 0; k < p; ++k) {
        if (!m1(i, k).is_zero()) system(row, k * q + j) += m1(i, k);
      }
      for (std::size_t k = 0; k < q; ++k) {
        if (!m2(k, j).is_zero()) system(row, i * q + k) -= m2(k, j);
      }
    }
  }
  Matrix kernel = nullspace(system);
  std::vector<Matrix> basis;
  basis.reserve(kernel.cols());
  for (std::size_t b = 0; b < kernel.cols(); ++b) {
    Matrix x(p, q);
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < q; ++j) x(i, j) = kernel(i * q + j, b);
    }
    basis.push_back(std::move(x));
  }
  return basis;
}

IdempotentForm idempotent_normal_form(const Matrix& p) {
  if (!p.is_square() || !(p * p == p)) throw NotIdempotent("idempotent_normal_form: P*P != P");
  const std::size_t n = p.rows();
  RowEchelon e = row_echelon(p);
  std::vector<Matrix> cols;
  cols.reserve(n);
  for (std::size_t c : e.pivots) cols.push_back(p.column(c));
  Matrix kernel = nullspace(p);
  for (std::size_t j = 0; j < kernel.cols(); ++j) cols.push_back(kernel.column(j));
  Matrix q = n == 0 ? Matrix() : Matrix::hstack(cols);
  auto s = inverse(q);
  if (!s) throw InvariantBreach("idempotent_normal_form: range and kernel do not span");
  const std::size_t r = e.pivots.size();
  Matrix d(n, n);
  for (std::size_t i = 0; i < r; ++i) d(i, i) = 1;
  if (!(*s * p == d * *s)) throw InvariantBreach("idempotent_normal_form: S P S^-1 != D");
  return {std::move(*s), std::move(d), r};
}

}  // namespace nnormal
