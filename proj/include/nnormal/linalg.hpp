#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "nnormal/matrix.hpp"

namespace nnormal {

/// Reduced row echelon form with the pivot column of each nonzero row.
struct RowEchelon {
  Matrix reduced;
  std::vector<std::size_t> pivots;
};

/// Gauss-Jordan elimination over Q(i). The pivot in each column is the first
/// nonzero entry at or below the current row; no magnitude heuristics.
RowEchelon row_echelon(Matrix m);

std::size_t rank(const Matrix& m);

/// Columns form a basis of {x : m x = 0}; one column per free variable,
/// with that variable set to 1.
Matrix nullspace(const Matrix& m);

std::optional<Matrix> inverse(const Matrix& m);

Matrix power(const Matrix& m, std::size_t k);

/// Eigenvalue -> Jordan block sizes, sorted descending.
using JordanStructure = std::map<Scalar, std::vector<std::size_t>>;

/// Block sizes from the rank sequence r_k = rank((M - cI)^k): the number of
/// blocks of size >= k is r_{k-1} - r_k. Values in `eigenvalues` that are not
/// eigenvalues contribute nothing. Throws DimensionMismatch when the list is
/// not exhaustive.
JordanStructure jordan_structure(const Matrix& m, std::span<const Scalar> eigenvalues);

/// The upper-triangular Jordan matrix (ones on the superdiagonal) of a
/// structure, eigenvalues ascending and sizes descending.
Matrix jordan_matrix(const JordanStructure& s);

/// P with P^{-1} M P = jordan_matrix(jordan_structure(M)).
struct JordanDecomposition {
  JordanStructure structure;
  Matrix basis;
};

JordanDecomposition jordan_decomposition(const Matrix& m, std::span<const Scalar> eigenvalues);

/// Invertible S with S M1 S^{-1} = M2, or nullopt when the Jordan structures
/// differ. The returned S is verified before it is returned.
std::optional<Matrix> similarity_transform(const Matrix& m1, const Matrix& m2,
                                           std::span<const Scalar> eigenvalues);

/// Basis of {X : M1 X = X M2} for square M1 (p x p) and M2 (q x q).
std::vector<Matrix> solve_intertwiner(const Matrix& m1, const Matrix& m2);

/// S P S^{-1} = D = diag(1,...,1,0,...,0) for an idempotent P.
struct IdempotentForm {
  Matrix transform;
  Matrix normal;
  std::size_t rank = 0;
};

IdempotentForm idempotent_normal_form(const Matrix& p);

/// Distinct diagonal entries, ascending.
std::vector<Scalar> diagonal_values(const Matrix& m);

}  // namespace nnormal
