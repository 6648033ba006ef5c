#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "nnormal/matrix.hpp"
#include "nnormal/model.hpp"

namespace nnormal {

/// The whole finite operator, fibers placed block-diagonally in partition
/// order. Built directly from the blocks, independent of model::assemble.
Matrix oracle_assemble(const AnyModel& m);

/// Similarity of the assembled matrices, decided by comparing Jordan
/// structures over the union of both diagonals.
bool oracle_similar(const AnyModel& a, const AnyModel& b);

struct OracleCellDim {
  Scalar coordinate;
  std::size_t dim;
};

/// Per coordinate of the union (A's cells first): dim {X : fA X = X fB},
/// from the rank of the Kronecker system I (x) fA - fB^T (x) I.
std::vector<OracleCellDim> oracle_intertwiner_dim(const OperatorModel& a, const OperatorModel& b);

}  // namespace nnormal
