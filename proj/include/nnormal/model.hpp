#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nnormal/matrix.hpp"
#include "nnormal/measure.hpp"

namespace nnormal {

/// Diagonal entry (i,i) at cell c is c.coordinate.
struct CoordinateDiagonal {
  friend bool operator==(const CoordinateDiagonal&, const CoordinateDiagonal&) = default;
};

using Diagonal = std::variant<CoordinateDiagonal, StepFunction>;

/// 0-based (row, col) with row < col.
using EntryPosition = std::pair<std::size_t, std::size_t>;

/// Upper-triangular n x n matrix of step functions over `support`.
/// Absent strict-upper entries are identically zero.
struct TriangularBlock {
  std::size_t size = 1;
  std::vector<CellId> support;
  std::map<EntryPosition, StepFunction> entries;
  Diagonal diagonal = CoordinateDiagonal{};

  /// Entry value at a support cell (0-based indices; zero when absent).
  Scalar entry(std::size_t row, std::size_t col, const CellId& id) const;
  Matrix fiber(const Cell& cell) const;
  bool covers(const CellId& id) const;

  friend bool operator==(const TriangularBlock&, const TriangularBlock&) = default;
};

struct BlockTerm {
  TriangularBlock block;
  std::size_t multiplicity = 1;

  friend bool operator==(const BlockTerm&, const BlockTerm&) = default;
};

/// Finite direct sum of triangular blocks with multiplicities. Construction
/// checks structure only (V3 plus shapes); V1/V2 are reported by validate()
/// so that raw intermediate sums can be represented.
class OperatorModel {
 public:
  OperatorModel() = default;
  OperatorModel(Partition partition, std::vector<BlockTerm> blocks);

  const Partition& partition() const { return partition_; }
  const std::vector<BlockTerm>& blocks() const { return blocks_; }

  friend bool operator==(const OperatorModel&, const OperatorModel&) = default;

 private:
  Partition partition_;
  std::vector<BlockTerm> blocks_;
};

/// One block with an explicit diagonal f, total on the partition; no SI
/// requirement and f may be non-injective.
class MultiplicityInput {
 public:
  MultiplicityInput() = default;
  MultiplicityInput(Partition partition, TriangularBlock block);

  const Partition& partition() const { return partition_; }
  const TriangularBlock& block() const { return block_; }
  const StepFunction& diagonal() const { return std::get<StepFunction>(block_.diagonal); }

  friend bool operator==(const MultiplicityInput&, const MultiplicityInput&) = default;

 private:
  Partition partition_;
  TriangularBlock block_;
};

enum class Rule { V1, V2, V3 };

struct Violation {
  Rule rule;
  std::size_t block;
  CellId cell;

  friend bool operator==(const Violation&, const Violation&) = default;
};

std::string to_string(Rule r);

/// Either kind of model a file can hold.
using AnyModel = std::variant<OperatorModel, MultiplicityInput>;

/// Exhaustive V1 (vanishing superdiagonal), V2 (overlapping equal-size
/// blocks) and V3 (support outside the partition) violations.
std::vector<Violation> validate(const OperatorModel& a);

/// Position of one block copy inside a fiber.
struct Slot {
  std::size_t block;
  std::size_t copy;
  std::size_t offset;
  std::size_t size;
};

/// Slots of the fiber at a cell, in block order then copy order.
std::vector<Slot> fiber_slots(const OperatorModel& a, std::size_t cell);

/// Block-diagonal fiber at a cell: m copies of each covering block.
Matrix fiber(const OperatorModel& a, std::size_t cell);
Matrix fiber(const MultiplicityInput& a, std::size_t cell);

Matrix assemble(const OperatorModel& a);
Matrix assemble(const MultiplicityInput& a);

/// Sum over the coordinate union of both partitions (A's cells first, weights
/// added on matched cells). Equal-size blocks are merged into a multiplicity
/// sum when their supports coincide and their entries agree; otherwise both
/// are kept and validate() reports V2.
OperatorModel direct_sum(const OperatorModel& a, const OperatorModel& b);

/// The canonical Jordan-type block: superdiagonal identically 1 on support.
TriangularBlock jordan_block(std::size_t size, std::vector<CellId> support);

}  // namespace nnormal
