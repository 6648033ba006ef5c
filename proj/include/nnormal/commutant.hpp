#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "nnormal/matrix.hpp"
#include "nnormal/model.hpp"

namespace nnormal {

using ModelRef = std::shared_ptr<const OperatorModel>;

/// Shares a model that passes validate(); throws StructureError otherwise.
ModelRef share_valid(OperatorModel a);

/// Element of {A}': one matrix per cell of A's partition, each commuting
/// with the fiber of A there. Commutation is checked on construction.
class CommutantElement {
 public:
  CommutantElement(ModelRef owner, std::vector<Matrix> fibers);

  static CommutantElement identity(ModelRef owner);
  static CommutantElement zero(ModelRef owner);

  const OperatorModel& owner() const { return *owner_; }
  const ModelRef& owner_ref() const { return owner_; }
  const std::vector<Matrix>& fibers() const { return fibers_; }
  const Matrix& at(std::size_t cell) const { return fibers_[cell]; }

  bool is_zero() const;
  bool is_idempotent() const;

  CommutantElement& operator+=(const CommutantElement& o);
  CommutantElement& operator-=(const CommutantElement& o);
  CommutantElement& operator*=(const Scalar& s);

  friend CommutantElement operator+(CommutantElement a, const CommutantElement& b) { return a += b; }
  friend CommutantElement operator-(CommutantElement a, const CommutantElement& b) { return a -= b; }
  friend CommutantElement operator*(CommutantElement a, const Scalar& s) { return a *= s; }
  friend CommutantElement operator*(const CommutantElement& a, const CommutantElement& b);

  friend bool operator==(const CommutantElement& a, const CommutantElement& b) { return a.fibers_ == b.fibers_; }

 private:
  struct Trusted {};
  CommutantElement(Trusted, ModelRef owner, std::vector<Matrix> fibers)
      : owner_(std::move(owner)), fibers_(std::move(fibers)) {}
  void require_same_owner(const CommutantElement& o) const;

  ModelRef owner_;
  std::vector<Matrix> fibers_;
};

/// Fiberwise inverse, or nullopt when some fiber is singular.
std::optional<CommutantElement> inverse(const CommutantElement& x);

struct IntertwinerCell {
  CellId a_cell;  // empty when the coordinate is absent from A
  CellId b_cell;  // empty when the coordinate is absent from B
  Scalar coordinate;
  std::vector<Matrix> basis;  // n_a x n_b solutions of fA X = X fB
  bool pattern_ok = true;
};

/// Solutions of A X = X B for single-block, multiplicity-one models, cell by
/// cell over the coordinate union (A's cells first). The pattern check asks
/// for [X1; 0] when A's block is larger, [0, Y1] when it is smaller, and an
/// upper-triangular X1 / Y1 / X in every case.
struct IntertwinerReport {
  std::size_t a_size = 0;
  std::size_t b_size = 0;
  std::vector<IntertwinerCell> cells;

  bool pattern_ok() const;
};

IntertwinerReport intertwiner_basis(const OperatorModel& a, const OperatorModel& b);

/// Elements supported on a single cell, spanning {A}' cell by cell.
struct CommutantBasis {
  std::vector<CommutantElement> elements;
  std::vector<std::size_t> dimension;  // per cell
};

CommutantBasis commutant_basis(const ModelRef& a);

/// Keeps, per cell and block, the constant diagonal of each copy-to-copy
/// sub-block: pi(x) = sum_i b_i (x) I_{n_i}, copies outer.
CommutantElement semisimple_projection(const CommutantElement& x);
bool is_radical(const CommutantElement& x);

/// values[cell][block] = Tr(class compression) / n_block; zero off support.
struct TraceVector {
  std::vector<std::vector<Rational>> values;

  friend bool operator==(const TraceVector&, const TraceVector&) = default;
};

/// Throws NotIdempotent unless p*p == p.
TraceVector trace_r(const CommutantElement& p);

/// P_{copy;block}: identity on that copy's slot wherever the block lives.
CommutantElement standard_idempotent(const ModelRef& a, std::size_t block, std::size_t copy);

struct SkeletonEntry {
  std::size_t block;
  std::size_t copy;
  CommutantElement element;
};

class StandardFamily {
 public:
  explicit StandardFamily(ModelRef owner);

  const ModelRef& owner() const { return owner_; }
  const std::vector<SkeletonEntry>& skeleton() const { return skeleton_; }
  std::vector<CommutantElement> members() const;
  /// Per cell, every copy slot is the full identity or zero and nothing
  /// else is nonzero.
  bool contains(const CommutantElement& x) const;
  std::vector<Matrix> lattice_at(std::size_t cell) const;

 private:
  ModelRef owner_;
  std::vector<SkeletonEntry> skeleton_;
};

/// Fibers at one cell of every 0/1 combination of the family's minimal
/// products.
std::vector<Matrix> lattice_at(const std::vector<CommutantElement>& family, std::size_t cell);

/// Same elements regardless of order.
bool same_set(const std::vector<Matrix>& x, const std::vector<Matrix>& y);

struct Normalization {
  CommutantElement transform;
  CommutantElement inverse;
  CommutantElement normal;
};

/// transform * p * inverse == normal, where normal holds the first r_i
/// copies of each block at each cell.
Normalization normalize_idempotent(const CommutantElement& p);

struct Skeleton {
  std::vector<SkeletonEntry> entries;  // by block, then copy
};

struct NotMaximal {
  CommutantElement witness;
  std::vector<CellId> cells;  // cells where the family is too coarse
};

std::variant<Skeleton, NotMaximal> extract_skeleton(const ModelRef& a, const std::vector<CommutantElement>& family);

struct Standardization {
  CommutantElement transform;
  CommutantElement inverse;
  std::vector<CommutantElement> image;  // transform * member * inverse, family order
};

/// Throws StructureError when the family is not maximal abelian.
Standardization standardize_family(const ModelRef& a, const std::vector<CommutantElement>& family);

}  // namespace nnormal
