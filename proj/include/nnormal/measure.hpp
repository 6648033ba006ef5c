#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nnormal/scalar.hpp"

namespace nnormal {

using CellId = std::string;

/// An atom of the spectral measure: a point `coordinate` carrying mass `weight`.
struct Cell {
  CellId id;
  Scalar coordinate;
  Rational weight{1};

  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Finite atomic measure. Cells keep their input order; ids and coordinates
/// are pairwise distinct and every weight is positive.
class Partition {
 public:
  Partition() = default;
  explicit Partition(std::vector<Cell> cells);

  const std::vector<Cell>& cells() const { return cells_; }
  std::size_t size() const { return cells_.size(); }
  const Cell& operator[](std::size_t i) const { return cells_[i]; }
  const Cell& cell(const CellId& id) const;

  std::optional<std::size_t> index_of(const CellId& id) const;
  std::optional<std::size_t> index_of_coordinate(const Scalar& coordinate) const;
  bool contains(const CellId& id) const { return index_of(id).has_value(); }
  Rational total_weight() const;

  friend bool operator==(const Partition& a, const Partition& b) { return a.cells_ == b.cells_; }

 private:
  std::vector<Cell> cells_;
  std::map<CellId, std::size_t> by_id_;
  std::map<Scalar, std::size_t> by_coordinate_;
};

/// Element of L-infinity of the measure: a value on each cell of its domain.
/// Evaluating outside the domain is an error.
class StepFunction {
 public:
  StepFunction() = default;
  explicit StepFunction(std::map<CellId, Scalar> values) : values_(std::move(values)) {}

  static StepFunction constant(const std::vector<CellId>& domain, const Scalar& value);

  const Scalar& operator()(const CellId& id) const;
  bool defined_at(const CellId& id) const { return values_.count(id) != 0; }
  const std::map<CellId, Scalar>& values() const { return values_; }
  bool is_zero() const;

  friend bool operator==(const StepFunction&, const StepFunction&) = default;

 private:
  std::map<CellId, Scalar> values_;
};

/// Cells of two partitions matched by equal coordinate (weights ignored).
struct CommonRefinement {
  std::vector<std::pair<std::size_t, std::size_t>> matched;  // (index in p1, index in p2)
  std::vector<std::size_t> left_only;
  std::vector<std::size_t> right_only;
};

CommonRefinement refine_common(const Partition& p1, const Partition& p2);

/// Image measure of a partition under a total step function.
struct Pushforward {
  Partition image;
  /// fibers[k] lists the source cells mapped to image cell k, in source order.
  std::vector<std::vector<CellId>> fibers;

  std::size_t multiplicity(std::size_t k) const { return fibers[k].size(); }
};

/// Image cells appear in order of first occurrence; an image cell's id is the
/// '+'-joined ids of its preimages.
Pushforward pushforward(const Partition& p, const StepFunction& f);

}  // namespace nnormal
