#pragma once

#include <string>
#include <vector>

#include "nnormal/model.hpp"

namespace nnormal::testing {

inline Partition line(const std::vector<long>& coords, const std::string& prefix = "l") {
  std::vector<Cell> cells;
  for (long c : coords) cells.push_back({prefix + std::to_string(c), Scalar(c), 1});
  return Partition(std::move(cells));
}

inline std::vector<CellId> ids(const Partition& p) {
  std::vector<CellId> out;
  for (const Cell& c : p.cells()) out.push_back(c.id);
  return out;
}

/// [[N, I], [0, N]]: superdiagonal 1.
inline OperatorModel x_model(const Partition& p) {
  return OperatorModel(p, {{jordan_block(2, ids(p)), 1}});
}

/// [[N, N], [0, N]]: superdiagonal equal to the coordinate.
inline OperatorModel y_model(const Partition& p) {
  TriangularBlock b;
  b.size = 2;
  b.support = ids(p);
  std::map<CellId, Scalar> v;
  for (const Cell& c : p.cells()) v.emplace(c.id, c.coordinate);
  b.entries.emplace(EntryPosition{0, 1}, StepFunction(std::move(v)));
  return OperatorModel(p, {{std::move(b), 1}});
}

/// Canonical blocks of sizes n1 > n2 > n3 with multiplicities m1..m3 on every cell.
inline OperatorModel three_block(const Partition& p, std::size_t n1, std::size_t m1, std::size_t n2, std::size_t m2,
                                 std::size_t n3, std::size_t m3) {
  return OperatorModel(p, {{jordan_block(n1, ids(p)), m1}, {jordan_block(n2, ids(p)), m2}, {jordan_block(n3, ids(p)), m3}});
}

inline OperatorModel single(const Partition& p, std::size_t n, std::size_t m) {
  return OperatorModel(p, {{jordan_block(n, ids(p)), m}});
}

}  // namespace nnormal::testing
