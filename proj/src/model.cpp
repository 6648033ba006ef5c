#include "nnormal/model.hpp"

#include <algorithm>
#include <set>

#include "nnormal/errors.hpp"

namespace nnormal {

namespace {

// Orders support cells by partition order (unknown ids last, kept for V3),
// checks entry shapes and drops identically-zero entries.
void normalize_block(TriangularBlock& b, const Partition& p, const std::string& where) {
  if (b.size == 0) throw StructureError(where + ": block size must be >= 1");
  if (b.support.empty()) throw StructureError(where + ": support must be nonempty");
  std::set<CellId> seen;
  for (const CellId& id : b.support) {
    if (!seen.insert(id).second) throw StructureError(where + ": support lists '" + id + "' twice");
  }
  std::stable_sort(b.support.begin(), b.support.end(), [&](const CellId& x, const CellId& y) {
    auto ix = p.index_of(x);
    auto iy = p.index_of(y);
    if (ix && iy) return *ix < *iy;
    return ix.has_value() && !iy.has_value();
  });
  for (auto it = b.entries.begin(); it != b.entries.end();) {
    const auto [row, col] = it->first;
    const std::string pos = "(" + std::to_string(row + 1) + "," + std::to_string(col + 1) + ")";
    if (row >= col) throw StructureError(where + ": entry " + pos + " is not strictly upper triangular");
    if (col >= b.size) throw StructureError(where + ": entry " + pos + " exceeds block size");
    const auto& values = it->second.values();
    for (const CellId& id : b.support) {
      if (!values.count(id)) throw StructureError(where + ": entry " + pos + " undefined at support cell '" + id + "'");
    }
    if (values.size() != b.support.size()) {
      throw StructureError(where + ": entry " + pos + " defined outside the block support");
    }
    it = it->second.is_zero() ? b.entries.erase(it) : std::next(it);
  }
}

std::string block_label(std::size_t i) { return "block " + std::to_string(i); }

}  // namespace

Scalar TriangularBlock::entry(std::size_t row, std::size_t col, const CellId& id) const {
  auto it = entries.find({row, col});
  if (it == entries.end()) return Scalar();
  return it->second(id);
}

bool TriangularBlock::covers(const CellId& id) const {
  return std::find(support.begin(), support.end(), id) != support.end();
}

Matrix TriangularBlock::fiber(const Cell& cell) const {
  Matrix m(size, size);
  const Scalar d = std::holds_alternative<CoordinateDiagonal>(diagonal)
                       ? cell.coordinate
                       : std::get<StepFunction>(diagonal)(cell.id);
  for (std::size_t i = 0; i < size; ++i) m(i, i) = d;
  for (const auto& [pos, f] : entries) m(pos.first, pos.second) = f(cell.id);
  return m;
}

OperatorModel::OperatorModel(Partition partition, std::vector<BlockTerm> blocks)
    : partition_(std::move(partition)), blocks_(std::move(blocks)) {
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    BlockTerm& t = blocks_[i];
    if (t.multiplicity == 0) throw StructureError(block_label(i) + ": multiplicity must be >= 1");
    if (!std::holds_alternative<CoordinateDiagonal>(t.block.diagonal)) {
      throw StructureError(block_label(i) + ": operator blocks must use the coordinate diagonal");
    }
    normalize_block(t.block, partition_, block_label(i));
  }
}

MultiplicityInput::MultiplicityInput(Partition partition, TriangularBlock block)
    : partition_(std::move(partition)), block_(std::move(block)) {
  std::vector<CellId> all;
  for (const Cell& c : partition_.cells()) all.push_back(c.id);
  if (block_.support.empty()) block_.support = all;
  const auto* f = std::get_if<StepFunction>(&block_.diagonal);
  if (f == nullptr) throw StructureError("multiplicity input: diagonal must be an explicit step function");
  normalize_block(block_, partition_, "multiplicity input");
  if (block_.support != all) throw StructureError("multiplicity input: support must be every cell");
  for (const CellId& id : all) {
    if (!f->defined_at(id)) throw StructureError("multiplicity input: diagonal undefined at '" + id + "'");
  }
  if (f->values().size() != all.size()) throw StructureError("multiplicity input: diagonal defined outside the partition");
}

std::string to_string(Rule r) {
  switch (r) {
    case Rule::V1: return "V1";
    case Rule::V2: return "V2";
    case Rule::V3: return "V3";
  }
  return "?";
}

std::vector<Violation> validate(const OperatorModel& a) {
  std::vector<Violation> out;
  const auto& blocks = a.blocks();
  for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
    const TriangularBlock& b = blocks[bi].block;
    for (const CellId& id : b.support) {
      if (!a.partition().contains(id)) out.push_back({Rule::V3, bi, id});
    }
    for (const CellId& id : b.support) {
      if (!a.partition().contains(id)) continue;
      for (std::size_t i = 0; i + 1 < b.size; ++i) {
        if (b.entry(i, i + 1, id).is_zero()) {
          out.push_back({Rule::V1, bi, id});
          break;
        }
      }
    }
    for (std::size_t bj = 0; bj < bi; ++bj) {
      const TriangularBlock& other = blocks[bj].block;
      if (other.size != b.size) continue;
      for (const CellId& id : b.support) {
        if (other.covers(id)) out.push_back({Rule::V2, bi, id});
      }
    }
  }
  return out;
}

std::vector<Slot> fiber_slots(const OperatorModel& a, std::size_t cell) {
  std::vector<Slot> slots;
  const CellId& id = a.partition()[cell].id;
  std::size_t offset = 0;
  for (std::size_t bi = 0; bi < a.blocks().size(); ++bi) {
    const BlockTerm& t = a.blocks()[bi];
    if (!t.block.covers(id)) continue;
    for (std::size_t c = 0; c < t.multiplicity; ++c) {
      slots.push_back({bi, c, offset, t.block.size});
      offset += t.block.size;
    }
  }
  return slots;
}

Matrix fiber(const OperatorModel& a, std::size_t cell) {
  const Cell& c = a.partition()[cell];
  std::vector<Matrix> parts;
  for (const BlockTerm& t : a.blocks()) {
    if (!t.block.covers(c.id)) continue;
    Matrix f = t.block.fiber(c);
    for (std::size_t k = 0; k < t.multiplicity; ++k) parts.push_back(f);
  }
  return Matrix::direct_sum(parts);
}

Matrix fiber(const MultiplicityInput& a, std::size_t cell) { return a.block().fiber(a.partition()[cell]); }

Matrix assemble(const OperatorModel& a) {
  std::vector<Matrix> parts;
  for (std::size_t i = 0; i < a.partition().size(); ++i) parts.push_back(fiber(a, i));
  return Matrix::direct_sum(parts);
}

Matrix assemble(const MultiplicityInput& a) {
  std::vector<Matrix> parts;
  for (std::size_t i = 0; i < a.partition().size(); ++i) parts.push_back(fiber(a, i));
  return Matrix::direct_sum(parts);
}

OperatorModel direct_sum(const OperatorModel& a, const OperatorModel& b) {
  std::vector<Cell> cells = a.partition().cells();
  std::set<CellId> ids;
  for (const Cell& c : cells) ids.insert(c.id);
  std::map<CellId, CellId> rename;  // b id -> union id
  for (const Cell& c : b.partition().cells()) {
    if (auto i = a.partition().index_of_coordinate(c.coordinate)) {
      cells[*i].weight += c.weight;
      rename[c.id] = cells[*i].id;
      continue;
    }
    CellId id = c.id;
    while (ids.count(id)) id += "'";
    ids.insert(id);
    rename[c.id] = id;
    cells.push_back(Cell{id, c.coordinate, c.weight});
  }
  auto mapped = [&](const CellId& id) {
    auto it = rename.find(id);
    return it == rename.end() ? id : it->second;
  };

  std::vector<BlockTerm> blocks = a.blocks();
  for (const BlockTerm& t : b.blocks()) {
    BlockTerm moved{TriangularBlock{t.block.size, {}, {}, CoordinateDiagonal{}}, t.multiplicity};
    for (const CellId& id : t.block.support) moved.block.support.push_back(mapped(id));
    for (const auto& [pos, f] : t.block.entries) {
      std::map<CellId, Scalar> values;
      for (const auto& [id, v] : f.values()) values.emplace(mapped(id), v);
      moved.block.entries.emplace(pos, StepFunction(std::move(values)));
    }
    blocks.push_back(std::move(moved));
  }
  Partition p(std::move(cells));
  // normalization orders supports, which merging below relies on
  OperatorModel raw(p, std::move(blocks));

  std::vector<BlockTerm> merged;
  for (const BlockTerm& t : raw.blocks()) {
    auto same = std::find_if(merged.begin(), merged.end(), [&](const BlockTerm& m) { return m.block == t.block; });
    if (same != merged.end()) {
      same->multiplicity += t.multiplicity;
    } else {
      merged.push_back(t);
    }
  }
  return OperatorModel(std::move(p), std::move(merged));
}

TriangularBlock jordan_block(std::size_t size, std::vector<CellId> support) {
  TriangularBlock b;
  b.size = size;
  for (std::size_t i = 0; i + 1 < size; ++i) b.entries.emplace(EntryPosition{i, i + 1}, StepFunction::constant(support, 1));
  b.support = std::move(support);
  return b;
}

}  // namespace nnormal
