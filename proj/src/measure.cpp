#include "nnormal/measure.hpp"

#include "nnormal/errors.hpp"

namespace nnormal {

Partition::Partition(std::vector<Cell> cells) : cells_(std::move(cells)) {
  if (cells_.empty()) throw StructureError("partition must contain at least one cell");
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    Cell& c = cells_[i];
    c.weight.canonicalize();
    if (c.id.empty()) throw StructureError("cell id must be nonempty");
    if (sgn(c.weight) <= 0) throw StructureError("cell '" + c.id + "' has non-positive weight");
    if (!by_id_.emplace(c.id, i).second) throw StructureError("duplicate cell id '" + c.id + "'");
    if (!by_coordinate_.emplace(c.coordinate, i).second) {
      throw StructureError("cell '" + c.id + "' repeats coordinate " + to_display(c.coordinate) +
                           "; express coincident atoms as multiplicity");
    }
  }
}

const Cell& Partition::cell(const CellId& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) throw StructureError("unknown cell '" + id + "'");
  return cells_[it->second];
}

std::optional<std::size_t> Partition::index_of(const CellId& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Partition::index_of_coordinate(const Scalar& coordinate) const {
  auto it = by_coordinate_.find(coordinate);
  if (it == by_coordinate_.end()) return std::nullopt;
  return it->second;
}

Rational Partition::total_weight() const {
  Rational total = 0;
  for (const Cell& c : cells_) total += c.weight;
  return total;
}

StepFunction StepFunction::constant(const std::vector<CellId>& domain, const Scalar& value) {
  std::map<CellId, Scalar> values;
  for (const CellId& id : domain) values.emplace(id, value);
  return StepFunction(std::move(values));
}

const Scalar& StepFunction::operator()(const CellId& id) const {
  auto it = values_.find(id);
  if (it == values_.end()) throw StructureError("step function evaluated outside its domain at '" + id + "'");
  return it->second;
}

bool StepFunction::is_zero() const {
  for (const auto& [id, v] : values_) {
    if (!v.is_zero()) return false;
  }
  return true;
}

CommonRefinement refine_common(const Partition& p1, const Partition& p2) {
  CommonRefinement out;
  std::vector<bool> used(p2.size(), false);
  for (std::size_t i = 0; i < p1.size(); ++i) {
    if (auto j = p2.index_of_coordinate(p1[i].coordinate)) {
      out.matched.emplace_back(i, *j);
      used[*j] = true;
    } else {
      out.left_only.push_back(i);
    }
  }
  for (std::size_t j = 0; j < p2.size(); ++j) {
    if (!used[j]) out.right_only.push_back(j);
  }
  return out;
}

Pushforward pushforward(const Partition& p, const StepFunction& f) {
  std::vector<Scalar> values;
  std::vector<Rational> weights;
  std::vector<std::vector<CellId>> fibers;
  std::map<Scalar, std::size_t> slot;
  for (const Cell& c : p.cells()) {
    const Scalar& v = f(c.id);
    auto [it, inserted] = slot.emplace(v, values.size());
    if (inserted) {
      values.push_back(v);
      weights.emplace_back(0);
      fibers.emplace_back();
    }
    weights[it->second] += c.weight;
    fibers[it->second].push_back(c.id);
  }
  std::vector<Cell> cells;
  cells.reserve(values.size());
  std::map<CellId, int> taken;
  for (std::size_t k = 0; k < values.size(); ++k) {
    std::string id;
    for (const CellId& src : fibers[k]) id += (id.empty() ? "" : "+") + src;
    // ids such as "a+b" may already exist as a single source id
    if (int n = taken[id]++; n > 0) id += "#" + std::to_string(k);
    cells.push_back(Cell{std::move(id), values[k], weights[k]});
  }
  return Pushforward{Partition(std::move(cells)), std::move(fibers)};
}

}  // namespace nnormal
