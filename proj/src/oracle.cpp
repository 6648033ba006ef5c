#include "nnormal/oracle.hpp"

#include <set>

#include "nnormal/linalg.hpp"

namespace nnormal {

namespace {

Matrix raw_fiber(const OperatorModel& a, const Cell& c) {
  std::size_t d = 0;
  for (const BlockTerm& t : a.blocks()) {
    for (const CellId& id : t.block.support) {
      if (id == c.id) d += t.block.size * t.multiplicity;
    }
  }
  Matrix m(d, d);
  std::size_t off = 0;
  for (const BlockTerm& t : a.blocks()) {
    bool covered = false;
    for (const CellId& id : t.block.support) covered = covered || id == c.id;
    if (!covered) continue;
    for (std::size_t k = 0; k < t.multiplicity; ++k) {
      for (std::size_t i = 0; i < t.block.size; ++i) m(off + i, off + i) = c.coordinate;
      for (const auto& [pos, f] : t.block.entries) m(off + pos.first, off + pos.second) = f.values().at(c.id);
      off += t.block.size;
    }
  }
  return m;
}

Matrix raw_fiber(const MultiplicityInput& a, const Cell& c) {
  const TriangularBlock& b = a.block();
  Matrix m(b.size, b.size);
  const Scalar d = std::get<StepFunction>(b.diagonal).values().at(c.id);
  for (std::size_t i = 0; i < b.size; ++i) m(i, i) = d;
  for (const auto& [pos, f] : b.entries) m(pos.first, pos.second) = f.values().at(c.id);
  return m;
}

template <class M>
Matrix assemble_cells(const M& a) {
  std::vector<Matrix> parts;
  for (const Cell& c : a.partition().cells()) parts.push_back(raw_fiber(a, c));
  return Matrix::direct_sum(parts);
}

}  // namespace

Matrix oracle_assemble(const AnyModel& m) {
  return std::visit([](const auto& x) { return assemble_cells(x); }, m);
}

bool oracle_similar(const AnyModel& a, const AnyModel& b) {
  const Matrix ma = oracle_assemble(a);
  const Matrix mb = oracle_assemble(b);
  if (ma.rows() != mb.rows()) return false;
  std::set<Scalar> eig;
  for (const Scalar& v : diagonal_values(ma)) eig.insert(v);
  for (const Scalar& v : diagonal_values(mb)) eig.insert(v);
  const std::vector<Scalar> list(eig.begin(), eig.end());
  return jordan_structure(ma, list) == jordan_structure(mb, list);
}

std::vector<OracleCellDim> oracle_intertwiner_dim(const OperatorModel& a, const OperatorModel& b) {
  std::vector<Scalar> coords;
  std::set<Scalar> seen;
  for (const Cell& c : a.partition().cells()) {
    if (seen.insert(c.coordinate).second) coords.push_back(c.coordinate);
  }
  for (const Cell& c : b.partition().cells()) {
    if (seen.insert(c.coordinate).second) coords.push_back(c.coordinate);
  }
  auto fiber_at = [](const OperatorModel& m, const Scalar& coord) {
    for (const Cell& c : m.partition().cells()) {
      if (c.coordinate == coord) return raw_fiber(m, c);
    }
    return Matrix();
  };
  std::vector<OracleCellDim> out;
  for (const Scalar& coord : coords) {
    const Matrix fa = fiber_at(a, coord);
    const Matrix fb = fiber_at(b, coord);
    const std::size_t p = fa.rows();
    const std::size_t q = fb.rows();
    if (p == 0 || q == 0) {
      out.push_back({coord, 0});
      continue;
    }
    // column-major vec: vec(fA X - X fB) = (I_q (x) fA - fB^T (x) I_p) vec(X)
    Matrix k(p * q, p * q);
    for (std::size_t bj = 0; bj < q; ++bj) {
      for (std::size_t bi = 0; bi < q; ++bi) {
        for (std::size_t r = 0; r < p; ++r) {
          for (std::size_t s = 0; s < p; ++s) {
            Scalar v;
            if (bi == bj) v += fa(r, s);
            if (r == s) v -= fb(bj, bi);
            k(bi * p + r, bj * p + s) = v;
          }
        }
      }
    }
    out.push_back({coord, p * q - rank(k)});
  }
  return out;
}

}  // namespace nnormal
