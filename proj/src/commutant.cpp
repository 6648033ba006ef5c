#include "nnormal/commutant.hpp"

#include <algorithm>
#include <map>

#include "nnormal/errors.hpp"
#include "nnormal/linalg.hpp"

namespace nnormal {

namespace {

std::size_t fiber_dim(const OperatorModel& a, std::size_t cell) {
  std::size_t d = 0;
  for (const Slot& s : fiber_slots(a, cell)) d += s.size;
  return d;
}

std::vector<Matrix> zero_fibers(const OperatorModel& a) {
  std::vector<Matrix> out;
  for (std::size_t c = 0; c < a.partition().size(); ++c) {
    const std::size_t d = fiber_dim(a, c);
    out.emplace_back(d, d);
  }
  return out;
}

// Class traces Tr(compression to block i) / n_i at one cell.
std::vector<Rational> class_traces(const OperatorModel& a, std::size_t cell, const Matrix& m) {
  std::vector<Rational> r(a.blocks().size(), 0);
  std::vector<Rational> im(a.blocks().size(), 0);
  for (const Slot& s : fiber_slots(a, cell)) {
    for (std::size_t k = 0; k < s.size; ++k) {
      const Scalar& v = m(s.offset + k, s.offset + k);
      r[s.block] += v.re();
      im[s.block] += v.im();
    }
  }
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (im[i] != 0) throw InvariantBreach("class trace of an idempotent is not real");
    r[i] /= Rational(static_cast<long>(a.blocks()[i].block.size));
    r[i].canonicalize();
  }
  return r;
}

// Minimal nonzero products of a commuting idempotent family at one cell.
std::vector<Matrix> atoms_at(const std::vector<CommutantElement>& family, std::size_t cell, std::size_t dim) {
  std::vector<Matrix> atoms;
  if (dim == 0) return atoms;
  atoms.push_back(Matrix::identity(dim));
  const Matrix id = Matrix::identity(dim);
  for (const CommutantElement& q : family) {
    const Matrix& qc = q.at(cell);
    std::vector<Matrix> next;
    for (const Matrix& a : atoms) {
      Matrix in = a * qc;
      Matrix out = a * (id - qc);
      if (!in.is_zero()) next.push_back(std::move(in));
      if (!out.is_zero()) next.push_back(std::move(out));
    }
    atoms = std::move(next);
  }
  return atoms;
}

std::size_t first_nonzero_row(const Matrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (!m(i, j).is_zero()) return i;
    }
  }
  return m.rows();
}

bool entrywise_less(const Matrix& x, const Matrix& y) {
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      auto c = x(i, j) <=> y(i, j);
      if (c != 0) return c < 0;
    }
  }
  return false;
}

bool slot_is(const Matrix& m, const Slot& s, bool identity) {
  for (std::size_t k = 0; k < s.size; ++k) {
    const Scalar& v = m(s.offset + k, s.offset + k);
    if (identity ? !v.is_one() : !v.is_zero()) return false;
  }
  return true;
}

bool already_standard(const Matrix& b) {
  for (std::size_t i = 0; i < b.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      const Scalar& v = b(i, j);
      if (i != j ? !v.is_zero() : !(v.is_zero() || v.is_one())) return false;
    }
  }
  return true;
}

// Matrix with `slot` rows/cols carrying the identity.
Matrix slot_identity(std::size_t dim, const Slot& s) {
  Matrix m(dim, dim);
  for (std::size_t k = 0; k < s.size; ++k) m(s.offset + k, s.offset + k) = 1;
  return m;
}

bool upper_triangular_part(const Matrix& x, std::size_t r0, std::size_t c0, std::size_t n) {
  return x.block(r0, c0, n, n).is_upper_triangular();
}

bool intertwiner_pattern(const Matrix& x, std::size_t na, std::size_t nb) {
  if (na == nb) return x.is_upper_triangular();
  if (na > nb) return x.block(nb, 0, na - nb, nb).is_zero() && upper_triangular_part(x, 0, 0, nb);
  return x.block(0, 0, na, nb - na).is_zero() && upper_triangular_part(x, 0, nb - na, na);
}

const TriangularBlock& single_block(const OperatorModel& m, const char* which) {
  if (m.blocks().size() != 1 || m.blocks().front().multiplicity != 1) {
    throw StructureError(std::string("intertwiners: model ") + which + " must have one block of multiplicity 1");
  }
  for (const Violation& v : validate(m)) {
    if (v.rule == Rule::V3) throw StructureError(std::string("intertwiners: model ") + which + " refers to unknown cell '" + v.cell + "'");
  }
  return m.blocks().front().block;
}

Matrix block_fiber_at(const OperatorModel& m, const TriangularBlock& b, std::size_t cell) {
  const Cell& c = m.partition()[cell];
  return b.covers(c.id) ? b.fiber(c) : Matrix();
}

// Per cell, swaps copy j of `block` with the copy that `normal` occupies.
CommutantElement swap_copies(const ModelRef& a, std::size_t block, const CommutantElement& normal, std::size_t j) {
  std::vector<Matrix> f;
  for (std::size_t c = 0; c < a->partition().size(); ++c) {
    auto slots = fiber_slots(*a, c);
    const std::size_t d = fiber_dim(*a, c);
    Matrix m = Matrix::identity(d);
    const Slot* s0 = nullptr;
    const Slot* sj = nullptr;
    for (const Slot& s : slots) {
      if (s.block != block) continue;
      if (!s0 && slot_is(normal.at(c), s, true)) s0 = &s;
      if (s.copy == j) sj = &s;
    }
    if (s0 && sj && s0 != sj) {
      for (std::size_t k = 0; k < s0->size; ++k) {
        m(s0->offset + k, s0->offset + k) = 0;
        m(sj->offset + k, sj->offset + k) = 0;
        m(s0->offset + k, sj->offset + k) = 1;
        m(sj->offset + k, s0->offset + k) = 1;
      }
    }
    f.push_back(std::move(m));
  }
  return CommutantElement(a, std::move(f));
}

}  // namespace

ModelRef share_valid(OperatorModel a) {
  if (auto v = validate(a); !v.empty()) {
    throw StructureError("commutant needs a valid model; first violation " + to_string(v.front().rule) + " at block " +
                         std::to_string(v.front().block) + ", cell '" + v.front().cell + "'");
  }
  return std::make_shared<const OperatorModel>(std::move(a));
}

CommutantElement::CommutantElement(ModelRef owner, std::vector<Matrix> fibers)
    : owner_(std::move(owner)), fibers_(std::move(fibers)) {
  if (!owner_) throw StructureError("commutant element without owner model");
  if (fibers_.size() != owner_->partition().size()) {
    throw DimensionMismatch("commutant element needs one matrix per cell");
  }
  for (std::size_t c = 0; c < fibers_.size(); ++c) {
    Matrix f = fiber(*owner_, c);
    const Matrix& x = fibers_[c];
    const std::string& id = owner_->partition()[c].id;
    if (x.rows() != f.rows() || x.cols() != f.cols()) {
      throw DimensionMismatch("matrix at cell '" + id + "' is " + std::to_string(x.rows()) + "x" +
                              std::to_string(x.cols()) + ", fiber is " + std::to_string(f.rows()) + "x" +
                              std::to_string(f.cols()));
    }
    if (!(f * x == x * f)) throw NotInCommutant("matrix at cell '" + id + "' does not commute with the fiber");
  }
}

CommutantElement CommutantElement::identity(ModelRef owner) {
  std::vector<Matrix> f;
  for (std::size_t c = 0; c < owner->partition().size(); ++c) f.push_back(Matrix::identity(fiber_dim(*owner, c)));
  return CommutantElement(Trusted{}, std::move(owner), std::move(f));
}

CommutantElement CommutantElement::zero(ModelRef owner) {
  auto f = zero_fibers(*owner);
  return CommutantElement(Trusted{}, std::move(owner), std::move(f));
}

bool CommutantElement::is_zero() const {
  return std::all_of(fibers_.begin(), fibers_.end(), [](const Matrix& m) { return m.is_zero(); });
}

bool CommutantElement::is_idempotent() const {
  return std::all_of(fibers_.begin(), fibers_.end(), [](const Matrix& m) { return m * m == m; });
}

void CommutantElement::require_same_owner(const CommutantElement& o) const {
  if (owner_ != o.owner_ && !(*owner_ == *o.owner_)) {
    throw DimensionMismatch("commutant elements belong to different models");
  }
}

CommutantElement& CommutantElement::operator+=(const CommutantElement& o) {
  require_same_owner(o);
  for (std::size_t c = 0; c < fibers_.size(); ++c) fibers_[c] += o.fibers_[c];
  return *this;
}

CommutantElement& CommutantElement::operator-=(const CommutantElement& o) {
  require_same_owner(o);
  for (std::size_t c = 0; c < fibers_.size(); ++c) fibers_[c] -= o.fibers_[c];
  return *this;
}

CommutantElement& CommutantElement::operator*=(const Scalar& s) {
  for (Matrix& m : fibers_) m *= s;
  return *this;
}

CommutantElement operator*(const CommutantElement& a, const CommutantElement& b) {
  a.require_same_owner(b);
  std::vector<Matrix> f;
  f.reserve(a.fibers_.size());
  for (std::size_t c = 0; c < a.fibers_.size(); ++c) f.push_back(a.fibers_[c] * b.fibers_[c]);
  return CommutantElement(CommutantElement::Trusted{}, a.owner_, std::move(f));
}

std::optional<CommutantElement> inverse(const CommutantElement& x) {
  std::vector<Matrix> f;
  for (const Matrix& m : x.fibers()) {
    auto inv = inverse(m);
    if (!inv) return std::nullopt;
    f.push_back(std::move(*inv));
  }
  return CommutantElement(x.owner_ref(), std::move(f));
}

bool IntertwinerReport::pattern_ok() const {
  return std::all_of(cells.begin(), cells.end(), [](const IntertwinerCell& c) { return c.pattern_ok; });
}

IntertwinerReport intertwiner_basis(const OperatorModel& a, const OperatorModel& b) {
  const TriangularBlock& ba = single_block(a, "A");
  const TriangularBlock& bb = single_block(b, "B");
  IntertwinerReport report{ba.size, bb.size, {}};
  const CommonRefinement rc = refine_common(a.partition(), b.partition());
  std::map<std::size_t, std::size_t> match(rc.matched.begin(), rc.matched.end());

  for (std::size_t i = 0; i < a.partition().size(); ++i) {
    IntertwinerCell cell{a.partition()[i].id, "", a.partition()[i].coordinate, {}, true};
    if (auto it = match.find(i); it != match.end()) {
      cell.b_cell = b.partition()[it->second].id;
      Matrix fa = block_fiber_at(a, ba, i);
      Matrix fb = block_fiber_at(b, bb, it->second);
      cell.basis = solve_intertwiner(fa, fb);
      for (const Matrix& x : cell.basis) {
        if (!(fa * x == x * fb)) throw InvariantBreach("intertwiner basis element does not intertwine");
        cell.pattern_ok = cell.pattern_ok && intertwiner_pattern(x, ba.size, bb.size);
      }
    }
    report.cells.push_back(std::move(cell));
  }
  for (std::size_t j : rc.right_only) {
    report.cells.push_back({"", b.partition()[j].id, b.partition()[j].coordinate, {}, true});
  }
  return report;
}

CommutantBasis commutant_basis(const ModelRef& a) {
  CommutantBasis out;
  const Partition& p = a->partition();
  for (std::size_t c = 0; c < p.size(); ++c) {
    const auto slots = fiber_slots(*a, c);
    const std::size_t d = fiber_dim(*a, c);
    std::map<std::pair<std::size_t, std::size_t>, std::vector<Matrix>> cache;
    std::size_t dim = 0;
    for (const Slot& s : slots) {
      for (const Slot& t : slots) {
        auto key = std::make_pair(s.block, t.block);
        auto it = cache.find(key);
        if (it == cache.end()) {
          Matrix fs = a->blocks()[s.block].block.fiber(p[c]);
          Matrix ft = a->blocks()[t.block].block.fiber(p[c]);
          it = cache.emplace(key, solve_intertwiner(fs, ft)).first;
        }
        for (const Matrix& x : it->second) {
          std::vector<Matrix> f = zero_fibers(*a);
          f[c] = Matrix(d, d);
          f[c].set_block(s.offset, t.offset, x);
          out.elements.emplace_back(a, std::move(f));
          ++dim;
        }
      }
    }
    out.dimension.push_back(dim);
  }
  return out;
}

CommutantElement semisimple_projection(const CommutantElement& x) {
  const OperatorModel& a = x.owner();
  std::vector<Matrix> f;
  for (std::size_t c = 0; c < a.partition().size(); ++c) {
    const auto slots = fiber_slots(a, c);
    const Matrix& m = x.at(c);
    Matrix out(m.rows(), m.cols());
    for (const Slot& s : slots) {
      for (const Slot& t : slots) {
        if (s.block != t.block) continue;
        const Scalar& v = m(s.offset, t.offset);
        if (v.is_zero()) continue;
        for (std::size_t k = 0; k < s.size; ++k) out(s.offset + k, t.offset + k) = v;
      }
    }
    f.push_back(std::move(out));
  }
  return CommutantElement(x.owner_ref(), std::move(f));
}

bool is_radical(const CommutantElement& x) { return semisimple_projection(x).is_zero(); }

TraceVector trace_r(const CommutantElement& p) {
  if (!p.is_idempotent()) throw NotIdempotent("trace_r: P*P != P");
  const OperatorModel& a = p.owner();
  TraceVector tv;
  for (std::size_t c = 0; c < a.partition().size(); ++c) {
    auto r = class_traces(a, c, p.at(c));
    for (std::size_t i = 0; i < r.size(); ++i) {
      const Rational m(static_cast<long>(a.blocks()[i].multiplicity));
      if (r[i].get_den() != 1 || r[i] < 0 || r[i] > m) {
        throw InvariantBreach("trace_r: class trace " + to_string(r[i]) + " outside {0..m} at cell '" +
                              a.partition()[c].id + "'");
      }
    }
    tv.values.push_back(std::move(r));
  }
  return tv;
}

CommutantElement standard_idempotent(const ModelRef& a, std::size_t block, std::size_t copy) {
  if (block >= a->blocks().size() || copy >= a->blocks()[block].multiplicity) {
    throw DimensionMismatch("standard_idempotent: no copy " + std::to_string(copy) + " of block " + std::to_string(block));
  }
  std::vector<Matrix> f;
  for (std::size_t c = 0; c < a->partition().size(); ++c) {
    const std::size_t d = fiber_dim(*a, c);
    Matrix m(d, d);
    for (const Slot& s : fiber_slots(*a, c)) {
      if (s.block == block && s.copy == copy) m = slot_identity(d, s);
    }
    f.push_back(std::move(m));
  }
  return CommutantElement(a, std::move(f));
}

StandardFamily::StandardFamily(ModelRef owner) : owner_(std::move(owner)) {
  for (std::size_t i = 0; i < owner_->blocks().size(); ++i) {
    for (std::size_t j = 0; j < owner_->blocks()[i].multiplicity; ++j) {
      skeleton_.push_back({i, j, standard_idempotent(owner_, i, j)});
    }
  }
}

std::vector<CommutantElement> StandardFamily::members() const {
  std::vector<CommutantElement> out;
  for (const SkeletonEntry& e : skeleton_) out.push_back(e.element);
  return out;
}

bool StandardFamily::contains(const CommutantElement& x) const {
  for (std::size_t c = 0; c < owner_->partition().size(); ++c) {
    const Matrix& m = x.at(c);
    Matrix rebuilt(m.rows(), m.cols());
    for (const Slot& s : fiber_slots(*owner_, c)) {
      if (slot_is(m, s, true)) {
        rebuilt.set_block(s.offset, s.offset, Matrix::identity(s.size));
      } else if (!slot_is(m, s, false)) {
        return false;
      }
    }
    if (!(rebuilt == m)) return false;
  }
  return true;
}

std::vector<Matrix> StandardFamily::lattice_at(std::size_t cell) const { return nnormal::lattice_at(members(), cell); }

std::vector<Matrix> lattice_at(const std::vector<CommutantElement>& family, std::size_t cell) {
  if (family.empty()) return {};
  const std::size_t d = family.front().at(cell).rows();
  const auto atoms = atoms_at(family, cell, d);
  std::vector<Matrix> out;
  const std::size_t count = std::size_t{1} << atoms.size();
  for (std::size_t mask = 0; mask < count; ++mask) {
    Matrix m(d, d);
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      if (mask & (std::size_t{1} << k)) m += atoms[k];
    }
    out.push_back(std::move(m));
  }
  return out;
}

bool same_set(const std::vector<Matrix>& x, const std::vector<Matrix>& y) {
  auto subset = [](const std::vector<Matrix>& u, const std::vector<Matrix>& v) {
    return std::all_of(u.begin(), u.end(), [&](const Matrix& m) { return std::find(v.begin(), v.end(), m) != v.end(); });
  };
  return subset(x, y) && subset(y, x);
}

Normalization normalize_idempotent(const CommutantElement& p) {
  if (!p.is_idempotent()) throw NotIdempotent("normalize_idempotent: P*P != P");
  const ModelRef& a = p.owner_ref();
  const CommutantElement id = CommutantElement::identity(a);
  const CommutantElement cp = semisimple_projection(p);

  // (2C'-I)(P+C'-I) = I + (2C'-I)(P-C') conjugates P to C'.
  CommutantElement x1 = id + (cp * Scalar(2) - id) * (p - cp);

  std::vector<Matrix> f2;
  std::vector<Matrix> expected;
  for (std::size_t c = 0; c < a->partition().size(); ++c) {
    const auto slots = fiber_slots(*a, c);
    const std::size_t d = fiber_dim(*a, c);
    Matrix x2(d, d);
    Matrix dn(d, d);
    for (std::size_t i = 0; i < a->blocks().size(); ++i) {
      std::vector<const Slot*> copies;
      for (const Slot& s : slots) {
        if (s.block == i) copies.push_back(&s);
      }
      if (copies.empty()) continue;
      const std::size_t m = copies.size();
      Matrix b(m, m);
      for (std::size_t s = 0; s < m; ++s) {
        for (std::size_t t = 0; t < m; ++t) b(s, t) = cp.at(c)(copies[s]->offset, copies[t]->offset);
      }
      IdempotentForm form = already_standard(b) ? IdempotentForm{Matrix::identity(m), b, 0} : idempotent_normal_form(b);
      for (std::size_t s = 0; s < m; ++s) {
        for (std::size_t t = 0; t < m; ++t) {
          const Scalar& v = form.transform(s, t);
          if (v.is_zero()) continue;
          for (std::size_t k = 0; k < copies[s]->size; ++k) x2(copies[s]->offset + k, copies[t]->offset + k) = v;
        }
      }
      for (std::size_t s = 0; s < m; ++s) {
        if (form.normal(s, s) == Scalar(1)) dn.set_block(copies[s]->offset, copies[s]->offset, Matrix::identity(copies[s]->size));
      }
    }
    f2.push_back(std::move(x2));
    expected.push_back(std::move(dn));
  }
  CommutantElement x = CommutantElement(a, std::move(f2)) * x1;
  auto xinv = inverse(x);
  if (!xinv) throw InvariantBreach("normalize_idempotent: conjugator is singular");
  CommutantElement d = x * p * *xinv;
  if (!(d.fibers() == expected)) throw InvariantBreach("normalize_idempotent: X P X^-1 is not the standard idempotent");
  return {std::move(x), std::move(*xinv), std::move(d)};
}

std::variant<Skeleton, NotMaximal> extract_skeleton(const ModelRef& a, const std::vector<CommutantElement>& family) {
  for (std::size_t k = 0; k < family.size(); ++k) {
    if (!family[k].is_idempotent()) throw NotIdempotent("family member " + std::to_string(k) + " is not idempotent");
    if (family[k].owner_ref() != a && !(family[k].owner() == *a)) {
      throw DimensionMismatch("family member " + std::to_string(k) + " belongs to another model");
    }
    for (std::size_t l = 0; l < k; ++l) {
      if (!(family[k] * family[l] == family[l] * family[k])) {
        throw StructureError("family members " + std::to_string(l) + " and " + std::to_string(k) + " do not commute");
      }
    }
  }
  const Partition& p = a->partition();
  // per cell: atoms grouped by block, in copy order
  std::vector<std::vector<std::vector<Matrix>>> by_class(p.size(), std::vector<std::vector<Matrix>>(a->blocks().size()));
  std::vector<std::size_t> failing;
  std::vector<Matrix> coarse(p.size());
  for (std::size_t c = 0; c < p.size(); ++c) {
    const std::size_t d = fiber_dim(*a, c);
    coarse[c] = Matrix(d, d);
    std::size_t expected = 0;
    for (const BlockTerm& t : a->blocks()) {
      if (t.block.covers(p[c].id)) expected += t.multiplicity;
    }
    const auto atoms = atoms_at(family, c, d);
    bool ok = atoms.size() == expected;
    for (const Matrix& at : atoms) {
      auto r = class_traces(*a, c, at);
      Rational total = 0;
      for (const Rational& v : r) total += v;
      if (total != 1) {
        if (ok || coarse[c].is_zero()) coarse[c] = at;
        ok = false;
        continue;
      }
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (r[i] == 1) by_class[c][i].push_back(at);
      }
    }
    if (!ok) failing.push_back(c);
  }

  if (!failing.empty()) {
    std::vector<Matrix> f = zero_fibers(*a);
    std::vector<CellId> cells;
    for (std::size_t c : failing) {
      f[c] = coarse[c];
      cells.push_back(p[c].id);
    }
    CommutantElement e(a, std::move(f));
    Normalization n = normalize_idempotent(e);
    std::vector<Matrix> g = zero_fibers(*a);
    for (std::size_t c : failing) {
      for (const Slot& s : fiber_slots(*a, c)) {
        if (slot_is(n.normal.at(c), s, true)) {
          g[c] = slot_identity(g[c].rows(), s);
          break;
        }
      }
    }
    CommutantElement w = n.inverse * CommutantElement(a, std::move(g)) * n.transform;
    for (const CommutantElement& q : family) {
      if (!(w * q == q * w)) throw InvariantBreach("extract_skeleton: witness does not commute with the family");
    }
    return NotMaximal{std::move(w), std::move(cells)};
  }

  Skeleton out;
  for (std::size_t i = 0; i < a->blocks().size(); ++i) {
    for (std::size_t c = 0; c < p.size(); ++c) {
      std::sort(by_class[c][i].begin(), by_class[c][i].end(), [](const Matrix& x, const Matrix& y) {
        const std::size_t rx = first_nonzero_row(x);
        const std::size_t ry = first_nonzero_row(y);
        if (rx != ry) return rx < ry;
        return entrywise_less(x, y);
      });
    }
    for (std::size_t j = 0; j < a->blocks()[i].multiplicity; ++j) {
      std::vector<Matrix> f = zero_fibers(*a);
      for (std::size_t c = 0; c < p.size(); ++c) {
        if (j < by_class[c][i].size()) f[c] = by_class[c][i][j];
      }
      out.entries.push_back({i, j, CommutantElement(a, std::move(f))});
    }
  }
  return out;
}

Standardization standardize_family(const ModelRef& a, const std::vector<CommutantElement>& family) {
  auto result = extract_skeleton(a, family);
  if (auto* nm = std::get_if<NotMaximal>(&result)) {
    std::string cells;
    for (const CellId& id : nm->cells) cells += (cells.empty() ? "" : ", ") + id;
    throw StructureError("family is not maximal abelian at cells {" + cells + "}");
  }
  const Skeleton& sk = std::get<Skeleton>(result);
  CommutantElement x = CommutantElement::zero(a);
  CommutantElement xinv = CommutantElement::zero(a);
  for (const SkeletonEntry& e : sk.entries) {
    Normalization n = normalize_idempotent(e.element);
    CommutantElement swap = swap_copies(a, e.block, n.normal, e.copy);
    CommutantElement target = standard_idempotent(a, e.block, e.copy);
    x += target * swap * n.transform * e.element;
    xinv += e.element * n.inverse * swap * target;
  }
  if (!(x * xinv == CommutantElement::identity(a))) throw InvariantBreach("standardize_family: conjugator does not invert");
  StandardFamily standard(a);
  Standardization out{x, xinv, {}};
  for (const CommutantElement& q : family) {
    CommutantElement img = x * q * xinv;
    if (!standard.contains(img)) throw InvariantBreach("standardize_family: image leaves the standard lattice");
    out.image.push_back(std::move(img));
  }
  return out;
}

}  // namespace nnormal
