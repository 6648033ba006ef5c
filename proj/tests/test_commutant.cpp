#include <doctest.h>

#include "nnormal/commutant.hpp"
#include "nnormal/errors.hpp"
#include "nnormal/linalg.hpp"
#include "nnormal/oracle.hpp"
#include "support/fixtures.hpp"
#include "support/random_models.hpp"

using namespace nnormal;
using namespace nnormal::testing;

namespace {

ModelRef one_cell(std::size_t n, std::size_t m) { return share_valid(single(line({0}), n, m)); }

CommutantElement constant(const ModelRef& a, const Matrix& m) {
  return CommutantElement(a, std::vector<Matrix>(a->partition().size(), m));
}

std::vector<CommutantElement> conjugate_all(const std::vector<CommutantElement>& family, const CommutantElement& s,
                                            const CommutantElement& s_inv) {
  std::vector<CommutantElement> out;
  for (const CommutantElement& e : family) out.push_back(s * e * s_inv);
  return out;
}

}  // namespace

TEST_CASE("elements must commute with the fiber") {
  ModelRef a = one_cell(2, 1);
  CHECK_NOTHROW(constant(a, Matrix{{1, 2}, {0, 1}}));
  CHECK_THROWS_AS(constant(a, Matrix{{1, 0}, {0, 2}}), NotInCommutant);
  CHECK_THROWS_AS(constant(a, Matrix::identity(3)), DimensionMismatch);
  CHECK_THROWS_AS(share_valid(y_model(line({0, 1}))), StructureError);
}

TEST_CASE("intertwiner_basis") {
  Partition p = line({-1, 0, 1});
  SUBCASE("same block") {
    OperatorModel a = single(p, 2, 1);
    IntertwinerReport r = intertwiner_basis(a, a);
    for (const IntertwinerCell& c : r.cells) {
      CHECK(c.basis.size() == 2);
      for (const Matrix& x : c.basis) CHECK(x(0, 0) == x(1, 1));
    }
    CHECK(r.pattern_ok());
  }
  SUBCASE("X against Y") {
    IntertwinerReport r = intertwiner_basis(x_model(p), y_model(p));
    REQUIRE(r.cells.size() == 3);
    for (const IntertwinerCell& c : r.cells) {
      REQUIRE(c.basis.size() == 2);
      for (const Matrix& x : c.basis) {
        CHECK(x(1, 0).is_zero());
        CHECK(x(1, 1) == x(0, 0) * c.coordinate);
      }
      // no invertible combination exists at zero
      if (c.coordinate.is_zero()) {
        for (const Matrix& x : c.basis) CHECK(x(1, 1).is_zero());
      }
    }
  }
  SUBCASE("three against two") {
    OperatorModel a = single(line({0}), 3, 1);
    OperatorModel b = single(line({0}), 2, 1);
    IntertwinerReport r = intertwiner_basis(a, b);
    REQUIRE(r.cells.size() == 1);
    CHECK(r.cells[0].basis.size() == 2);
    for (const Matrix& x : r.cells[0].basis) CHECK(x.block(2, 0, 1, 2).is_zero());
    CHECK(r.pattern_ok());
    IntertwinerReport back = intertwiner_basis(b, a);
    CHECK(back.cells[0].basis.size() == 2);
    for (const Matrix& y : back.cells[0].basis) CHECK(y.block(0, 0, 2, 1).is_zero());
    CHECK(back.pattern_ok());
  }
  SUBCASE("non-common cells carry nothing") {
    OperatorModel a = single(line({0, 1}), 2, 1);
    OperatorModel b = single(line({1, 2}), 2, 1);
    IntertwinerReport r = intertwiner_basis(a, b);
    REQUIRE(r.cells.size() == 3);
    CHECK(r.cells[0].basis.empty());
    CHECK(r.cells[1].basis.size() == 2);
    CHECK(r.cells[2].basis.empty());
    CHECK(r.cells[2].a_cell.empty());
  }
  SUBCASE("single block of multiplicity one only") {
    CHECK_THROWS_AS(intertwiner_basis(single(p, 2, 2), single(p, 2, 1)), StructureError);
  }
}

TEST_CASE("commutant_basis dimensions") {
  SUBCASE("one Jordan block") { CHECK(commutant_basis(one_cell(2, 1)).dimension == std::vector<std::size_t>{2}); }
  SUBCASE("n m^2 for one block with multiplicity") {
    for (std::size_t n = 1; n <= 3; ++n) {
      for (std::size_t m = 1; m <= 3; ++m) {
        ModelRef a = one_cell(n, m);
        CommutantBasis b = commutant_basis(a);
        CHECK(b.dimension[0] == n * m * m);
        CHECK(oracle_intertwiner_dim(*a, *a)[0].dim == n * m * m);
      }
    }
  }
  SUBCASE("disjoint supports") {
    ModelRef a = share_valid(OperatorModel(line({0, 1}), {{jordan_block(3, {"l0"}), 1}, {jordan_block(2, {"l1"}), 2}}));
    CHECK(commutant_basis(a).dimension == std::vector<std::size_t>{3, 8});
  }
  SUBCASE("random models match the oracle") {
    Rng rng(15);
    for (int k = 0; k < 25; ++k) {
      ModelRef a = share_valid(random_valid_model(rng, {3, 3, 2, 3}));
      CommutantBasis b = commutant_basis(a);
      auto oracle = oracle_intertwiner_dim(*a, *a);
      for (std::size_t c = 0; c < a->partition().size(); ++c) CHECK(b.dimension[c] == oracle[c].dim);
    }
  }
}

TEST_CASE("semisimple projection") {
  ModelRef a = share_valid(OperatorModel(line({0, 1}), {{jordan_block(3, {"l0", "l1"}), 2}, {jordan_block(1, {"l0"}), 1}}));
  SUBCASE("identity is fixed") {
    CommutantElement id = CommutantElement::identity(a);
    CHECK(semisimple_projection(id) == id);
  }
  SUBCASE("strictly upper element is radical and nilpotent") {
    ModelRef b = one_cell(3, 1);
    CommutantElement x = constant(b, Matrix{{0, 1, 2}, {0, 0, 1}, {0, 0, 0}});
    CHECK(is_radical(x));
    CHECK(power(x.at(0), 3).is_zero());
  }
  SUBCASE("random elements") {
    Rng rng(6);
    CommutantBasis basis = commutant_basis(a);
    for (int k = 0; k < 30; ++k) {
      CommutantElement x = random_element(rng, a, basis);
      CommutantElement y = random_element(rng, a, basis);
      CommutantElement px = semisimple_projection(x);
      CHECK(semisimple_projection(px) == px);
      CHECK(semisimple_projection(x * y) == px * semisimple_projection(y));
      CommutantElement r = x - px;
      CHECK(is_radical(r));
      for (std::size_t c = 0; c < 2; ++c) CHECK(power(r.at(c), r.at(c).rows()).is_zero());
    }
  }
}

TEST_CASE("trace_r") {
  ModelRef a = share_valid(OperatorModel(line({0, 1}), {{jordan_block(2, {"l0", "l1"}), 2}, {jordan_block(1, {"l1"}), 3}}));
  SUBCASE("identity gives the multiplicities on covered cells") {
    TraceVector t = trace_r(CommutantElement::identity(a));
    CHECK(t.values[0] == std::vector<Rational>{2, 0});
    CHECK(t.values[1] == std::vector<Rational>{2, 3});
  }
  SUBCASE("skeleton elements") {
    TraceVector t = trace_r(standard_idempotent(a, 1, 2));
    CHECK(t.values[0] == std::vector<Rational>{0, 0});
    CHECK(t.values[1] == std::vector<Rational>{0, 1});
  }
  SUBCASE("zero") {
    TraceVector t = trace_r(CommutantElement::zero(a));
    CHECK(t.values[1] == std::vector<Rational>{0, 0});
  }
  SUBCASE("not idempotent") {
    CHECK_THROWS_AS(trace_r(CommutantElement::identity(a) * Scalar(2)), NotIdempotent);
  }
}

TEST_CASE("standard family") {
  ModelRef a = share_valid(OperatorModel(line({0, 1}), {{jordan_block(2, {"l0", "l1"}), 2}, {jordan_block(1, {"l1"}), 1}}));
  StandardFamily f(a);
  REQUIRE(f.skeleton().size() == 3);
  for (std::size_t i = 0; i < f.skeleton().size(); ++i) {
    const CommutantElement& e = f.skeleton()[i].element;
    CHECK(e.is_idempotent());
    for (std::size_t j = 0; j < i; ++j) CHECK((e * f.skeleton()[j].element).is_zero());
    CHECK(f.contains(e));
  }
  CHECK(f.lattice_at(0).size() == 4);
  CHECK(f.lattice_at(1).size() == 8);
  CHECK_FALSE(f.contains(constant(share_valid(single(line({0}), 1, 2)), Matrix{{1, 1}, {0, 0}})));
}

TEST_CASE("normalize_idempotent") {
  SUBCASE("the 2x2 multiplicity example") {
    ModelRef a = share_valid(single(line({-1, 0, 1}), 1, 2));
    CommutantElement p = constant(a, Matrix{{1, 1}, {0, 0}});
    Normalization n = normalize_idempotent(p);
    CHECK(n.normal == standard_idempotent(a, 0, 0));
    for (const Matrix& x : n.transform.fibers()) CHECK(x == Matrix{{1, 1}, {0, 1}});
  }
  SUBCASE("standard members are left alone") {
    ModelRef a = share_valid(three_block(line({0, 1}), 3, 1, 2, 2, 1, 1));
    StandardFamily f(a);
    for (const CommutantElement& p : f.members()) {
      Normalization n = normalize_idempotent(p);
      CHECK(n.normal == p);
      CHECK(n.transform == CommutantElement::identity(a));
    }
  }
  SUBCASE("conjugated standard idempotents keep their traces") {
    Rng rng(41);
    for (int k = 0; k < 20; ++k) {
      ModelRef a = share_valid(random_valid_model(rng, {2, 3, 2, 2, 5}));
      CommutantBasis basis = commutant_basis(a);
      auto [s, s_inv] = random_invertible(rng, a, basis);
      StandardFamily standard(a);
      CommutantElement d0 = CommutantElement::zero(a);
      for (const SkeletonEntry& e : standard.skeleton()) {
        if (coin(rng)) d0 += e.element;
      }
      CommutantElement p = s * d0 * s_inv;
      Normalization n = normalize_idempotent(p);
      CHECK(n.transform * p * n.inverse == n.normal);
      CHECK(StandardFamily(a).contains(n.normal));
      CHECK(trace_r(n.normal) == trace_r(d0));
    }
  }
  SUBCASE("equal traces means conjugate") {
    Rng rng(43);
    for (int k = 0; k < 15; ++k) {
      ModelRef a = share_valid(random_valid_model(rng, {2, 3, 2, 2, 5}));
      CommutantBasis basis = commutant_basis(a);
      StandardFamily standard(a);
      CommutantElement d0 = CommutantElement::zero(a);
      for (const SkeletonEntry& e : standard.skeleton()) {
        if (coin(rng)) d0 += e.element;
      }
      auto [s1, s1i] = random_invertible(rng, a, basis);
      auto [s2, s2i] = random_invertible(rng, a, basis);
      CommutantElement p = s1 * d0 * s1i;
      CommutantElement q = s2 * d0 * s2i;
      REQUIRE(trace_r(p) == trace_r(q));
      Normalization np = normalize_idempotent(p);
      Normalization nq = normalize_idempotent(q);
      REQUIRE(np.normal == nq.normal);
      // q = (nq^-1 np) p (np^-1 nq)
      CommutantElement z = nq.inverse * np.transform;
      CommutantElement zi = np.inverse * nq.transform;
      CHECK(z * p * zi == q);
    }
  }
  SUBCASE("different traces means not conjugate") {
    ModelRef a = share_valid(single(line({0}), 2, 2));
    CommutantElement p = standard_idempotent(a, 0, 0);
    CommutantElement q = CommutantElement::identity(a);
    CHECK_FALSE(trace_r(p) == trace_r(q));
    CHECK_FALSE(normalize_idempotent(p).normal == normalize_idempotent(q).normal);
  }
  SUBCASE("errors") {
    ModelRef a = one_cell(1, 2);
    CHECK_THROWS_AS(normalize_idempotent(CommutantElement::identity(a) * Scalar(3)), NotIdempotent);
  }
}

TEST_CASE("extract_skeleton") {
  ModelRef a = share_valid(OperatorModel(line({0, 1}), {{jordan_block(2, {"l0", "l1"}), 2}, {jordan_block(1, {"l1"}), 1}}));
  StandardFamily f(a);
  SUBCASE("standard skeleton comes back unchanged") {
    auto r = extract_skeleton(a, f.members());
    REQUIRE(std::holds_alternative<Skeleton>(r));
    const Skeleton& s = std::get<Skeleton>(r);
    REQUIRE(s.entries.size() == f.skeleton().size());
    for (std::size_t k = 0; k < s.entries.size(); ++k) {
      CHECK(s.entries[k].block == f.skeleton()[k].block);
      CHECK(s.entries[k].copy == f.skeleton()[k].copy);
      CHECK(s.entries[k].element == f.skeleton()[k].element);
    }
  }
  SUBCASE("{0, I} is not maximal when a multiplicity exceeds one") {
    ModelRef b = share_valid(single(line({0, 1}), 2, 2));
    auto r = extract_skeleton(b, {CommutantElement::zero(b), CommutantElement::identity(b)});
    REQUIRE(std::holds_alternative<NotMaximal>(r));
    const NotMaximal& nm = std::get<NotMaximal>(r);
    CHECK(nm.witness == standard_idempotent(b, 0, 0));
    CHECK(nm.cells == std::vector<CellId>{"l0", "l1"});
  }
  SUBCASE("conjugated skeleton yields conjugates with unit traces") {
    Rng rng(5);
    CommutantBasis basis = commutant_basis(a);
    auto [s, s_inv] = random_invertible(rng, a, basis);
    auto family = conjugate_all(f.members(), s, s_inv);
    auto r = extract_skeleton(a, family);
    REQUIRE(std::holds_alternative<Skeleton>(r));
    for (const SkeletonEntry& e : std::get<Skeleton>(r).entries) {
      TraceVector t = trace_r(e.element);
      for (std::size_t c = 0; c < 2; ++c) {
        for (std::size_t i = 0; i < 2; ++i) {
          const bool covered = a->blocks()[i].block.covers(a->partition()[c].id);
          CHECK(t.values[c][i] == (i == e.block && covered ? 1 : 0));
        }
      }
    }
  }
  SUBCASE("non-commuting members are rejected") {
    ModelRef b = one_cell(1, 2);
    CHECK_THROWS_AS(extract_skeleton(b, {constant(b, Matrix{{1, 1}, {0, 0}}), constant(b, Matrix{{1, 0}, {0, 0}})}),
                    StructureError);
  }
}

TEST_CASE("standardize_family") {
  SUBCASE("standard family gives X = I") {
    ModelRef a = share_valid(three_block(line({0, 1}), 3, 2, 2, 1, 1, 2));
    Standardization s = standardize_family(a, StandardFamily(a).members());
    CHECK(s.transform == CommutantElement::identity(a));
  }
  SUBCASE("random conjugates of the standard family") {
    Rng rng(3);
    for (int k = 0; k < 15; ++k) {
      ModelRef a = share_valid(random_valid_model(rng, {3, 3, 2, 2, 5}));
      StandardFamily f(a);
      CommutantBasis basis = commutant_basis(a);
      auto [s, s_inv] = random_invertible(rng, a, basis);
      auto family = conjugate_all(f.members(), s, s_inv);
      Standardization st = standardize_family(a, family);
      CHECK(st.transform * st.inverse == CommutantElement::identity(a));
      for (std::size_t c = 0; c < a->partition().size(); ++c) CHECK(same_set(lattice_at(st.image, c), f.lattice_at(c)));
    }
  }
  SUBCASE("two maximal families are conjugate to each other") {
    Rng rng(17);
    ModelRef a = share_valid(OperatorModel(line({0, 1}), {{jordan_block(2, {"l0", "l1"}), 2}, {jordan_block(1, {"l0"}), 2}}));
    StandardFamily f(a);
    CommutantBasis basis = commutant_basis(a);
    auto [s1, s1i] = random_invertible(rng, a, basis);
    auto [s2, s2i] = random_invertible(rng, a, basis);
    auto fam1 = conjugate_all(f.members(), s1, s1i);
    auto fam2 = conjugate_all(f.members(), s2, s2i);
    Standardization t1 = standardize_family(a, fam1);
    Standardization t2 = standardize_family(a, fam2);
    CommutantElement z = t2.inverse * t1.transform;
    CommutantElement zi = t1.inverse * t2.transform;
    for (std::size_t c = 0; c < 2; ++c) CHECK(same_set(lattice_at(conjugate_all(fam1, z, zi), c), lattice_at(fam2, c)));
  }
  SUBCASE("a non-maximal family is refused") {
    ModelRef a = one_cell(1, 2);
    CHECK_THROWS_AS(standardize_family(a, {CommutantElement::identity(a)}), StructureError);
  }
}
