// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any FAIL.

#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "nnormal/canonical.hpp"
#include "nnormal/commutant.hpp"
#include "nnormal/linalg.hpp"
#include "nnormal/model.hpp"
#include "nnormal/oracle.hpp"
#include "support/fixtures.hpp"
#include "support/random_models.hpp"

using namespace nnormal;
using namespace nnormal::testing;

namespace {

struct Outcome {
  std::size_t runs = 0;
  std::size_t failures = 0;
  std::string note;
  std::string first_failure;

  void fail(const std::string& what) {
    ++failures;
    if (first_failure.empty()) first_failure = what;
  }
  void check(bool ok, const std::string& what) {
    if (!ok) fail(what);
  }
};

bool verify_witness(const OperatorModel& a, const OperatorModel& b, const std::vector<WitnessCell>& w) {
  for (const WitnessCell& c : w) {
    const Matrix fa = fiber(a, *a.partition().index_of(c.a_cell));
    const Matrix fb = fiber(b, *b.partition().index_of(c.b_cell));
    if (!(c.transform * fa == fb * c.transform)) return false;
    if (!inverse(c.transform)) return false;
  }
  return true;
}

// A shares its cells with B by coordinate, otherwise independent.
OperatorModel partner(Rng& rng, const OperatorModel& a, const Limits& lim, std::size_t k) {
  switch (k % 3) {
    case 0:
      return reentried(rng, a, "r");
    case 1:
      return perturbed(rng, a, lim);
    default:
      return random_valid_model(rng, lim);
  }
}

Outcome ac1() {
  Outcome o;
  Rng rng(1001);
  const Limits lim{4, 4, 3, 3};
  std::size_t similar = 0;
  for (std::size_t k = 0; k < 1000; ++k) {
    OperatorModel a = random_valid_model(rng, lim);
    OperatorModel b = partner(rng, a, lim, k);
    const bool fast = are_similar(a, b, false).similar;
    const bool slow = oracle_similar(AnyModel(a), AnyModel(b));
    similar += fast ? 1 : 0;
    o.check(fast == slow, "valid pair " + std::to_string(k));
    ++o.runs;
  }
  std::size_t raw = 0;
  for (std::size_t k = 0; k < 200; ++k) {
    Partition p = random_partition(rng, static_cast<std::size_t>(uniform(rng, 1, 3)));
    OperatorModel a = random_raw_model(rng, lim, p);
    OperatorModel b = coin(rng) ? random_raw_model(rng, lim, p) : perturbed(rng, a, lim);
    o.check(are_similar(a, b, false).similar == oracle_similar(AnyModel(a), AnyModel(b)), "raw pair " + std::to_string(k));
    ++raw;
  }
  o.note = "1000 valid pairs (" + std::to_string(similar) + " similar) and " + std::to_string(raw) +
           " raw pairs against the oracle";
  return o;
}

Outcome ac2() {
  Outcome o;
  Rng rng(1002);
  for (std::size_t k = 0; k < 60; ++k) {
    std::vector<long> coords;
    const bool with_zero = k % 2 == 0;
    for (long c = -3; c <= 3; ++c) {
      if (c == 0 ? with_zero : coin(rng)) coords.push_back(c);
    }
    if (coords.empty()) coords.push_back(2);
    Partition p = line(coords);
    OperatorModel x = x_model(p);
    OperatorModel y = y_model(p);
    SimilarityReport r = are_similar(x, y, true);
    const bool oracle = oracle_similar(AnyModel(x), AnyModel(y));
    if (with_zero) {
      o.check(!r.similar && !oracle, "similar with 0 present");
      o.check(r.divergence && r.divergence->coordinate.is_zero() && r.divergence->cell == "l0", "divergence not at 0");
      o.check(r.divergence && r.divergence->a_terms == SizeCounts{{2, 1}} && r.divergence->b_terms == SizeCounts{{1, 2}},
              "divergence terms");
    } else {
      o.check(r.similar && oracle, "not similar away from 0");
      o.check(r.witness && r.witness->size() == coords.size() && verify_witness(x, y, *r.witness), "witness");
    }
    ++o.runs;
  }
  o.note = "X vs Y on " + std::to_string(o.runs) + " partitions, half containing 0";
  return o;
}

Outcome ac3() {
  Outcome o;
  Rng rng(1003);
  const Limits lim{3, 3, 3, 3, 5};
  for (std::size_t k = 0; k < 200; ++k) {
    ModelRef a = share_valid(random_valid_model(rng, lim));
    StandardFamily standard(a);
    CommutantBasis basis = commutant_basis(a);
    auto [s, s_inv] = random_invertible(rng, a, basis);
    std::vector<CommutantElement> family;
    for (const SkeletonEntry& e : standard.skeleton()) family.push_back(s * e.element * s_inv);
    try {
      Standardization st = standardize_family(a, family);
      bool ok = st.transform * st.inverse == CommutantElement::identity(a);
      for (std::size_t j = 0; j < family.size(); ++j) ok = ok && st.transform * family[j] * st.inverse == st.image[j];
      for (std::size_t c = 0; c < a->partition().size(); ++c) {
        ok = ok && same_set(lattice_at(st.image, c), standard.lattice_at(c));
      }
      o.check(ok, "model " + std::to_string(k));
    } catch (const std::exception& e) {
      o.fail("model " + std::to_string(k) + ": " + e.what());
    }
    ++o.runs;
  }
  o.note = "200 conjugated skeletons standardized onto the standard lattice";
  return o;
}

Outcome ac4() {
  Outcome o;
  Rng rng(1004);
  for (std::size_t k = 0; k < 40; ++k) {
    const auto n3 = static_cast<std::size_t>(uniform(rng, 1, 2));
    const auto n2 = n3 + static_cast<std::size_t>(uniform(rng, 1, 2));
    const auto n1 = n2 + static_cast<std::size_t>(uniform(rng, 1, 2));
    const auto m1 = static_cast<std::size_t>(uniform(rng, 1, 3));
    const auto m2 = static_cast<std::size_t>(uniform(rng, 1, 3));
    const auto m3 = static_cast<std::size_t>(uniform(rng, 1, 3));
    Partition p = random_partition(rng, static_cast<std::size_t>(uniform(rng, 1, 4)));
    OperatorModel a = three_block(p, n1, m1, n2, m2, n3, m3);
    const std::vector<std::size_t> once{m1, m2, m3};
    const std::vector<std::size_t> twice{2 * m1, 2 * m2, 2 * m3};
    const SizeCounts gens{{n1, m1}, {n2, m2}, {n3, m3}};

    K0Invariant inv = k0_invariant(a);
    o.check(inv.classes.size() == 1 && inv.classes[0].rank() == 3, "class shape");
    o.check(inv.classes.size() == 1 && inv.classes[0].generators == gens, "generators");
    o.check(inv.classes.size() == 1 && inv.classes[0].cells == ids(p), "class cells");
    auto id = identity_class(a);
    o.check(id.size() == 1 && id[0].coefficients == once, "[I] of A");

    OperatorModel aa = direct_sum(a, a);
    auto id2 = identity_class(aa);
    o.check(id2.size() == 1 && id2[0].coefficients == twice, "[I] of A + A");
    K0Invariant inv2 = k0_invariant(aa);
    o.check(inv2.classes.size() == 1 && inv2.classes[0].rank() == 3, "class shape of A + A");
    ++o.runs;
  }
  o.note = std::to_string(o.runs) + " three-block models and their doubles";
  return o;
}

OperatorModel single_block(Rng& rng, std::size_t n, const std::string& prefix) {
  Partition p = random_partition(rng, static_cast<std::size_t>(uniform(rng, 1, 4)), prefix);
  TriangularBlock b;
  b.size = n;
  b.support = random_support(rng, p);
  fill_entries(rng, b, true);
  return OperatorModel(p, {{std::move(b), 1}});
}

// Zero pattern of an na x nb intertwiner, checked directly.
bool zero_pattern(const Matrix& x, std::size_t na, std::size_t nb) {
  if (x.rows() != na || x.cols() != nb) return false;
  if (na > nb) return x.block(nb, 0, na - nb, nb).is_zero() && x.block(0, 0, nb, nb).is_upper_triangular();
  if (na < nb) return x.block(0, 0, na, nb - na).is_zero() && x.block(0, nb - na, na, na).is_upper_triangular();
  return x.is_upper_triangular();
}

Outcome ac5() {
  Outcome o;
  Rng rng(1005);
  std::size_t pairs = 0;
  for (std::size_t n1 = 2; n1 <= 4; ++n1) {
    for (std::size_t n2 = 1; n2 < n1; ++n2) {
      ++pairs;
      for (std::size_t k = 0; k < 100; ++k) {
        OperatorModel big = single_block(rng, n1, "a");
        OperatorModel small = single_block(rng, n2, "b");
        const std::string tag = "(" + std::to_string(n1) + "," + std::to_string(n2) + ") #" + std::to_string(k);
        for (int side = 0; side < 2; ++side) {
          const OperatorModel& a = side == 0 ? big : small;
          const OperatorModel& b = side == 0 ? small : big;
          IntertwinerReport r = intertwiner_basis(a, b);
          auto dims = oracle_intertwiner_dim(a, b);
          o.check(r.pattern_ok(), "reported pattern " + tag);
          o.check(dims.size() == r.cells.size(), "cell count " + tag);
          for (std::size_t c = 0; c < r.cells.size() && c < dims.size(); ++c) {
            const IntertwinerCell& cell = r.cells[c];
            o.check(dims[c].coordinate == cell.coordinate && dims[c].dim == cell.basis.size(), "dimension " + tag);
            if (cell.basis.empty()) continue;
            const Matrix fa = fiber(a, *a.partition().index_of(cell.a_cell));
            const Matrix fb = fiber(b, *b.partition().index_of(cell.b_cell));
            for (const Matrix& x : cell.basis) {
              o.check(zero_pattern(x, a.blocks()[0].block.size, b.blocks()[0].block.size), "zero pattern " + tag);
              o.check(fa * x == x * fb, "intertwining " + tag);
            }
          }
        }
        ++o.runs;
      }
    }
  }
  o.note = std::to_string(pairs) + " size pairs x 100 instances, both orientations";
  return o;
}

CommutantElement random_standard(Rng& rng, const StandardFamily& standard) {
  CommutantElement d = CommutantElement::zero(standard.skeleton().front().element.owner_ref());
  for (const SkeletonEntry& e : standard.skeleton()) {
    if (coin(rng)) d += e.element;
  }
  return d;
}

Outcome ac6() {
  Outcome o;
  Rng rng(1006);
  const Limits lim{3, 3, 3, 3, 5};
  while (o.runs < 200) {
    ModelRef a = share_valid(random_valid_model(rng, lim));
    StandardFamily standard(a);
    if (standard.skeleton().empty()) continue;
    CommutantBasis basis = commutant_basis(a);
    auto [s, s_inv] = random_invertible(rng, a, basis);
    CommutantElement p = s * random_standard(rng, standard) * s_inv;
    try {
      Normalization n = normalize_idempotent(p);
      const bool ok = standard.contains(n.normal) && n.transform * p * n.inverse == n.normal &&
                      n.transform * n.inverse == CommutantElement::identity(a) && trace_r(n.normal) == trace_r(p);
      o.check(ok, "idempotent " + std::to_string(o.runs));
    } catch (const std::exception& e) {
      o.fail("idempotent " + std::to_string(o.runs) + ": " + e.what());
    }
    ++o.runs;
  }
  o.note = "200 conjugated standard idempotents normalized";
  return o;
}

Outcome ac7() {
  Outcome o;
  Rng rng(1007);
  for (std::size_t k = 0; k < 100; ++k) {
    MultiplicityInput in = random_multiplicity_input(rng, 5, 3);
    MultiplicityDecomposition d = decompose_by_multiplicity(in);
    const Matrix lhs = assemble(d.intermediate);
    const Matrix rhs = oracle_assemble(AnyModel(in));
    bool ok = lhs.rows() == rhs.rows() && d.permutation.size() == rhs.rows();
    if (ok) {
      std::vector<bool> hit(rhs.rows(), false);
      for (std::size_t x : d.permutation) ok = ok && x < hit.size() && !hit[x] && (hit[x] = true);
    }
    for (std::size_t i = 0; ok && i < lhs.rows(); ++i) {
      for (std::size_t j = 0; ok && j < lhs.cols(); ++j) ok = lhs(i, j) == rhs(d.permutation[i], d.permutation[j]);
    }
    o.check(ok, "permutation " + std::to_string(k));
    o.check(oracle_similar(AnyModel(d.final_model), AnyModel(in)), "final model " + std::to_string(k));
    ++o.runs;
  }
  o.note = "100 multiplicity inputs decomposed";
  return o;
}

Outcome ac8() {
  Outcome o;
  Rng rng(1008);
  const Limits lim{3, 3, 3, 3, 6};
  while (o.runs < 500) {
    ModelRef a = share_valid(random_valid_model(rng, lim));
    CommutantBasis basis = commutant_basis(a);
    for (int k = 0; k < 10; ++k) {
      CommutantElement x = random_element(rng, a, basis);
      CommutantElement y = random_element(rng, a, basis);
      CommutantElement px = semisimple_projection(x);
      o.check(semisimple_projection(x * y) == px * semisimple_projection(y), "multiplicative");
      o.check(semisimple_projection(px) == px, "idempotent");
      CommutantElement r = x - px;
      o.check(semisimple_projection(r).is_zero(), "kernel");
      for (const Matrix& f : r.fibers()) o.check(power(f, f.rows()).is_zero(), "nilpotent");
      ++o.runs;
    }
  }
  o.note = std::to_string(o.runs) + " element pairs";
  return o;
}

Outcome ac9() {
  Outcome o;
  Rng rng(1009);
  const Limits lim{3, 3, 2, 3};
  std::size_t chains = 0;
  for (std::size_t k = 0; k < 300; ++k) {
    OperatorModel a = random_valid_model(rng, lim);
    OperatorModel b = partner(rng, a, lim, k);
    OperatorModel c = partner(rng, b, lim, k / 3);
    o.check(are_similar(a, a, false).similar, "reflexive");
    const bool ab = are_similar(a, b, false).similar;
    const bool bc = are_similar(b, c, false).similar;
    const bool ac = are_similar(a, c, false).similar;
    o.check(ab == are_similar(b, a, false).similar, "symmetric");
    o.check(bc == are_similar(c, b, false).similar, "symmetric");
    if (ab && bc) {
      ++chains;
      o.check(ac, "transitive");
    }
    if (ab && ac) o.check(bc, "transitive");
    ++o.runs;
  }
  o.note = std::to_string(o.runs) + " triples, " + std::to_string(chains) + " similar chains";
  o.check(chains >= 50, "too few similar chains to exercise transitivity");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"AC1 oracle equivalence", ac1},  {"AC2 counterexample pair", ac2},   {"AC3 family uniqueness", ac3},
      {"AC4 K0 shape", ac4},            {"AC5 intertwiner patterns", ac5},  {"AC6 idempotent normalization", ac6},
      {"AC7 multiplicity split", ac7},  {"AC8 radical split", ac8},         {"AC9 equivalence relation", ac9},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = o.failures == 0;
    failed += pass ? 0 : 1;
    std::printf("%s %s: %s; %zu failure(s) [%.1fs]%s%s\n", pass ? "PASS" : "FAIL", name, o.note.c_str(), o.failures,
                secs, pass ? "" : "; first: ", pass ? "" : o.first_failure.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
