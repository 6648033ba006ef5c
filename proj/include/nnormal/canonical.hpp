#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nnormal/matrix.hpp"
#include "nnormal/model.hpp"

namespace nnormal {

/// One term (block size n, multiplicity m) of a cell's decomposition.
struct SizeCount {
  std::size_t size;
  std::size_t count;

  friend bool operator==(const SizeCount&, const SizeCount&) = default;
};

using SizeCounts = std::vector<SizeCount>;  // sizes strictly descending

/// Conjugator for one output cell: transform * diag(source fibers) *
/// transform^{-1} equals the canonical fiber. For operator models the only
/// source cell is the cell itself; for multiplicity inputs the sources are
/// the preimages of the pushforward cell.
struct CellConjugator {
  CellId cell;
  std::vector<CellId> sources;
  Matrix transform;
};

struct Canonicalization {
  OperatorModel model;
  std::vector<CellConjugator> conjugators;  // one per output cell, partition order
};

/// Regroups every fiber by its Jordan structure into blocks with
/// superdiagonal 1 and no other strict-upper entries. Blocks are ordered by
/// (size descending, first support cell). Only structural validity is
/// required of the input.
Canonicalization canonicalize(const OperatorModel& raw);
Canonicalization canonicalize(const MultiplicityInput& raw);

struct CellSignature {
  CellId cell;
  SizeCounts terms;

  friend bool operator==(const CellSignature&, const CellSignature&) = default;
};

using Signature = std::vector<CellSignature>;  // partition order

/// Per-cell (n, m) terms read from the block supports of a valid model.
/// Throws StructureError when validate() reports violations.
Signature signature(const OperatorModel& a);

/// Number of distinct block sizes at each cell.
std::map<CellId, std::size_t> r_function(const OperatorModel& a);

/// Covered cells sharing one generator list. The group at each of these
/// cells is Z^r with r = generators.size(), and the unit's class has
/// coordinates given by the multiplicities.
struct K0Class {
  std::vector<CellId> cells;
  SizeCounts generators;

  std::size_t rank() const { return generators.size(); }
  std::vector<std::size_t> identity() const;

  friend bool operator==(const K0Class&, const K0Class&) = default;
};

struct K0Invariant {
  std::vector<K0Class> classes;  // ordered by first cell

  friend bool operator==(const K0Invariant&, const K0Invariant&) = default;
};

K0Invariant k0_invariant(const OperatorModel& a);

struct IdentityClass {
  std::vector<CellId> cells;
  std::vector<std::size_t> coefficients;
};

std::vector<IdentityClass> identity_class(const OperatorModel& a);

/// Per matched cell pair: witness * fiber(A, a_cell) = fiber(B, b_cell) * witness.
struct WitnessCell {
  CellId a_cell;
  CellId b_cell;
  Matrix transform;
};

struct Divergence {
  CellId cell;
  Scalar coordinate;
  SizeCounts a_terms;
  SizeCounts b_terms;
};

struct SimilarityReport {
  bool similar = false;
  std::optional<Divergence> divergence;
  std::optional<std::vector<WitnessCell>> witness;
  /// True when the models are not both supported on one common set of
  /// cells with every block covering all of it; the verdict then rests on
  /// fiberwise signatures over mixed supports.
  bool extension = false;
};

SimilarityReport are_similar(const OperatorModel& a, const OperatorModel& b, bool want_witness);

struct MultiplicityDecomposition {
  /// Raw model over the pushforward partition: block k carries the entries
  /// of the k-th preimage cell of every pushforward cell with >= k preimages.
  OperatorModel intermediate;
  OperatorModel final_model;
  /// assemble(intermediate)(i, j) == assemble(input)(permutation[i], permutation[j]).
  std::vector<std::size_t> permutation;
};

MultiplicityDecomposition decompose_by_multiplicity(const MultiplicityInput& input);

std::string render(const SizeCounts& terms);
std::string render(const Signature& s, const Partition& p);
std::string render(const K0Invariant& k);
std::string render(const SimilarityReport& r, bool verbose);

}  // namespace nnormal
