#include "nnormal/canonical.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "nnormal/errors.hpp"
#include "nnormal/linalg.hpp"

namespace nnormal {

namespace {

// Fiber of the source operator gathered onto one output cell.
struct CellSource {
  Cell cell;
  std::vector<CellId> sources;
  Matrix fiber;
};

void require_known_support(const OperatorModel& a) {
  for (const Violation& v : validate(a)) {
    if (v.rule == Rule::V3) {
      throw StructureError("block " + std::to_string(v.block) + " refers to unknown cell '" + v.cell + "'");
    }
  }
}

std::vector<CellSource> sources_of(const OperatorModel& raw) {
  require_known_support(raw);
  std::vector<CellSource> out;
  for (std::size_t i = 0; i < raw.partition().size(); ++i) {
    const Cell& c = raw.partition()[i];
    out.push_back({c, {c.id}, fiber(raw, i)});
  }
  return out;
}

std::vector<CellSource> sources_of(const MultiplicityInput& raw) {
  Pushforward pf = pushforward(raw.partition(), raw.diagonal());
  std::vector<CellSource> out;
  for (std::size_t k = 0; k < pf.image.size(); ++k) {
    std::vector<Matrix> parts;
    for (const CellId& id : pf.fibers[k]) parts.push_back(raw.block().fiber(raw.partition().cell(id)));
    out.push_back({pf.image[k], pf.fibers[k], Matrix::direct_sum(parts)});
  }
  return out;
}

SizeCounts terms_of(const CellSource& s) {
  const Scalar& c = s.cell.coordinate;
  for (const Scalar& d : diagonal_values(s.fiber)) {
    if (!(d == c)) throw InvariantBreach("fiber at '" + s.cell.id + "' has diagonal value off its coordinate");
  }
  const Scalar eig[] = {c};
  JordanStructure js = jordan_structure(s.fiber, eig);
  std::map<std::size_t, std::size_t, std::greater<>> counts;
  if (auto it = js.find(c); it != js.end()) {
    for (std::size_t n : it->second) ++counts[n];
  }
  SizeCounts terms;
  for (const auto& [n, m] : counts) terms.push_back({n, m});
  return terms;
}

OperatorModel build_canonical(const Partition& p, const std::vector<SizeCounts>& per_cell) {
  // size -> multiplicity -> support (partition order)
  std::map<std::size_t, std::map<std::size_t, std::vector<CellId>>> groups;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (const SizeCount& t : per_cell[i]) groups[t.size][t.count].push_back(p[i].id);
  }
  std::vector<BlockTerm> blocks;
  for (auto& [n, by_count] : groups) {
    for (auto& [m, support] : by_count) blocks.push_back({jordan_block(n, std::move(support)), m});
  }
  std::sort(blocks.begin(), blocks.end(), [&](const BlockTerm& x, const BlockTerm& y) {
    if (x.block.size != y.block.size) return x.block.size > y.block.size;
    return *p.index_of(x.block.support.front()) < *p.index_of(y.block.support.front());
  });
  return OperatorModel(p, std::move(blocks));
}

OperatorModel canonical_model(const std::vector<CellSource>& sources) {
  std::vector<Cell> cells;
  std::vector<SizeCounts> terms;
  for (const CellSource& s : sources) {
    cells.push_back(s.cell);
    terms.push_back(terms_of(s));
  }
  return build_canonical(Partition(std::move(cells)), terms);
}

Canonicalization with_conjugators(const std::vector<CellSource>& sources) {
  Canonicalization out{canonical_model(sources), {}};
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const CellSource& s = sources[i];
    Matrix target = fiber(out.model, i);
    const Scalar eig[] = {s.cell.coordinate};
    auto t = similarity_transform(s.fiber, target, eig);
    if (!t) throw InvariantBreach("canonical fiber at '" + s.cell.id + "' is not similar to its source");
    out.conjugators.push_back({s.cell.id, s.sources, std::move(*t)});
  }
  return out;
}

SizeCounts terms_at(const OperatorModel& a, const CellId& id) {
  SizeCounts terms;
  for (const BlockTerm& t : a.blocks()) {
    if (t.block.covers(id)) terms.push_back({t.block.size, t.multiplicity});
  }
  std::sort(terms.begin(), terms.end(), [](const SizeCount& x, const SizeCount& y) { return x.size > y.size; });
  return terms;
}

bool covers_everything(const OperatorModel& a) {
  return std::all_of(a.blocks().begin(), a.blocks().end(),
                     [&](const BlockTerm& t) { return t.block.support.size() == a.partition().size(); });
}

}  // namespace

Canonicalization canonicalize(const OperatorModel& raw) { return with_conjugators(sources_of(raw)); }

Canonicalization canonicalize(const MultiplicityInput& raw) { return with_conjugators(sources_of(raw)); }

Signature signature(const OperatorModel& a) {
  if (auto v = validate(a); !v.empty()) {
    throw StructureError("signature needs a valid model (first violation: " + to_string(v.front().rule) + " at block " +
                         std::to_string(v.front().block) + ", cell '" + v.front().cell + "'); canonicalize first");
  }
  Signature s;
  for (const Cell& c : a.partition().cells()) s.push_back({c.id, terms_at(a, c.id)});
  return s;
}

std::map<CellId, std::size_t> r_function(const OperatorModel& a) {
  std::map<CellId, std::size_t> r;
  for (const CellSignature& cs : signature(a)) r[cs.cell] = cs.terms.size();
  return r;
}

std::vector<std::size_t> K0Class::identity() const {
  std::vector<std::size_t> out;
  for (const SizeCount& g : generators) out.push_back(g.count);
  return out;
}

K0Invariant k0_invariant(const OperatorModel& a) {
  K0Invariant k;
  for (const CellSignature& cs : signature(a)) {
    if (cs.terms.empty()) continue;
    auto it = std::find_if(k.classes.begin(), k.classes.end(),
                           [&](const K0Class& c) { return c.generators == cs.terms; });
    if (it == k.classes.end()) {
      k.classes.push_back({{cs.cell}, cs.terms});
    } else {
      it->cells.push_back(cs.cell);
    }
  }
  return k;
}

std::vector<IdentityClass> identity_class(const OperatorModel& a) {
  std::vector<IdentityClass> out;
  for (const K0Class& c : k0_invariant(a).classes) out.push_back({c.cells, c.identity()});
  return out;
}

SimilarityReport are_similar(const OperatorModel& a, const OperatorModel& b, bool want_witness) {
  const OperatorModel ca = canonical_model(sources_of(a));
  const OperatorModel cb = canonical_model(sources_of(b));
  const Partition& pa = a.partition();
  const Partition& pb = b.partition();
  const CommonRefinement rc = refine_common(pa, pb);

  SimilarityReport report;
  report.extension = !(rc.left_only.empty() && rc.right_only.empty() && covers_everything(ca) && covers_everything(cb));

  std::map<std::size_t, std::size_t> match(rc.matched.begin(), rc.matched.end());
  for (std::size_t i = 0; i < pa.size() && !report.divergence; ++i) {
    SizeCounts ta = terms_at(ca, pa[i].id);
    SizeCounts tb;
    if (auto it = match.find(i); it != match.end()) tb = terms_at(cb, pb[it->second].id);
    if (ta != tb) report.divergence = Divergence{pa[i].id, pa[i].coordinate, std::move(ta), std::move(tb)};
  }
  for (std::size_t j : rc.right_only) {
    if (report.divergence) break;
    SizeCounts tb = terms_at(cb, pb[j].id);
    if (!tb.empty()) report.divergence = Divergence{pb[j].id, pb[j].coordinate, {}, std::move(tb)};
  }
  report.similar = !report.divergence;

  if (report.similar && want_witness) {
    std::vector<WitnessCell> cells;
    for (const auto& [i, j] : rc.matched) {
      Matrix fa = fiber(a, i);
      Matrix fb = fiber(b, j);
      const Scalar eig[] = {pa[i].coordinate};
      auto s = similarity_transform(fa, fb, eig);
      if (!s || !(*s * fa == fb * *s)) {
        throw InvariantBreach("equal signatures at '" + pa[i].id + "' but no fiber witness");
      }
      cells.push_back({pa[i].id, pb[j].id, std::move(*s)});
    }
    report.witness = std::move(cells);
  }
  return report;
}

MultiplicityDecomposition decompose_by_multiplicity(const MultiplicityInput& input) {
  const Partition& mu = input.partition();
  const TriangularBlock& blk = input.block();
  Pushforward pf = pushforward(mu, input.diagonal());
  std::size_t layers = 0;
  for (const auto& f : pf.fibers) layers = std::max(layers, f.size());

  std::vector<BlockTerm> blocks;
  for (std::size_t k = 0; k < layers; ++k) {
    TriangularBlock b;
    b.size = blk.size;
    for (std::size_t d = 0; d < pf.image.size(); ++d) {
      if (pf.fibers[d].size() > k) b.support.push_back(pf.image[d].id);
    }
    for (const auto& [pos, f] : blk.entries) {
      std::map<CellId, Scalar> values;
      for (std::size_t d = 0; d < pf.image.size(); ++d) {
        if (pf.fibers[d].size() > k) values.emplace(pf.image[d].id, f(pf.fibers[d][k]));
      }
      b.entries.emplace(pos, StepFunction(std::move(values)));
    }
    blocks.push_back({std::move(b), 1});
  }
  OperatorModel intermediate(pf.image, std::move(blocks));

  std::vector<std::size_t> perm;
  for (std::size_t d = 0; d < pf.image.size(); ++d) {
    for (const CellId& src : pf.fibers[d]) {
      const std::size_t base = *mu.index_of(src) * blk.size;
      for (std::size_t r = 0; r < blk.size; ++r) perm.push_back(base + r);
    }
  }
  const Matrix lhs = assemble(intermediate);
  const Matrix rhs = assemble(input);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    for (std::size_t j = 0; j < perm.size(); ++j) {
      if (!(lhs(i, j) == rhs(perm[i], perm[j]))) throw InvariantBreach("decompose: permutation does not conjugate");
    }
  }
  OperatorModel final_model = canonical_model(sources_of(intermediate));
  return {std::move(intermediate), std::move(final_model), std::move(perm)};
}

std::string render(const SizeCounts& terms) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < terms.size(); ++i) os << (i ? ", " : "") << '(' << terms[i].size << ',' << terms[i].count << ')';
  os << ']';
  return os.str();
}

std::string render(const Signature& s, const Partition& p) {
  std::ostringstream os;
  for (const CellSignature& cs : s) {
    os << "cell " << cs.cell << " (lambda=" << to_display(p.cell(cs.cell).coordinate) << "): r=" << cs.terms.size()
       << ' ' << render(cs.terms) << '\n';
  }
  return os.str();
}

std::string render(const K0Invariant& k) {
  std::ostringstream os;
  if (k.classes.empty()) os << "no covered cells\n";
  for (const K0Class& c : k.classes) {
    os << "cells {";
    for (std::size_t i = 0; i < c.cells.size(); ++i) os << (i ? ", " : "") << c.cells[i];
    os << "}: Z^" << c.rank() << ", generators " << render(c.generators) << ", [I] = (";
    auto id = c.identity();
    for (std::size_t i = 0; i < id.size(); ++i) os << (i ? ", " : "") << id[i];
    os << ")\n";
  }
  return os.str();
}

std::string render(const SimilarityReport& r, bool verbose) {
  std::ostringstream os;
  os << "verdict: " << (r.similar ? "similar" : "not-similar") << '\n';
  os << "extension: " << (r.extension ? "true" : "false") << '\n';
  if (r.divergence) {
    const Divergence& d = *r.divergence;
    os << "divergence: cell " << d.cell << " (lambda=" << to_display(d.coordinate) << "): A " << render(d.a_terms)
       << " vs B " << render(d.b_terms) << '\n';
  } else {
    os << "divergence: none\n";
  }
  if (!r.witness) {
    os << "witness: none\n";
  } else {
    os << "witness: verified on " << r.witness->size() << " cell pair(s)\n";
    for (const WitnessCell& w : *r.witness) {
      os << "  " << w.a_cell << " -> " << w.b_cell << ": " << w.transform.rows() << 'x' << w.transform.cols() << '\n';
      if (verbose) {
        std::istringstream lines(to_display(w.transform));
        for (std::string line; std::getline(lines, line);) os << "    " << line << '\n';
      }
    }
  }
  return os.str();
}

}  // namespace nnormal
