#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "nnormal/canonical.hpp"
#include "nnormal/commutant.hpp"
#include "nnormal/errors.hpp"
#include "nnormal/io.hpp"
#include "nnormal/oracle.hpp"

namespace fs = std::filesystem;
using namespace nnormal;

namespace {

constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kUsage = 2;
constexpr int kBreach = 3;

bool verbose() {
  const char* v = std::getenv("NNORMAL_VERBOSE");
  return v != nullptr && *v != '\0' && std::string(v) != "0";
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path.string() + ": cannot write file");
  out << text;
}

OperatorModel as_operator(const AnyModel& m, const std::string& path) {
  if (const auto* op = std::get_if<OperatorModel>(&m)) return *op;
  throw StructureError(path + ": expected an operator model, got a multiplicity input");
}

// Canonical operator model of either kind of input.
OperatorModel canonical_of(const AnyModel& m) {
  return std::visit([](const auto& x) { return canonicalize(x).model; }, m);
}

std::string indent(const std::string& text, const std::string& pad) {
  std::istringstream in(text);
  std::string out;
  for (std::string line; std::getline(in, line);) out += pad + line + "\n";
  return out;
}

std::string render_violation(const Violation& v) {
  const char* what = v.rule == Rule::V1   ? "superdiagonal vanishes"
                     : v.rule == Rule::V2 ? "overlaps an earlier block of the same size"
                                          : "support cell is not in the partition";
  return to_string(v.rule) + " block " + std::to_string(v.block) + " cell " + v.cell + ": " + what;
}

std::string render_traces(const OperatorModel& a, const TraceVector& tv) {
  std::ostringstream os;
  for (std::size_t c = 0; c < tv.values.size(); ++c) {
    os << "  cell " << a.partition()[c].id << ": r = (";
    for (std::size_t i = 0; i < tv.values[c].size(); ++i) os << (i ? ", " : "") << to_string(tv.values[c][i]);
    os << ")\n";
  }
  return os.str();
}

std::string render_element(const CommutantElement& x) {
  std::ostringstream os;
  for (std::size_t c = 0; c < x.fibers().size(); ++c) {
    os << "  cell " << x.owner().partition()[c].id << ":\n" << indent(to_display(x.at(c)), "    ");
  }
  return os.str();
}

int cmd_validate(const std::string& path) {
  AnyModel m = load_model(path);
  if (std::holds_alternative<MultiplicityInput>(m)) {
    std::cout << "multiplicity-input: structure ok\n";
    return kOk;
  }
  auto violations = validate(std::get<OperatorModel>(m));
  if (violations.empty()) {
    std::cout << "ok\n";
    return kOk;
  }
  for (const Violation& v : violations) std::cout << render_violation(v) << "\n";
  std::cout << violations.size() << " violation(s)\n";
  return kNegative;
}

int cmd_canonicalize(const std::string& path, const std::string& out) {
  AnyModel m = load_model(path);
  Canonicalization c = std::visit([](const auto& x) { return canonicalize(x); }, m);
  std::ostringstream summary;
  summary << "canonical model: " << c.model.blocks().size() << " block(s)\n";
  for (const CellConjugator& k : c.conjugators) {
    summary << "  cell " << k.cell << " <- {";
    for (std::size_t i = 0; i < k.sources.size(); ++i) summary << (i ? ", " : "") << k.sources[i];
    summary << "}: conjugator " << k.transform.rows() << "x" << k.transform.cols() << "\n";
    if (verbose()) summary << indent(to_display(k.transform), "    ");
  }
  if (out.empty()) {
    std::cout << serialize(c.model);
    std::cerr << summary.str();
  } else {
    write_file(out, serialize(c.model));
    std::cout << summary.str();
  }
  return kOk;
}

int cmd_signature(const std::string& path) {
  OperatorModel a = canonical_of(load_model(path));
  std::cout << render(signature(a), a.partition());
  return kOk;
}

int cmd_k0(const std::string& path) {
  OperatorModel a = canonical_of(load_model(path));
  std::cout << render(k0_invariant(a));
  return kOk;
}

int cmd_similar(const std::string& pa, const std::string& pb, bool witness) {
  AnyModel ma = load_model(pa);
  AnyModel mb = load_model(pb);
  auto operator_view = [](const AnyModel& m) {
    if (const auto* op = std::get_if<OperatorModel>(&m)) return *op;
    return canonical_of(m);
  };
  SimilarityReport r = are_similar(operator_view(ma), operator_view(mb), witness);
  std::cout << render(r, verbose());
  return r.similar ? kOk : kNegative;
}

int cmd_intertwiners(const std::string& pa, const std::string& pb) {
  OperatorModel a = as_operator(load_model(pa), pa);
  OperatorModel b = as_operator(load_model(pb), pb);
  IntertwinerReport r = intertwiner_basis(a, b);
  const char* shape = r.a_size > r.b_size ? "[X1; 0], X1 upper triangular"
                      : r.a_size < r.b_size ? "[0, Y1], Y1 upper triangular"
                                            : "upper triangular";
  std::cout << "sizes: A " << r.a_size << ", B " << r.b_size << "; expected pattern " << shape << "\n";
  for (const IntertwinerCell& c : r.cells) {
    std::cout << "cell " << (c.a_cell.empty() ? "-" : c.a_cell) << " ~ " << (c.b_cell.empty() ? "-" : c.b_cell)
              << " (lambda=" << to_display(c.coordinate) << "): dim " << c.basis.size() << ", pattern "
              << (c.pattern_ok ? "ok" : "violated") << "\n";
    if (verbose()) {
      for (const Matrix& x : c.basis) std::cout << indent(to_display(x), "    ") << "\n";
    }
  }
  std::cout << "pattern: " << (r.pattern_ok() ? "holds" : "violated") << "\n";
  return r.pattern_ok() ? kOk : kNegative;
}

int cmd_normalize(const std::string& pa, const std::string& pp, const std::string& normal_out,
                  const std::string& transform_out) {
  ModelRef a = share_valid(as_operator(load_model(pa), pa));
  CommutantElement p(a, load_element(pp, *a));
  Normalization n = normalize_idempotent(p);
  std::cout << "trace_r(P):\n" << render_traces(*a, trace_r(p));
  std::cout << "D = X P X^-1 in the standard family; copies kept per cell:\n";
  for (std::size_t c = 0; c < a->partition().size(); ++c) {
    std::cout << "  cell " << a->partition()[c].id << ":";
    bool any = false;
    for (const Slot& s : fiber_slots(*a, c)) {
      if (n.normal.at(c)(s.offset, s.offset).is_one()) {
        std::cout << " P_{" << s.copy + 1 << ";" << s.block + 1 << "}";
        any = true;
      }
    }
    std::cout << (any ? "" : " none") << "\n";
  }
  std::cout << "X:\n" << render_element(n.transform);
  if (verbose()) std::cout << "X^-1:\n" << render_element(n.inverse);
  if (!normal_out.empty()) write_file(normal_out, serialize_element(*a, n.normal.fibers()));
  if (!transform_out.empty()) write_file(transform_out, serialize_element(*a, n.transform.fibers()));
  return kOk;
}

int cmd_standardize(const std::string& pa, const std::string& pf, const std::string& out,
                    const std::string& transform_out) {
  ModelRef a = share_valid(as_operator(load_model(pa), pa));
  std::vector<CommutantElement> family;
  for (auto& fibers : load_family(pf, *a)) family.emplace_back(a, std::move(fibers));
  auto sk = extract_skeleton(a, family);
  if (auto* nm = std::get_if<NotMaximal>(&sk)) {
    std::cout << "not maximal at cells {";
    for (std::size_t i = 0; i < nm->cells.size(); ++i) std::cout << (i ? ", " : "") << nm->cells[i];
    std::cout << "}\nwitness idempotent commuting with the family:\n" << render_element(nm->witness);
    return kNegative;
  }
  Standardization s = standardize_family(a, family);
  std::cout << "conjugator X:\n" << render_element(s.transform);
  std::cout << "standardized family:\n";
  for (std::size_t k = 0; k < s.image.size(); ++k) {
    std::cout << "  member " << k + 1 << ":";
    for (std::size_t c = 0; c < a->partition().size(); ++c) {
      std::cout << " " << a->partition()[c].id << "{";
      bool first = true;
      for (const Slot& slot : fiber_slots(*a, c)) {
        if (!s.image[k].at(c)(slot.offset, slot.offset).is_one()) continue;
        std::cout << (first ? "" : ",") << "P_{" << slot.copy + 1 << ";" << slot.block + 1 << "}";
        first = false;
      }
      std::cout << "}";
    }
    std::cout << "\n";
  }
  if (!out.empty()) {
    std::vector<std::vector<Matrix>> members;
    for (const CommutantElement& e : s.image) members.push_back(e.fibers());
    write_file(out, serialize_family(*a, members));
  }
  if (!transform_out.empty()) write_file(transform_out, serialize_element(*a, s.transform.fibers()));
  return kOk;
}

int cmd_decompose(const std::string& path, const std::string& inter_out, const std::string& final_out) {
  AnyModel m = load_model(path);
  const auto* mi = std::get_if<MultiplicityInput>(&m);
  if (mi == nullptr) throw StructureError(path + ": decompose needs a multiplicity input");
  MultiplicityDecomposition d = decompose_by_multiplicity(*mi);
  std::cout << "permutation:";
  for (std::size_t p : d.permutation) std::cout << " " << p;
  std::cout << "\n";
  if (inter_out.empty()) {
    std::cout << "intermediate:\n" << serialize(d.intermediate);
  } else {
    write_file(inter_out, serialize(d.intermediate));
  }
  if (final_out.empty()) {
    std::cout << "final:\n" << serialize(d.final_model);
  } else {
    write_file(final_out, serialize(d.final_model));
  }
  return kOk;
}

int cmd_oracle_similar(const std::string& pa, const std::string& pb) {
  const bool s = oracle_similar(load_model(pa), load_model(pb));
  std::cout << "oracle: " << (s ? "similar" : "not-similar") << "\n";
  return s ? kOk : kNegative;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact canonical forms and similarity invariants for finite n-normal operator models"};
  app.require_subcommand(1);
  std::string a, b, out, extra, extra2;
  bool witness = false;
  std::function<int()> action;

  auto* validate_cmd = app.add_subcommand("validate", "Report V1-V3 violations");
  validate_cmd->add_option("FILE", a)->required();
  validate_cmd->callback([&] { action = [&] { return cmd_validate(a); }; });

  auto* canon = app.add_subcommand("canonicalize", "Print or write the canonical model");
  canon->add_option("FILE", a)->required();
  canon->add_option("-o,--output", out, "Write the canonical model here");
  canon->callback([&] { action = [&] { return cmd_canonicalize(a, out); }; });

  auto* sig = app.add_subcommand("signature", "Per-cell block sizes and multiplicities");
  sig->add_option("FILE", a)->required();
  sig->callback([&] { action = [&] { return cmd_signature(a); }; });

  auto* k0 = app.add_subcommand("k0", "K0 group and identity class");
  k0->add_option("FILE", a)->required();
  k0->callback([&] { action = [&] { return cmd_k0(a); }; });

  auto* sim = app.add_subcommand("similar", "Decide similarity of two models");
  sim->add_option("FILE_A", a)->required();
  sim->add_option("FILE_B", b)->required();
  sim->add_flag("--witness", witness, "Construct and verify a fiberwise witness");
  sim->callback([&] { action = [&] { return cmd_similar(a, b, witness); }; });

  auto* inter = app.add_subcommand("intertwiners", "Intertwiner basis of two single-block models");
  inter->add_option("FILE_A", a)->required();
  inter->add_option("FILE_B", b)->required();
  inter->callback([&] { action = [&] { return cmd_intertwiners(a, b); }; });

  auto* norm = app.add_subcommand("normalize-idempotent", "Conjugate an idempotent into the standard family");
  norm->add_option("FILE_A", a)->required();
  norm->add_option("IDEMPOTENT_FILE", b)->required();
  norm->add_option("--normal-out", out, "Write D here");
  norm->add_option("--transform-out", extra, "Write X here");
  norm->callback([&] { action = [&] { return cmd_normalize(a, b, out, extra); }; });

  auto* stdz = app.add_subcommand("standardize-family", "Conjugate a maximal abelian family into the standard one");
  stdz->add_option("FILE_A", a)->required();
  stdz->add_option("FAMILY_FILE", b)->required();
  stdz->add_option("-o,--output", out, "Write the standardized family here");
  stdz->add_option("--transform-out", extra, "Write X here");
  stdz->callback([&] { action = [&] { return cmd_standardize(a, b, out, extra); }; });

  auto* dec = app.add_subcommand("decompose", "Split a multiplicity input by preimage count");
  dec->add_option("FILE", a)->required();
  dec->add_option("--intermediate", extra, "Write the intermediate model here");
  dec->add_option("--final", extra2, "Write the final canonical model here");
  dec->callback([&] { action = [&] { return cmd_decompose(a, extra, extra2); }; });

  auto* oracle = app.add_subcommand("oracle", "Brute-force ground truth");
  oracle->require_subcommand(1);
  auto* osim = oracle->add_subcommand("similar", "Compare Jordan structures of the assembled matrices");
  osim->add_option("FILE_A", a)->required();
  osim->add_option("FILE_B", b)->required();
  osim->callback([&] { action = [&] { return cmd_oracle_similar(a, b); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    return action();
  } catch (const InvariantBreach& e) {
    std::cerr << "internal invariant breach: " << e.what() << "\n";
    return kBreach;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
