#include "nnormal/io.hpp"

#include <cctype>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "nnormal/errors.hpp"

namespace nnormal {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string pointer_token(const std::string& key) {
  std::string out;
  for (char ch : key) {
    if (ch == '~') {
      out += "~0";
    } else if (ch == '/') {
      out += "~1";
    } else {
      out += ch;
    }
  }
  return out;
}

// Line of every value in an already well-formed document, keyed by JSON pointer.
class Locator {
 public:
  explicit Locator(std::string_view text) : s_(text) {
    skip_ws();
    if (i_ < s_.size()) value("");
  }

  std::map<std::string, std::size_t> lines;

 private:
  void skip_ws() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) {
      if (s_[i_] == '\n') ++line_;
      ++i_;
    }
  }

  std::string string_token() {
    std::string out;
    ++i_;
    while (i_ < s_.size() && s_[i_] != '"') {
      if (s_[i_] == '\\' && i_ + 1 < s_.size()) {
        ++i_;
        switch (s_[i_]) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          case 'b': out += '\b'; break;
          case 'f': out += '\f'; break;
          case 'u': {
            unsigned cp = std::stoul(std::string(s_.substr(i_ + 1, 4)), nullptr, 16);
            i_ += 4;
            if (cp < 0x80) {
              out += static_cast<char>(cp);
            } else if (cp < 0x800) {
              out += static_cast<char>(0xC0 | (cp >> 6));
              out += static_cast<char>(0x80 | (cp & 0x3F));
            } else {
              out += static_cast<char>(0xE0 | (cp >> 12));
              out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
              out += static_cast<char>(0x80 | (cp & 0x3F));
            }
            break;
          }
          default: out += s_[i_];
        }
      } else {
        out += s_[i_];
      }
      ++i_;
    }
    ++i_;
    return out;
  }

  void value(const std::string& path) {
    lines.emplace(path, line_);
    const char ch = s_[i_];
    if (ch == '{') {
      ++i_;
      skip_ws();
      while (i_ < s_.size() && s_[i_] != '}') {
        const std::size_t key_line = line_;
        std::string key = string_token();
        skip_ws();
        ++i_;  // ':'
        skip_ws();
        const std::string child = path + "/" + pointer_token(key);
        value(child);
        lines[child] = std::min(lines[child], key_line);
        skip_ws();
        if (s_[i_] == ',') ++i_;
        skip_ws();
      }
      ++i_;
    } else if (ch == '[') {
      ++i_;
      skip_ws();
      for (std::size_t k = 0; i_ < s_.size() && s_[i_] != ']'; ++k) {
        value(path + "/" + std::to_string(k));
        skip_ws();
        if (s_[i_] == ',') ++i_;
        skip_ws();
      }
      ++i_;
    } else if (ch == '"') {
      string_token();
    } else {
      while (i_ < s_.size() && std::string_view(",]} \t\r\n").find(s_[i_]) == std::string_view::npos) ++i_;
    }
  }

  std::string_view s_;
  std::size_t i_ = 0;
  std::size_t line_ = 1;
};

class Document {
 public:
  Document(std::string_view text, std::string source) : source_(std::move(source)) {
    try {
      root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
      std::size_t line = 1;
      std::size_t col = 1;
      for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
        if (text[k] == '\n') {
          ++line;
          col = 1;
        } else {
          ++col;
        }
      }
      std::string what = e.what();
      if (auto p = what.find("syntax error"); p != std::string::npos) what = what.substr(p);
      throw ParseError(source_ + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
    }
    lines_ = Locator(text).lines;
  }

  [[noreturn]] void fail(const std::string& ptr, const std::string& msg) const {
    std::string where = source_;
    auto it = lines_.find(ptr);
    if (it != lines_.end()) where += ":" + std::to_string(it->second);
    throw ParseError(where + ": " + (ptr.empty() ? "/" : ptr) + ": " + msg);
  }

  const json& object(const json& j, const std::string& ptr, std::initializer_list<const char*> allowed) const {
    if (!j.is_object()) fail(ptr, "expected an object");
    for (const auto& [key, v] : j.items()) {
      bool known = false;
      for (const char* a : allowed) known = known || key == a;
      if (!known) fail(ptr + "/" + pointer_token(key), "unknown key '" + key + "'");
    }
    return j;
  }

  const json& array(const json& j, const std::string& ptr) const {
    if (!j.is_array()) fail(ptr, "expected an array");
    return j;
  }

  std::string text(const json& j, const std::string& ptr) const {
    if (!j.is_string()) fail(ptr, "expected a string");
    return j.get<std::string>();
  }

  std::size_t count(const json& j, const std::string& ptr) const {
    if (j.is_number_float()) fail(ptr, "floating-point numbers are not accepted");
    if (!j.is_number_unsigned()) fail(ptr, "expected a positive integer");
    auto v = j.get<std::uint64_t>();
    if (v == 0) fail(ptr, "expected a positive integer");
    return static_cast<std::size_t>(v);
  }

  Rational rational(const json& j, const std::string& ptr) const {
    if (j.is_number()) fail(ptr, "rationals must be written as \"p/q\" strings");
    try {
      return parse_rational(text(j, ptr));
    } catch (const ParseError& e) {
      fail(ptr, e.what());
    }
  }

  Scalar scalar(const json& j, const std::string& ptr) const {
    if (!j.is_array() || j.size() != 2) fail(ptr, "expected [re, im] as two \"p/q\" strings");
    return Scalar(rational(j[0], ptr + "/0"), rational(j[1], ptr + "/1"));
  }

  // Matrix entries are "p/q" (real) or [re, im].
  Scalar entry(const json& j, const std::string& ptr) const {
    if (j.is_string()) return Scalar(rational(j, ptr));
    return scalar(j, ptr);
  }

  Matrix matrix(const json& j, const std::string& ptr, std::size_t dim) const {
    array(j, ptr);
    if (j.size() != dim) fail(ptr, "expected " + std::to_string(dim) + " rows");
    Matrix m(dim, dim);
    for (std::size_t r = 0; r < dim; ++r) {
      const std::string rp = ptr + "/" + std::to_string(r);
      array(j[r], rp);
      if (j[r].size() != dim) fail(rp, "expected " + std::to_string(dim) + " entries");
      for (std::size_t c = 0; c < dim; ++c) m(r, c) = entry(j[r][c], rp + "/" + std::to_string(c));
    }
    return m;
  }

  json root;

 private:
  std::string source_;
  std::map<std::string, std::size_t> lines_;
};

EntryPosition parse_position(const Document& doc, const std::string& key, const std::string& ptr) {
  auto comma = key.find(',');
  auto number = [&](std::string_view t) -> std::size_t {
    if (t.empty() || t.size() > 6 || !std::all_of(t.begin(), t.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
      doc.fail(ptr, "entry key must be \"i,j\" with 1-based integers");
    }
    return std::stoul(std::string(t));
  };
  if (comma == std::string::npos) doc.fail(ptr, "entry key must be \"i,j\" with 1-based integers");
  const std::size_t i = number(std::string_view(key).substr(0, comma));
  const std::size_t j = number(std::string_view(key).substr(comma + 1));
  if (i == 0 || j == 0) doc.fail(ptr, "entry indices are 1-based");
  return {i - 1, j - 1};
}

StepFunction step_function(const Document& doc, const json& j, const std::string& ptr) {
  if (!j.is_object()) doc.fail(ptr, "expected an object mapping cell id to [re, im]");
  std::map<CellId, Scalar> values;
  for (const auto& [id, v] : j.items()) values.emplace(id, doc.scalar(v, ptr + "/" + pointer_token(id)));
  return StepFunction(std::move(values));
}

struct RawBlock {
  BlockTerm term;
  bool explicit_diagonal = false;
};

RawBlock parse_block(const Document& doc, const json& j, const std::string& ptr) {
  doc.object(j, ptr, {"size", "multiplicity", "support", "diagonal", "entries"});
  RawBlock out;
  TriangularBlock& b = out.term.block;
  if (!j.contains("size")) doc.fail(ptr, "missing key 'size'");
  b.size = doc.count(j["size"], ptr + "/size");
  if (j.contains("multiplicity")) out.term.multiplicity = doc.count(j["multiplicity"], ptr + "/multiplicity");
  if (j.contains("support")) {
    const json& s = doc.array(j["support"], ptr + "/support");
    for (std::size_t k = 0; k < s.size(); ++k) b.support.push_back(doc.text(s[k], ptr + "/support/" + std::to_string(k)));
  }
  if (j.contains("diagonal")) {
    const json& d = j["diagonal"];
    if (d.is_string()) {
      if (d.get<std::string>() != "coordinate") doc.fail(ptr + "/diagonal", "expected \"coordinate\" or a step function");
    } else {
      b.diagonal = step_function(doc, d, ptr + "/diagonal");
      out.explicit_diagonal = true;
    }
  }
  if (j.contains("entries")) {
    const std::string ep = ptr + "/entries";
    if (!j["entries"].is_object()) doc.fail(ep, "expected an object keyed by \"i,j\"");
    for (const auto& [key, f] : j["entries"].items()) {
      const std::string kp = ep + "/" + pointer_token(key);
      EntryPosition pos = parse_position(doc, key, kp);
      if (b.entries.count(pos)) doc.fail(kp, "duplicate entry position");
      b.entries.emplace(pos, step_function(doc, f, kp));
    }
  }
  return out;
}

AnyModel build_model(const Document& doc) {
  const json& root = doc.object(doc.root, "", {"kind", "partition", "blocks"});
  std::string kind;
  if (root.contains("kind")) {
    kind = doc.text(root["kind"], "/kind");
    if (kind != "operator" && kind != "multiplicity-input") {
      doc.fail("/kind", "expected \"operator\" or \"multiplicity-input\"");
    }
  }
  if (!root.contains("partition")) doc.fail("", "missing key 'partition'");
  if (!root.contains("blocks")) doc.fail("", "missing key 'blocks'");

  std::vector<Cell> cells;
  const json& parts = doc.array(root["partition"], "/partition");
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const std::string cp = "/partition/" + std::to_string(k);
    const json& c = doc.object(parts[k], cp, {"id", "coordinate", "weight"});
    if (!c.contains("id")) doc.fail(cp, "missing key 'id'");
    if (!c.contains("coordinate")) doc.fail(cp, "missing key 'coordinate'");
    Cell cell{doc.text(c["id"], cp + "/id"), doc.scalar(c["coordinate"], cp + "/coordinate"), 1};
    if (cell.id.empty()) doc.fail(cp + "/id", "cell id must be nonempty");
    if (c.contains("weight")) cell.weight = doc.rational(c["weight"], cp + "/weight");
    cells.push_back(std::move(cell));
  }

  std::vector<RawBlock> blocks;
  const json& bs = doc.array(root["blocks"], "/blocks");
  for (std::size_t k = 0; k < bs.size(); ++k) blocks.push_back(parse_block(doc, bs[k], "/blocks/" + std::to_string(k)));

  if (kind.empty()) {
    kind = std::any_of(blocks.begin(), blocks.end(), [](const RawBlock& b) { return b.explicit_diagonal; })
               ? "multiplicity-input"
               : "operator";
  }

  try {
    Partition p(std::move(cells));
    if (kind == "multiplicity-input") {
      if (blocks.size() != 1) doc.fail("/blocks", "a multiplicity input has exactly one block");
      if (blocks.front().term.multiplicity != 1) doc.fail("/blocks/0/multiplicity", "must be 1 for a multiplicity input");
      return MultiplicityInput(std::move(p), std::move(blocks.front().term.block));
    }
    std::vector<BlockTerm> terms;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      if (blocks[k].explicit_diagonal) {
        doc.fail("/blocks/" + std::to_string(k) + "/diagonal", "operator blocks use the \"coordinate\" diagonal");
      }
      if (blocks[k].term.block.support.empty()) doc.fail("/blocks/" + std::to_string(k), "missing or empty 'support'");
      terms.push_back(std::move(blocks[k].term));
    }
    return OperatorModel(std::move(p), std::move(terms));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    doc.fail("", e.what());
  }
}

ojson scalar_json(const Scalar& s) { return ojson::array({to_string(s.re()), to_string(s.im())}); }

ojson entry_json(const Scalar& s) {
  if (s.im() == 0) return to_string(s.re());
  return scalar_json(s);
}

ojson step_json(const StepFunction& f, const std::vector<CellId>& order) {
  ojson out = ojson::object();
  for (const CellId& id : order) {
    if (f.defined_at(id)) out[id] = scalar_json(f(id));
  }
  return out;
}

ojson partition_json(const Partition& p) {
  ojson out = ojson::array();
  for (const Cell& c : p.cells()) {
    ojson cell = ojson::object();
    cell["id"] = c.id;
    cell["coordinate"] = scalar_json(c.coordinate);
    cell["weight"] = to_string(c.weight);
    out.push_back(std::move(cell));
  }
  return out;
}

ojson block_json(const TriangularBlock& b, std::size_t multiplicity, const Partition& p) {
  std::vector<CellId> order;
  for (const Cell& c : p.cells()) order.push_back(c.id);
  ojson out = ojson::object();
  out["size"] = b.size;
  out["multiplicity"] = multiplicity;
  out["support"] = b.support;
  if (const auto* f = std::get_if<StepFunction>(&b.diagonal)) {
    out["diagonal"] = step_json(*f, order);
  } else {
    out["diagonal"] = "coordinate";
  }
  ojson entries = ojson::object();
  for (const auto& [pos, f] : b.entries) {
    entries[std::to_string(pos.first + 1) + "," + std::to_string(pos.second + 1)] = step_json(f, b.support);
  }
  out["entries"] = std::move(entries);
  return out;
}

ojson matrix_json(const Matrix& m) {
  ojson rows = ojson::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    ojson row = ojson::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(entry_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

ojson cells_json(const OperatorModel& owner, const std::vector<Matrix>& fibers) {
  if (fibers.size() != owner.partition().size()) throw DimensionMismatch("one matrix per cell expected");
  ojson out = ojson::object();
  for (std::size_t c = 0; c < fibers.size(); ++c) out[owner.partition()[c].id] = matrix_json(fibers[c]);
  return out;
}

std::vector<Matrix> cells_from(const Document& doc, const json& j, const std::string& ptr, const OperatorModel& owner) {
  if (!j.is_object()) doc.fail(ptr, "expected an object mapping cell id to a matrix");
  const Partition& p = owner.partition();
  for (const auto& [id, v] : j.items()) {
    if (!p.contains(id)) doc.fail(ptr + "/" + pointer_token(id), "unknown cell '" + id + "'");
  }
  std::vector<Matrix> out;
  for (std::size_t c = 0; c < p.size(); ++c) {
    const std::size_t dim = fiber(owner, c).rows();
    const std::string& id = p[c].id;
    if (!j.contains(id)) {
      if (dim != 0) doc.fail(ptr, "missing matrix for cell '" + id + "'");
      out.emplace_back();
      continue;
    }
    out.push_back(doc.matrix(j[id], ptr + "/" + pointer_token(id), dim));
  }
  return out;
}

void check_hash(const Document& doc, const json& root, const OperatorModel& owner) {
  if (!root.contains("model_hash")) doc.fail("", "missing key 'model_hash'");
  const std::string h = doc.text(root["model_hash"], "/model_hash");
  if (h != model_hash(owner)) doc.fail("/model_hash", "file belongs to model " + h + ", not " + model_hash(owner));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

AnyModel parse_model(std::string_view text, const std::string& source) {
  Document doc(text, source);
  return build_model(doc);
}

AnyModel load_model(const std::filesystem::path& path) { return parse_model(read_file(path), path.string()); }

std::string serialize(const OperatorModel& a) {
  ojson out = ojson::object();
  out["kind"] = "operator";
  out["partition"] = partition_json(a.partition());
  ojson blocks = ojson::array();
  for (const BlockTerm& t : a.blocks()) blocks.push_back(block_json(t.block, t.multiplicity, a.partition()));
  out["blocks"] = std::move(blocks);
  return out.dump(2) + "\n";
}

std::string serialize(const MultiplicityInput& a) {
  ojson out = ojson::object();
  out["kind"] = "multiplicity-input";
  out["partition"] = partition_json(a.partition());
  out["blocks"] = ojson::array({block_json(a.block(), 1, a.partition())});
  return out.dump(2) + "\n";
}

std::string serialize(const AnyModel& a) {
  return std::visit([](const auto& m) { return serialize(m); }, a);
}

std::string model_hash(const OperatorModel& a) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize(a)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::vector<Matrix> parse_element(std::string_view text, const OperatorModel& owner, const std::string& source) {
  Document doc(text, source);
  const json& root = doc.object(doc.root, "", {"model_hash", "cells"});
  check_hash(doc, root, owner);
  if (!root.contains("cells")) doc.fail("", "missing key 'cells'");
  return cells_from(doc, root["cells"], "/cells", owner);
}

std::vector<Matrix> load_element(const std::filesystem::path& path, const OperatorModel& owner) {
  return parse_element(read_file(path), owner, path.string());
}

std::string serialize_element(const OperatorModel& owner, const std::vector<Matrix>& fibers) {
  ojson out = ojson::object();
  out["model_hash"] = model_hash(owner);
  out["cells"] = cells_json(owner, fibers);
  return out.dump(2) + "\n";
}

std::vector<std::vector<Matrix>> parse_family(std::string_view text, const OperatorModel& owner,
                                              const std::string& source) {
  Document doc(text, source);
  const json& root = doc.object(doc.root, "", {"model_hash", "members"});
  check_hash(doc, root, owner);
  if (!root.contains("members")) doc.fail("", "missing key 'members'");
  const json& members = doc.array(root["members"], "/members");
  std::vector<std::vector<Matrix>> out;
  for (std::size_t k = 0; k < members.size(); ++k) {
    out.push_back(cells_from(doc, members[k], "/members/" + std::to_string(k), owner));
  }
  return out;
}

std::vector<std::vector<Matrix>> load_family(const std::filesystem::path& path, const OperatorModel& owner) {
  return parse_family(read_file(path), owner, path.string());
}

std::string serialize_family(const OperatorModel& owner, const std::vector<std::vector<Matrix>>& members) {
  ojson out = ojson::object();
  out["model_hash"] = model_hash(owner);
  ojson list = ojson::array();
  for (const auto& m : members) list.push_back(cells_json(owner, m));
  out["members"] = std::move(list);
  return out.dump(2) + "\n";
}

}  // namespace nnormal
