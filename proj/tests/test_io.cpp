#include <doctest.h>

#include <string>

#include "nnormal/canonical.hpp"
#include "nnormal/commutant.hpp"
#include "nnormal/errors.hpp"
#include "nnormal/io.hpp"
#include "support/fixtures.hpp"
#include "support/random_models.hpp"

using namespace nnormal;
using namespace nnormal::testing;

namespace {

const char* kSmall = R"({
  "partition": [
    {"id": "a", "coordinate": ["0", "0"]},
    {"id": "b", "coordinate": ["1/2", "-1"], "weight": "3"}
  ],
  "blocks": [
    {"size": 2, "multiplicity": 2, "support": ["a", "b"],
     "entries": {"1,2": {"a": ["1", "0"], "b": ["2", "0"]}}}
  ]
}
)";

std::string error_of(const std::string& text) {
  try {
    parse_model(text, "doc.json");
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("parse a small operator model") {
  AnyModel m = parse_model(kSmall);
  REQUIRE(std::holds_alternative<OperatorModel>(m));
  const OperatorModel& a = std::get<OperatorModel>(m);
  CHECK(a.partition().size() == 2);
  CHECK(a.partition()[1].coordinate == Scalar(Rational(1, 2), -1));
  CHECK(a.partition()[1].weight == 3);
  CHECK(a.blocks()[0].multiplicity == 2);
  CHECK(fiber(a, 1)(0, 1) == Scalar(2));
  CHECK(validate(a).empty());
}

TEST_CASE("serialize round-trips") {
  Rng rng(12);
  for (int k = 0; k < 40; ++k) {
    OperatorModel a = coin(rng) ? random_valid_model(rng, {}) : random_raw_model(rng, {}, random_partition(rng, 3));
    std::string text = serialize(a);
    AnyModel back = parse_model(text);
    REQUIRE(std::holds_alternative<OperatorModel>(back));
    CHECK(std::get<OperatorModel>(back) == a);
    CHECK(serialize(back) == text);
  }
  for (int k = 0; k < 20; ++k) {
    MultiplicityInput mi = random_multiplicity_input(rng, 4, 3);
    std::string text = serialize(mi);
    AnyModel back = parse_model(text);
    REQUIRE(std::holds_alternative<MultiplicityInput>(back));
    CHECK(serialize(back) == text);
  }
}

TEST_CASE("canonical models survive a file round-trip") {
  Rng rng(13);
  for (int k = 0; k < 20; ++k) {
    OperatorModel c = canonicalize(random_valid_model(rng, {})).model;
    AnyModel back = parse_model(serialize(c));
    CHECK(std::get<OperatorModel>(back) == c);
    CHECK(model_hash(std::get<OperatorModel>(back)) == model_hash(c));
  }
}

TEST_CASE("model_hash") {
  OperatorModel a = single(line({0, 1}), 2, 1);
  CHECK(model_hash(a).size() == 16);
  CHECK(model_hash(a) == model_hash(single(line({0, 1}), 2, 1)));
  CHECK(model_hash(a) != model_hash(single(line({0, 1}), 2, 2)));
}

TEST_CASE("malformed documents") {
  SUBCASE("syntax error carries line and column") {
    std::string e = error_of("{\n  \"partition\": [\n  ,\n}");
    CHECK(e.rfind("doc.json:3:", 0) == 0);
  }
  SUBCASE("unknown key is located") {
    std::string text = kSmall;
    text.replace(text.find("\"weight\""), 8, "\"mass\"");
    CHECK(error_of(text) == "doc.json:4: /partition/1/mass: unknown key 'mass'");
  }
  SUBCASE("floats are rejected") {
    std::string text = kSmall;
    text.replace(text.find("\"1/2\""), 5, "0.5");
    std::string e = error_of(text);
    CHECK(e.find("doc.json:4: /partition/1/coordinate/0:") == 0);
  }
  SUBCASE("decimal strings are rejected") {
    std::string text = kSmall;
    text.replace(text.find("\"1/2\""), 5, "\"0.5\"");
    CHECK(error_of(text).find("/partition/1/coordinate/0") != std::string::npos);
  }
  SUBCASE("missing size") {
    std::string text = kSmall;
    text.replace(text.find("\"size\": 2, "), 11, "");
    CHECK(error_of(text).find("/blocks/0") != std::string::npos);
  }
  SUBCASE("lower-triangular entry") {
    std::string text = kSmall;
    text.replace(text.find("\"1,2\""), 5, "\"2,1\"");
    CHECK_FALSE(error_of(text).empty());
  }
  SUBCASE("duplicate cell ids") {
    std::string text = kSmall;
    text.replace(text.find("\"id\": \"b\""), 9, "\"id\": \"a\"");
    CHECK(error_of(text).rfind("doc.json", 0) == 0);
  }
  SUBCASE("bad kind") {
    CHECK(error_of(R"({"kind": "matrix", "partition": [], "blocks": []})").find("/kind") != std::string::npos);
  }
}

TEST_CASE("element and family files") {
  OperatorModel a = single(line({0, 1}), 1, 2);
  ModelRef ref = share_valid(a);
  std::vector<Matrix> p(2, Matrix{{1, 1}, {0, 0}});
  p[1] = Matrix{{Scalar(Rational(1, 3), 1), 0}, {0, 0}};
  SUBCASE("element round-trip") {
    std::string text = serialize_element(a, p);
    CHECK(parse_element(text, a) == p);
  }
  SUBCASE("family round-trip") {
    std::vector<std::vector<Matrix>> fam{p, std::vector<Matrix>(2, Matrix::identity(2))};
    CHECK(parse_family(serialize_family(a, fam), a) == fam);
  }
  SUBCASE("hash mismatch") {
    std::string text = serialize_element(a, p);
    CHECK_THROWS_AS(parse_element(text, single(line({0, 1}), 1, 3)), ParseError);
  }
  SUBCASE("wrong fiber dimension") {
    std::string text = serialize_element(a, {Matrix::identity(2), Matrix::identity(3)});
    CHECK_THROWS_AS(parse_element(text, a), ParseError);
  }
}
