#include <doctest.h>

#include <set>

#include "mutforge/operator_catalog.hpp"
#include "mutforge/util.hpp"
#include "testutil.hpp"

using namespace mutforge;

namespace {

MutationOperator minimal_line_op(std::string id) {
  MutationOperator op;
  op.id = std::move(id);
  op.name = "test operator";
  op.inverted_fixing_pattern = {FixClass::AddCheckers,
                                FixLeaf::AddCheckerForTensorsProperty};
  op.language_scope = {LangScope::CLike};
  op.match_spec.kind = MatchKind::LinePattern;
  op.match_spec.pattern = R"(^\s*guard\(.*\);\s*$)";
  op.transform.kind = TransformKind::DeleteSpan;
  return op;
}

}  // namespace

TEST_SUITE("operator_catalog") {

TEST_CASE("builtin catalog holds ten enabled well-formed operators") {
  const auto& catalog = builtin_catalog();
  CHECK(catalog.size() == 10);
  std::set<std::string> ids;
  for (const auto& op : catalog) {
    CAPTURE(op.id);
    CHECK(validate_operator(op).empty());
    CHECK(op.enabled);
    CHECK(!op.name.empty());
    CHECK(ids.insert(op.id).second);
  }
  CHECK(find_operator(catalog, "CHK-TENSOR-DEL") != nullptr);
  CHECK(find_operator(catalog, "LOCK-DEL") != nullptr);
  CHECK(find_operator(catalog, "NOT-AN-OP") == nullptr);

  // the deletion operators keep their guard-category pairing and CWE seeds
  const auto* tensor = find_operator(catalog, "CHK-TENSOR-DEL");
  CHECK(tensor->inverted_fixing_pattern.category == FixClass::AddCheckers);
  CHECK(tensor->seeds_cwe == 20);
  CHECK(tensor->match_spec.kind == MatchKind::CallBlock);
  const auto* null_guard = find_operator(catalog, "CHK-NULL-DEL");
  CHECK(null_guard->seeds_cwe == 476);
  const auto* exc = find_operator(catalog, "EXC-DEL");
  CHECK(!exc->seeds_cwe.has_value());
  CHECK(exc->language_scope ==
        std::set<LangScope>{LangScope::CLike, LangScope::Python});
  const auto* narrow = find_operator(catalog, "TYPE-NARROW");
  CHECK(narrow->transform.kind == TransformKind::ReplaceByPattern);
  CHECK(narrow->transform.rules.size() == 5);
}

TEST_CASE("lang scope names round-trip") {
  CHECK(to_string(LangScope::CLike) == "c_like");
  CHECK(to_string(LangScope::Python) == "python");
  CHECK(parse_lang_scope("c_like") == LangScope::CLike);
  CHECK(parse_lang_scope("python") == LangScope::Python);
  CHECK(!parse_lang_scope("Python").has_value());
  CHECK(!parse_lang_scope("").has_value());
}

TEST_CASE("validate_operator reports each defect") {
  auto ok = minimal_line_op("OP-1");
  CHECK(validate_operator(ok).empty());

  auto no_id = ok;
  no_id.id.clear();
  auto violations = validate_operator(no_id);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0] == "empty operator id");

  auto no_scope = ok;
  no_scope.language_scope.clear();
  CHECK(validate_operator(no_scope) ==
        std::vector<std::string>{"empty language scope"});

  auto empty_pattern = ok;
  empty_pattern.match_spec.pattern.clear();
  CHECK(validate_operator(empty_pattern) ==
        std::vector<std::string>{"line_pattern match with empty pattern"});

  auto bad_regex = ok;
  bad_regex.match_spec.pattern = "[unclosed";
  violations = validate_operator(bad_regex);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].find("line pattern does not compile") == 0);

  auto bad_block = ok;
  bad_block.match_spec.kind = MatchKind::CallBlock;
  bad_block.match_spec.pattern.clear();
  violations = validate_operator(bad_block);
  CHECK(violations ==
        std::vector<std::string>{"call_block match with empty identifier set"});
  bad_block.match_spec.identifiers = {"good_name", "bad name!"};
  violations = validate_operator(bad_block);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].find("bad name!") != std::string::npos);

  auto empty_rules = ok;
  empty_rules.transform.kind = TransformKind::ReplaceByPattern;
  CHECK(validate_operator(empty_rules) ==
        std::vector<std::string>{"replace_by_pattern transform with no rules"});

  // a replacement that its own pattern would match again is a rewrite loop
  auto looping = ok;
  looping.transform.kind = TransformKind::ReplaceByPattern;
  looping.transform.rules = {{R"(\bint\b)", "unsigned int"}};
  violations = validate_operator(looping);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].find("re-matches its own pattern") != std::string::npos);

  auto stray_rules = ok;
  stray_rules.transform.rules = {{"a", "b"}};
  CHECK(validate_operator(stray_rules) ==
        std::vector<std::string>{"delete_span transform must not carry rewrite rules"});

  auto multi = ok;
  multi.id.clear();
  multi.language_scope.clear();
  multi.match_spec.pattern.clear();
  CHECK(validate_operator(multi).size() == 3);
}

TEST_CASE("apply_transform deletes or rewrites in rule order") {
  Transform del;
  CHECK(apply_transform(del, "anything at all") == "");
  CHECK(apply_transform(del, "") == "");

  Transform narrow;
  narrow.kind = TransformKind::ReplaceByPattern;
  narrow.rules = {{R"(\bint64_t\b)", "int32_t"}, {R"(\bsize_t\b)", "int"}};
  CHECK(apply_transform(narrow, "int64_t n = x; size_t m = y;") ==
        "int32_t n = x; int m = y;");
  CHECK(apply_transform(narrow, "my_int64_t stays") == "my_int64_t stays");

  // rules run top to bottom over the whole text
  Transform chain;
  chain.kind = TransformKind::ReplaceByPattern;
  chain.rules = {{"a", "b"}, {"bb", "c"}};
  CHECK(apply_transform(chain, "aa") == "c");

  const auto* sign = find_operator(builtin_catalog(), "SIGN-SWAP");
  CHECK(apply_transform(sign->transform, "unsigned int total = 0;") ==
        "int total = 0;");
  CHECK(apply_transform(sign->transform, "unsigned x = size_t(3);") ==
        "int x = int(3);");
}

TEST_CASE("catalog serialization round-trips byte for byte") {
  const auto& catalog = builtin_catalog();
  std::string text = serialize_catalog(catalog);
  auto parsed = parse_catalog(text);
  REQUIRE(parsed.size() == catalog.size());
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    CHECK(parsed[i].id == catalog[i].id);
    CHECK(parsed[i].seeds_cwe == catalog[i].seeds_cwe);
    CHECK(parsed[i].language_scope == catalog[i].language_scope);
    CHECK(parsed[i].match_spec.pattern == catalog[i].match_spec.pattern);
    CHECK(parsed[i].match_spec.identifiers == catalog[i].match_spec.identifiers);
    CHECK(parsed[i].enabled == catalog[i].enabled);
  }
  CHECK(serialize_catalog(parsed) == text);
}

TEST_CASE("catalog files load and save") {
  testutil::TempDir dir("catalog");
  auto path = (dir.path() / "ops.json").string();
  save_catalog(builtin_catalog(), path);
  auto loaded = load_catalog(path);
  CHECK(loaded.size() == builtin_catalog().size());
  CHECK(serialize_catalog(loaded) == serialize_catalog(builtin_catalog()));
}

TEST_CASE("catalog parsing rejects malformed input") {
  CHECK_THROWS_AS(parse_catalog("not json"), CatalogError);
  CHECK_THROWS_AS(parse_catalog("{}"), CatalogError);
  CHECK(parse_catalog("[]").empty());

  // duplicate ids
  auto two = std::vector<MutationOperator>{minimal_line_op("DUP"), minimal_line_op("DUP")};
  CHECK_THROWS_WITH_AS(parse_catalog(serialize_catalog(two)),
                       doctest::Contains("duplicate operator id"), CatalogError);

  // invalid operator content is refused with its violation text
  auto bad = minimal_line_op("BAD");
  bad.match_spec.pattern = "[unclosed";
  CHECK_THROWS_WITH_AS(parse_catalog(serialize_catalog({bad})),
                       doctest::Contains("does not compile"), CatalogError);

  // unknown taxonomy names are refused
  std::string text = serialize_catalog({minimal_line_op("OK")});
  auto pos = text.find("add_checkers");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, std::string("add_checkers").size(), "add_cheggers");
  CHECK_THROWS_WITH_AS(parse_catalog(text),
                       doctest::Contains("unknown fixing pattern name"), CatalogError);
}

TEST_CASE("disabled flag survives the file format") {
  auto op = minimal_line_op("OFF");
  op.enabled = false;
  auto parsed = parse_catalog(serialize_catalog({op}));
  REQUIRE(parsed.size() == 1);
  CHECK(!parsed[0].enabled);
}

}  // TEST_SUITE
