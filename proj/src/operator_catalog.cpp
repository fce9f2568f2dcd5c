#include "mutforge/operator_catalog.hpp"

#include <algorithm>
#include <regex>

#include <json.hpp>

#include "mutforge/util.hpp"

namespace mutforge {

std::string_view to_string(LangScope s) {
  return s == LangScope::CLike ? "c_like" : "python";
}

std::optional<LangScope> parse_lang_scope(std::string_view s) {
  if (s == "c_like") return LangScope::CLike;
  if (s == "python") return LangScope::Python;
  return std::nullopt;
}

std::vector<std::string> validate_operator(const MutationOperator& op) {
  std::vector<std::string> violations;
  if (op.id.empty()) violations.push_back("empty operator id");
  if (op.language_scope.empty()) violations.push_back("empty language scope");
  if (op.match_spec.kind == MatchKind::CallBlock) {
    if (op.match_spec.identifiers.empty()) {
      violations.push_back("call_block match with empty identifier set");
    }
    for (const std::string& ident : op.match_spec.identifiers) {
      if (ident.empty() ||
          ident.find_first_not_of(
              "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_") !=
              std::string::npos) {
        violations.push_back("call_block identifier '" + ident + "' is not a plain token");
      }
    }
  } else {
    if (op.match_spec.pattern.empty()) {
      violations.push_back("line_pattern match with empty pattern");
    } else {
      try {
        std::regex compiled(op.match_spec.pattern, std::regex::ECMAScript);
      } catch (const std::regex_error& e) {
        violations.push_back("line pattern does not compile: " + std::string(e.what()));
      }
    }
  }
  if (op.transform.kind == TransformKind::ReplaceByPattern) {
    if (op.transform.rules.empty()) {
      violations.push_back("replace_by_pattern transform with no rules");
    }
    for (const RewriteRule& rule : op.transform.rules) {
      try {
        std::regex compiled(rule.pattern, std::regex::ECMAScript);
        if (std::regex_search(rule.replacement, compiled)) {
          violations.push_back("replacement '" + rule.replacement +
                               "' re-matches its own pattern '" + rule.pattern + "'");
        }
      } catch (const std::regex_error& e) {
        violations.push_back("rewrite pattern '" + rule.pattern +
                             "' does not compile: " + std::string(e.what()));
      }
    }
  } else {
    if (!op.transform.rules.empty()) {
      violations.push_back("delete_span transform must not carry rewrite rules");
    }
  }
  return violations;
}

std::string apply_transform(const Transform& transform, const std::string& text) {
  if (transform.kind == TransformKind::DeleteSpan) return {};
  std::string out = text;
  for (const RewriteRule& rule : transform.rules) {
    std::regex compiled(rule.pattern, std::regex::ECMAScript);
    out = std::regex_replace(out, compiled, rule.replacement);
  }
  return out;
}

namespace {

MutationOperator make_operator(std::string id, std::string name, FixingPattern inverted,
                               std::optional<int> cwe, std::set<LangScope> scope,
                               MatchSpec match, Transform transform) {
  MutationOperator op;
  op.id = std::move(id);
  op.name = std::move(name);
  op.inverted_fixing_pattern = inverted;
  op.seeds_cwe = cwe;
  op.language_scope = std::move(scope);
  op.match_spec = std::move(match);
  op.transform = std::move(transform);
  op.enabled = true;
  return op;
}

MatchSpec call_block(std::vector<std::string> identifiers) {
  MatchSpec spec;
  spec.kind = MatchKind::CallBlock;
  spec.identifiers = std::move(identifiers);
  return spec;
}

MatchSpec line_pattern(std::string pattern) {
  MatchSpec spec;
  spec.kind = MatchKind::LinePattern;
  spec.pattern = std::move(pattern);
  return spec;
}

Transform delete_span() { return {}; }

Transform replace_rules(std::vector<RewriteRule> rules) {
  Transform t;
  t.kind = TransformKind::ReplaceByPattern;
  t.rules = std::move(rules);
  return t;
}

}  // namespace

const std::vector<MutationOperator>& builtin_catalog() {
  static const std::vector<MutationOperator> catalog = [] {
    std::vector<MutationOperator> ops;
    ops.push_back(make_operator(
        "CHK-TENSOR-DEL", "delete tensor-property checker call",
        {FixClass::AddCheckers, FixLeaf::AddCheckerForTensorsProperty}, 20,
        {LangScope::CLike},
        call_block({"OP_REQUIRES", "OP_REQUIRES_OK", "TORCH_CHECK"}), delete_span()));
    ops.push_back(make_operator(
        "CHK-OVERFLOW-DEL", "delete overflow checker call",
        {FixClass::AddCheckers, FixLeaf::AddCheckerForOverflow}, 190, {LangScope::CLike},
        call_block({"TF_LITE_ENSURE", "TF_LITE_ENSURE_OK", "TF_LITE_ENSURE_STATUS",
                    "TF_LITE_ENSURE_EQ"}),
        delete_span()));
    ops.push_back(make_operator(
        "CHK-NULL-DEL", "delete single-line null-pointer guard",
        {FixClass::AddCheckers, FixLeaf::AddCheckerForNullPointerDereference}, 476,
        {LangScope::CLike},
        line_pattern(R"(^\s*if\s*\(\s*(?:[^()]*(?:==|!=)\s*(?:NULL|nullptr)|(?:NULL|nullptr)\s*(?:==|!=)[^()]*)\s*\)[^;{}]*;\s*$)"),
        delete_span()));
    ops.push_back(make_operator(
        "CHK-RECURSION-DEL", "delete recursion/depth limit guard",
        {FixClass::AddCheckers, FixLeaf::AddCheckerForRecursion}, 835, {LangScope::CLike},
        line_pattern(R"(^\s*if\s*\([^()]*\b(?:depth|recursion|level|nest\w*)\b[^()]*(?:>=|>)[^()]*\)\s*(?:break|return[^;]*|throw[^;]*)\s*;\s*$)"),
        delete_span()));
    ops.push_back(make_operator(
        "TYPE-NARROW", "narrow 64-bit integer types to 32-bit",
        {FixClass::ResolveDataTypeErrors, FixLeaf::IncreaseIntegerTypeRange}, 190,
        {LangScope::CLike},
        line_pattern(R"(\b(?:int64_t|int64|long long|size_t|uint64_t)\b)"),
        replace_rules({{R"(\bint64_t\b)", "int32_t"},
                       {R"(\bint64\b)", "int32"},
                       {R"(\blong long\b)", "int"},
                       {R"(\bsize_t\b)", "int"},
                       {R"(\buint64_t\b)", "uint32_t"}})));
    ops.push_back(make_operator(
        "SIGN-SWAP", "swap unsigned integer types to signed",
        {FixClass::ResolveDataTypeErrors, FixLeaf::ConvertIntegerSign}, 195,
        {LangScope::CLike},
        line_pattern(R"(\b(?:unsigned|size_t|uint32_t)\b)"),
        replace_rules({{R"(\bunsigned int\b)", "int"},
                       {R"(\bunsigned\b)", "int"},
                       {R"(\bsize_t\b)", "int"},
                       {R"(\buint32_t\b)", "int32_t"}})));
    ops.push_back(make_operator(
        "MEM-RELEASE-DEL", "delete memory release call",
        {FixClass::ResolveMemoryErrors, FixLeaf::ManageMemoryRelease}, 401,
        {LangScope::CLike}, call_block({"free", "Py_DECREF", "Py_XDECREF"}),
        delete_span()));
    ops.push_back(make_operator(
        "INIT-DEL", "delete scalar initializer expression",
        {FixClass::ResolveMemoryErrors, FixLeaf::ResourceInitialization}, 908,
        {LangScope::CLike},
        line_pattern(R"(^\s*(?:static\s+)?(?:int|long|float|double|char)\s+\w+\s*=\s*[^;]+;\s*$)"),
        replace_rules({{R"(\s*=\s*[^;]+;)", ";"}})));
    ops.push_back(make_operator(
        "LOCK-DEL", "delete lock acquisition call",
        {FixClass::ResolveConcurrencyErrors, FixLeaf::AddLockingMechanism}, 362,
        {LangScope::CLike},
        call_block({"pthread_mutex_lock", "pthread_rwlock_rdlock", "pthread_rwlock_wrlock",
                    "mutex_lock"}),
        delete_span()));
    ops.push_back(make_operator(
        "EXC-DEL", "delete single-line error-raising branch",
        {FixClass::ModifyBusinessLogic, FixLeaf::ImprovedExceptionHandling}, std::nullopt,
        {LangScope::CLike, LangScope::Python},
        line_pattern(R"(^\s*(?:if\s*\((?![^)]*(?:NULL|nullptr))[^()]*\)\s*return\s+(?:-\d+|false|nullptr|NULL|\w*[Ee]rror\w*[^;]*)\s*;|throw\s[^;]*;|raise\s\S.*)\s*$)"),
        delete_span()));
    for (const MutationOperator& op : ops) {
      auto violations = validate_operator(op);
      if (!violations.empty()) {
        throw CatalogError("builtin operator " + op.id + ": " + violations.front());
      }
    }
    return ops;
  }();
  return catalog;
}

namespace {

nlohmann::json operator_to_json(const MutationOperator& op) {
  nlohmann::json j;
  j["id"] = op.id;
  j["name"] = op.name;
  j["inverted_fixing_pattern"] = {
      {"category", std::string(to_string(op.inverted_fixing_pattern.category))},
      {"subcategory", std::string(to_string(op.inverted_fixing_pattern.subcategory))}};
  if (op.seeds_cwe) {
    j["seeds_cwe"] = *op.seeds_cwe;
  } else {
    j["seeds_cwe"] = nullptr;
  }
  nlohmann::json scope = nlohmann::json::array();
  for (LangScope s : op.language_scope) scope.push_back(std::string(to_string(s)));
  j["language_scope"] = scope;
  nlohmann::json match;
  if (op.match_spec.kind == MatchKind::CallBlock) {
    match["kind"] = "call_block";
    match["identifiers"] = op.match_spec.identifiers;
  } else {
    match["kind"] = "line_pattern";
    match["pattern"] = op.match_spec.pattern;
  }
  j["match"] = match;
  nlohmann::json transform;
  if (op.transform.kind == TransformKind::DeleteSpan) {
    transform["kind"] = "delete_span";
  } else {
    transform["kind"] = "replace_by_pattern";
    nlohmann::json rules = nlohmann::json::array();
    for (const RewriteRule& rule : op.transform.rules) {
      rules.push_back({{"pattern", rule.pattern}, {"replacement", rule.replacement}});
    }
    transform["rules"] = rules;
  }
  j["transform"] = transform;
  j["enabled"] = op.enabled;
  return j;
}

MutationOperator operator_from_json(const nlohmann::json& j) {
  MutationOperator op;
  op.id = j.at("id").get<std::string>();
  op.name = j.value("name", op.id);
  const auto& fp = j.at("inverted_fixing_pattern");
  auto category = parse_fix_class(fp.at("category").get<std::string>());
  auto subcategory = parse_fix_leaf(fp.at("subcategory").get<std::string>());
  if (!category || !subcategory) {
    throw CatalogError("operator " + op.id + ": unknown fixing pattern name");
  }
  op.inverted_fixing_pattern = {*category, *subcategory};
  if (j.contains("seeds_cwe") && !j.at("seeds_cwe").is_null()) {
    op.seeds_cwe = j.at("seeds_cwe").get<int>();
  }
  for (const auto& s : j.at("language_scope")) {
    auto scope = parse_lang_scope(s.get<std::string>());
    if (!scope) throw CatalogError("operator " + op.id + ": unknown language scope");
    op.language_scope.insert(*scope);
  }
  const auto& match = j.at("match");
  std::string match_kind = match.at("kind").get<std::string>();
  if (match_kind == "call_block") {
    op.match_spec.kind = MatchKind::CallBlock;
    op.match_spec.identifiers = match.at("identifiers").get<std::vector<std::string>>();
  } else if (match_kind == "line_pattern") {
    op.match_spec.kind = MatchKind::LinePattern;
    op.match_spec.pattern = match.at("pattern").get<std::string>();
  } else {
    throw CatalogError("operator " + op.id + ": unknown match kind '" + match_kind + "'");
  }
  const auto& transform = j.at("transform");
  std::string transform_kind = transform.at("kind").get<std::string>();
  if (transform_kind == "delete_span") {
    op.transform.kind = TransformKind::DeleteSpan;
  } else if (transform_kind == "replace_by_pattern") {
    op.transform.kind = TransformKind::ReplaceByPattern;
    for (const auto& rule : transform.at("rules")) {
      op.transform.rules.push_back({rule.at("pattern").get<std::string>(),
                                    rule.at("replacement").get<std::string>()});
    }
  } else {
    throw CatalogError("operator " + op.id + ": unknown transform kind '" + transform_kind +
                       "'");
  }
  op.enabled = j.value("enabled", true);
  return op;
}

}  // namespace

std::vector<MutationOperator> parse_catalog(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw CatalogError(std::string("catalog parse error: ") + e.what());
  }
  if (!doc.is_array()) throw CatalogError("catalog must be a JSON array of operators");
  std::vector<MutationOperator> catalog;
  for (const auto& entry : doc) {
    MutationOperator op;
    try {
      op = operator_from_json(entry);
    } catch (const nlohmann::json::exception& e) {
      throw CatalogError(std::string("catalog entry malformed: ") + e.what());
    }
    auto violations = validate_operator(op);
    if (!violations.empty()) {
      throw CatalogError("operator " + op.id + ": " + util::join(violations, "; "));
    }
    if (find_operator(catalog, op.id) != nullptr) {
      throw CatalogError("duplicate operator id '" + op.id + "'");
    }
    catalog.push_back(std::move(op));
  }
  return catalog;
}

std::vector<MutationOperator> load_catalog(const std::string& path) {
  return parse_catalog(util::read_file_bytes(path));
}

std::string serialize_catalog(const std::vector<MutationOperator>& catalog) {
  nlohmann::json doc = nlohmann::json::array();
  for (const MutationOperator& op : catalog) doc.push_back(operator_to_json(op));
  return doc.dump(2) + "\n";
}

void save_catalog(const std::vector<MutationOperator>& catalog, const std::string& path) {
  util::write_file_atomic(path, serialize_catalog(catalog));
}

const MutationOperator* find_operator(const std::vector<MutationOperator>& catalog,
                                      std::string_view id) {
  for (const MutationOperator& op : catalog) {
    if (op.id == id) return &op;
  }
  return nullptr;
}

}  // namespace mutforge
