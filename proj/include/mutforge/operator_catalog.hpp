#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mutforge/taxonomy.hpp"

namespace mutforge {

class CatalogError : public std::runtime_error {
 public:
  explicit CatalogError(const std::string& what) : std::runtime_error(what) {}
};

enum class LangScope { CLike, Python };
std::string_view to_string(LangScope s);
std::optional<LangScope> parse_lang_scope(std::string_view s);

enum class MatchKind { LinePattern, CallBlock };

struct MatchSpec {
  MatchKind kind = MatchKind::LinePattern;
  std::string pattern;                    // line_pattern: ECMAScript regex
  std::vector<std::string> identifiers;   // call_block: callee names
};

enum class TransformKind { DeleteSpan, ReplaceByPattern };

struct RewriteRule {
  std::string pattern;  // ECMAScript regex, replaced globally
  std::string replacement;
};

// replace_by_pattern applies its rules in order; each rule's replacement must
// not re-match the rule's own pattern (no rewrite loops across repeated runs).
struct Transform {
  TransformKind kind = TransformKind::DeleteSpan;
  std::vector<RewriteRule> rules;
};

struct MutationOperator {
  std::string id;
  std::string name;
  FixingPattern inverted_fixing_pattern;
  std::optional<int> seeds_cwe;
  std::set<LangScope> language_scope;
  MatchSpec match_spec;
  Transform transform;
  bool enabled = true;
};

// Pure consistency check; empty result means the operator is well-formed.
std::vector<std::string> validate_operator(const MutationOperator& op);

// Applies `transform` to the matched bytes; delete_span yields empty bytes.
std::string apply_transform(const Transform& transform, const std::string& text);

// Ten enabled operators, each the inversion of one mechanically invertible
// fixing-pattern leaf.
const std::vector<MutationOperator>& builtin_catalog();

// Catalog file format: JSON array of operator objects using taxonomy
// canonical names. load validates every operator and rejects duplicate ids.
std::vector<MutationOperator> parse_catalog(std::string_view text);
std::vector<MutationOperator> load_catalog(const std::string& path);
std::string serialize_catalog(const std::vector<MutationOperator>& catalog);
void save_catalog(const std::vector<MutationOperator>& catalog, const std::string& path);

// nullptr when absent.
const MutationOperator* find_operator(const std::vector<MutationOperator>& catalog,
                                      std::string_view id);

}  // namespace mutforge
