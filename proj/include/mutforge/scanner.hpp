#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mutforge/operator_catalog.hpp"

namespace mutforge {

class ScanError : public std::runtime_error {
 public:
  explicit ScanError(const std::string& what) : std::runtime_error(what) {}
};

struct MatchSite {
  std::string file;
  std::uint64_t start = 0;  // byte span, half-open
  std::uint64_t end = 0;
  std::uint64_t first_line = 0;  // 1-based, inclusive
  std::uint64_t last_line = 0;
  std::string operator_id;
  std::string matched_text;
  std::string context_digest;  // digest of the whole file at scan time

  bool operator==(const MatchSite&) const = default;
};

struct Span {
  std::uint64_t start = 0;
  std::uint64_t end = 0;

  bool operator==(const Span&) const = default;
};

// Marks bytes inside //, /* */ and #-to-end-of-line comments, string literals
// and character literals. Marked bytes never participate in matching or
// parenthesis balancing. Lexical only: no preprocessor evaluation.
std::vector<bool> code_mask(std::string_view text);

inline constexpr std::size_t kDefaultMaxBlock = 4096;

// `<identifier> ( balanced ) [;]` spans, greedy left-to-right, non-overlapping.
// Candidates longer than max_block are dropped; a candidate left unbalanced at
// end of input is dropped with a warning.
std::vector<Span> find_call_blocks(std::string_view text,
                                   const std::vector<std::string>& identifiers,
                                   std::size_t max_block = kDefaultMaxBlock,
                                   std::vector<std::string>* warnings = nullptr);

// Language class by extension: c_like = {.c,.cc,.cpp,.cxx,.h,.hpp,.cu},
// python = {.py}; anything else is not scanned.
std::optional<LangScope> language_class_of(const std::string& path);

// Sites for all enabled operators whose scope covers `scope`, sorted by
// (operator id, byte offset). `file_label` is recorded as site.file.
std::vector<MatchSite> scan_text(std::string_view text, const std::string& file_label,
                                 const std::vector<MutationOperator>& operators,
                                 std::optional<LangScope> scope = LangScope::CLike,
                                 std::vector<std::string>* warnings = nullptr);

std::vector<MatchSite> scan_file(const std::string& path,
                                 const std::vector<MutationOperator>& operators,
                                 std::vector<std::string>* warnings = nullptr);

struct CorpusFilter {
  std::vector<std::string> include = {"*"};
  std::vector<std::string> exclude = {"*test*", "*generated*"};
};

// Union of scan_file over selected files; site.file is the path relative to
// root, sorted by (file, operator id, offset). Unreadable files are reported
// as warnings and skipped; a missing root is fatal.
std::vector<MatchSite> scan_corpus(const std::string& root, const CorpusFilter& filter,
                                   const std::vector<MutationOperator>& operators,
                                   std::vector<std::string>* warnings = nullptr);

}  // namespace mutforge
