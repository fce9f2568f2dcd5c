#include "mutforge/scanner.hpp"

#include <algorithm>
#include <filesystem>
#include <regex>

#include "mutforge/util.hpp"

namespace fs = std::filesystem;

namespace mutforge {

namespace {

bool is_ident_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c == '_';
}

}  // namespace

std::vector<bool> code_mask(std::string_view text) {
  enum class State { Normal, LineComment, BlockComment, HashComment, String, Char };
  std::vector<bool> mask(text.size(), false);
  State state = State::Normal;
  std::size_t block_open = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    switch (state) {
      case State::Normal:
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
          state = State::LineComment;
          mask[i] = true;
        } else if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
          state = State::BlockComment;
          block_open = i;
          mask[i] = true;
        } else if (c == '#') {
          state = State::HashComment;
          mask[i] = true;
        } else if (c == '"') {
          state = State::String;
          mask[i] = true;
        } else if (c == '\'') {
          state = State::Char;
          mask[i] = true;
        }
        break;
      case State::LineComment:
      case State::HashComment:
        if (c == '\n') {
          state = State::Normal;
        } else {
          mask[i] = true;
        }
        break;
      case State::BlockComment:
        mask[i] = true;
        // "*/" closes, except when the '*' is the opener's own second byte
        // (so "/*/" stays open).
        if (c == '/' && text[i - 1] == '*' && i >= block_open + 3) {
          state = State::Normal;
        }
        break;
      case State::String:
        mask[i] = true;
        if (c == '\\' && i + 1 < text.size()) {
          mask[++i] = true;
        } else if (c == '"') {
          state = State::Normal;
        }
        break;
      case State::Char:
        mask[i] = true;
        if (c == '\\' && i + 1 < text.size()) {
          mask[++i] = true;
        } else if (c == '\'') {
          state = State::Normal;
        }
        break;
    }
  }
  return mask;
}

std::vector<Span> find_call_blocks(std::string_view text,
                                   const std::vector<std::string>& identifiers,
                                   std::size_t max_block,
                                   std::vector<std::string>* warnings) {
  std::vector<Span> spans;
  if (identifiers.empty() || text.empty()) return spans;
  std::vector<bool> mask = code_mask(text);
  std::size_t n = text.size();

  auto token_at = [&](std::size_t i) -> std::size_t {
    // Returns the length of an identifier-set token starting at i, else 0.
    if (mask[i] || !is_ident_char(text[i])) return 0;
    if (i > 0 && is_ident_char(text[i - 1])) return 0;
    for (const std::string& name : identifiers) {
      std::size_t len = name.size();
      if (i + len > n || text.compare(i, len, name) != 0) continue;
      if (i + len < n && is_ident_char(text[i + len])) continue;
      bool clean = true;
      for (std::size_t k = i; k < i + len; ++k) {
        if (mask[k]) {
          clean = false;
          break;
        }
      }
      if (clean) return len;
    }
    return 0;
  };

  std::size_t p = 0;
  while (p < n) {
    std::size_t start = n;
    std::size_t len = 0;
    for (std::size_t i = p; i < n; ++i) {
      len = token_at(i);
      if (len > 0) {
        start = i;
        break;
      }
    }
    if (start == n) break;

    std::size_t j = start + len;
    while (j < n && (mask[j] || text[j] == ' ' || text[j] == '\t' || text[j] == '\n' ||
                     text[j] == '\r')) {
      ++j;
    }
    if (j >= n || text[j] != '(') {
      p = start + len;
      continue;
    }

    std::size_t depth = 0;
    std::size_t k = j;
    bool closed = false;
    for (; k < n; ++k) {
      if (mask[k]) continue;
      if (text[k] == '(') {
        ++depth;
      } else if (text[k] == ')') {
        --depth;
        if (depth == 0) {
          ++k;
          closed = true;
          break;
        }
      }
    }
    if (!closed) {
      if (warnings) {
        warnings->push_back("unbalanced call block starting at byte " +
                            std::to_string(start) + " dropped");
      }
      p = start + len;
      continue;
    }

    std::size_t end = k;
    std::size_t m = k;
    while (m < n && (text[m] == ' ' || text[m] == '\t')) ++m;
    if (m < n && text[m] == ';' && !mask[m]) end = m + 1;

    if (end - start > max_block) {
      p = start + len;
      continue;
    }
    spans.push_back({start, end});
    p = end;
  }
  return spans;
}

std::optional<LangScope> language_class_of(const std::string& path) {
  std::string ext = fs::path(path).extension().string();
  if (ext == ".c" || ext == ".cc" || ext == ".cpp" || ext == ".cxx" || ext == ".h" ||
      ext == ".hpp" || ext == ".cu") {
    return LangScope::CLike;
  }
  if (ext == ".py") return LangScope::Python;
  return std::nullopt;
}

namespace {

void line_bounds(std::string_view text, std::vector<std::size_t>& line_starts) {
  line_starts.clear();
  line_starts.push_back(0);
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\n') line_starts.push_back(i + 1);
  }
}

std::uint64_t line_of(const std::vector<std::size_t>& line_starts, std::uint64_t offset) {
  auto it = std::upper_bound(line_starts.begin(), line_starts.end(), offset);
  return static_cast<std::uint64_t>(it - line_starts.begin());
}

std::vector<Span> line_pattern_spans(std::string_view text, const std::vector<bool>& mask,
                                     const std::regex& pattern) {
  std::vector<Span> spans;
  std::size_t line_start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i != text.size() && text[i] != '\n') continue;
    std::size_t line_end = i;  // excludes the newline
    if (line_end > line_start) {
      std::string masked_line(text.substr(line_start, line_end - line_start));
      if (!masked_line.empty() && masked_line.back() == '\r') masked_line.pop_back();
      std::size_t content_len = masked_line.size();
      for (std::size_t k = 0; k < content_len; ++k) {
        if (mask[line_start + k]) masked_line[k] = ' ';
      }
      if (std::regex_search(masked_line, pattern)) {
        spans.push_back({line_start, line_start + content_len});
      }
    }
    line_start = i + 1;
  }
  return spans;
}

}  // namespace

std::vector<MatchSite> scan_text(std::string_view text, const std::string& file_label,
                                 const std::vector<MutationOperator>& operators,
                                 std::optional<LangScope> scope,
                                 std::vector<std::string>* warnings) {
  std::vector<MatchSite> sites;
  if (!scope) return sites;
  std::string digest = util::sha256_hex(text);
  std::vector<bool> mask = code_mask(text);
  std::vector<std::size_t> line_starts;
  line_bounds(text, line_starts);

  for (const MutationOperator& op : operators) {
    if (!op.enabled || op.language_scope.count(*scope) == 0) continue;
    std::vector<Span> spans;
    if (op.match_spec.kind == MatchKind::CallBlock) {
      spans = find_call_blocks(text, op.match_spec.identifiers, kDefaultMaxBlock, warnings);
    } else {
      std::regex pattern(op.match_spec.pattern, std::regex::ECMAScript);
      spans = line_pattern_spans(text, mask, pattern);
    }
    for (const Span& span : spans) {
      MatchSite site;
      site.file = file_label;
      site.start = span.start;
      site.end = span.end;
      site.first_line = line_of(line_starts, span.start);
      site.last_line = span.end > span.start ? line_of(line_starts, span.end - 1)
                                             : site.first_line;
      site.operator_id = op.id;
      site.matched_text = std::string(text.substr(span.start, span.end - span.start));
      site.context_digest = digest;
      sites.push_back(std::move(site));
    }
  }
  std::sort(sites.begin(), sites.end(), [](const MatchSite& a, const MatchSite& b) {
    if (a.operator_id != b.operator_id) return a.operator_id < b.operator_id;
    return a.start < b.start;
  });
  return sites;
}

std::vector<MatchSite> scan_file(const std::string& path,
                                 const std::vector<MutationOperator>& operators,
                                 std::vector<std::string>* warnings) {
  std::optional<LangScope> scope = language_class_of(path);
  if (!scope) return {};
  std::string text = util::read_file_bytes(path);
  return scan_text(text, path, operators, scope, warnings);
}

std::vector<MatchSite> scan_corpus(const std::string& root, const CorpusFilter& filter,
                                   const std::vector<MutationOperator>& operators,
                                   std::vector<std::string>* warnings) {
  fs::path root_path(root);
  std::error_code ec;
  if (!fs::is_directory(root_path, ec)) {
    throw ScanError("corpus root '" + root + "' is not a directory");
  }

  std::vector<std::string> files;
  for (fs::recursive_directory_iterator it(root_path, ec), end; it != end;
       it.increment(ec)) {
    if (ec) throw ScanError("corpus walk failed under '" + root + "': " + ec.message());
    if (!it->is_regular_file(ec)) continue;
    std::string rel = it->path().lexically_relative(root_path).generic_string();
    bool included = false;
    for (const std::string& glob : filter.include) {
      if (util::glob_match(glob, rel)) {
        included = true;
        break;
      }
    }
    if (!included) continue;
    bool excluded = false;
    for (const std::string& glob : filter.exclude) {
      if (util::glob_match(glob, rel)) {
        excluded = true;
        break;
      }
    }
    if (excluded) continue;
    if (!language_class_of(rel)) continue;
    files.push_back(rel);
  }
  std::sort(files.begin(), files.end());

  std::vector<MatchSite> sites;
  for (const std::string& rel : files) {
    std::string text;
    try {
      text = util::read_file_bytes((root_path / rel).string());
    } catch (const std::exception& e) {
      if (warnings) warnings->push_back(std::string("unreadable file skipped: ") + e.what());
      continue;
    }
    std::vector<MatchSite> file_sites =
        scan_text(text, rel, operators, language_class_of(rel), warnings);
    sites.insert(sites.end(), file_sites.begin(), file_sites.end());
  }
  std::sort(sites.begin(), sites.end(), [](const MatchSite& a, const MatchSite& b) {
    if (a.file != b.file) return a.file < b.file;
    if (a.operator_id != b.operator_id) return a.operator_id < b.operator_id;
    return a.start < b.start;
  });
  return sites;
}

}  // namespace mutforge
