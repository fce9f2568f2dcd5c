#pragma once

#include <regex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mutforge {

class MinerError : public std::runtime_error {
 public:
  explicit MinerError(const std::string& what) : std::runtime_error(what) {}
};

struct CommitRecord {
  std::string sha;
  std::string message;
  long long added_lines = 0;
  long long deleted_lines = 0;
  std::vector<std::string> files;

  bool operator==(const CommitRecord&) const = default;
};

struct MinerVerdict {
  bool flagged = false;
  std::vector<std::string> matched_keywords;
  std::vector<std::string> cve_ids;
};

// One security-keyword rule; matching is case-insensitive.
struct KeywordRule {
  std::string name;
  std::string pattern;
  std::regex compiled;
};

// All case-insensitive CVE-<year>-<4+ digit> ids in `message`, upper-cased,
// de-duplicated, in first-occurrence order.
std::vector<std::string> extract_cves(std::string_view message);

// Built-in rule set covering the common security fix vocabulary; a bundled
// copy ships as a rule file so deployments can override it.
const std::vector<KeywordRule>& default_rules();

// Rule file format: one rule per line, `name<TAB>regex`; blank lines and
// lines starting with '#' are ignored. Bad regexes raise MinerError.
std::vector<KeywordRule> parse_rules(std::string_view text);
std::vector<KeywordRule> load_rules(const std::string& path);
std::string serialize_rules(const std::vector<KeywordRule>& rules);

MinerVerdict match_security_keywords(std::string_view message,
                                     const std::vector<KeywordRule>& rules);

// Commit log format: one commit per line, `sha<TAB>added<TAB>deleted<TAB>message`
// with the message control-escaped (\n, \t, \r, \\).
std::vector<CommitRecord> parse_commit_log(std::string_view text);
std::vector<CommitRecord> load_commit_log(const std::string& path);
std::string serialize_commit_log(const std::vector<CommitRecord>& records);

// Adapter for `git log --numstat` output (full commit blocks with indented
// message lines and per-file numstat rows; '-' counts as 0).
std::vector<CommitRecord> parse_git_numstat(std::string_view text);

// Flagged commits only, in input order.
std::vector<std::pair<CommitRecord, MinerVerdict>> mine(
    const std::vector<CommitRecord>& log, const std::vector<KeywordRule>& rules);

struct CveGroup {
  std::string cve_id;
  std::vector<CommitRecord> commits;
};

struct CveGrouping {
  std::vector<CveGroup> groups;         // first-occurrence order of CVE ids
  std::vector<CommitRecord> remainder;  // flagged commits with no CVE
};

CveGrouping group_by_cve(const std::vector<std::pair<CommitRecord, MinerVerdict>>& flagged);

}  // namespace mutforge
