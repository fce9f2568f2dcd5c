#include "mutforge/commit_miner.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "mutforge/util.hpp"

namespace mutforge {

namespace {

const std::regex& cve_regex() {
  static const std::regex pattern(R"(CVE-\d{4}-\d{4,})",
                                  std::regex::ECMAScript | std::regex::icase);
  return pattern;
}

KeywordRule make_rule(std::string name, std::string pattern) {
  std::regex compiled(pattern, std::regex::ECMAScript | std::regex::icase);
  return {std::move(name), std::move(pattern), std::move(compiled)};
}

long long parse_count(std::string_view field, std::size_t line_no, const char* what) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || value < 0) {
    throw MinerError("line " + std::to_string(line_no) + ": bad " + what + " '" +
                     std::string(field) + "'");
  }
  return value;
}

}  // namespace

std::vector<std::string> extract_cves(std::string_view message) {
  std::vector<std::string> out;
  auto begin = std::cregex_iterator(message.data(), message.data() + message.size(),
                                    cve_regex());
  for (auto it = begin; it != std::cregex_iterator(); ++it) {
    std::string id = it->str();
    std::transform(id.begin(), id.end(), id.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
  }
  return out;
}

const std::vector<KeywordRule>& default_rules() {
  static const std::vector<KeywordRule> rules = [] {
    std::vector<KeywordRule> r;
    r.push_back(make_rule("vulnerability", R"(\bvulnerab)"));
    r.push_back(make_rule("security", R"(\bsecurity\b)"));
    r.push_back(make_rule("exploit", R"(\bexploit)"));
    r.push_back(make_rule("attack", R"(\battack)"));
    r.push_back(make_rule("cve", R"(\bCVE-\d{4}-\d{4,}\b)"));
    r.push_back(make_rule("overflow", R"(\boverflow)"));
    r.push_back(make_rule("underflow", R"(\bunderflow)"));
    r.push_back(make_rule("out-of-bounds", R"(\bout[- ]of[- ]bounds?\b)"));
    r.push_back(make_rule("use-after-free", R"(\buse[- ]after[- ]free\b)"));
    r.push_back(make_rule("double-free", R"(\bdouble[- ]free)"));
    r.push_back(make_rule("memory-leak", R"(\bmemory[- ]leak)"));
    r.push_back(make_rule("null-pointer", R"(\bnull[- ]?(pointer|ptr|deref\w*)\b)"));
    r.push_back(make_rule("segfault", R"(\bseg(mentation )?fault)"));
    r.push_back(make_rule("division-by-zero", R"(\bdivi\w*[- ]by[- ]zero\b)"));
    r.push_back(make_rule("race-condition", R"(\b(race[- ]condition|data[- ]race)\b)"));
    r.push_back(make_rule("deadlock", R"(\bdead[- ]?lock)"));
    r.push_back(make_rule("infinite-loop", R"(\binfinite[- ]loop)"));
    r.push_back(make_rule("denial-of-service", R"(\bdenial[- ]of[- ]service\b)"));
    r.push_back(make_rule("xss", R"(\bxss\b|\bcross[- ]site scripting)"));
    r.push_back(make_rule("injection", R"(\binjection\b)"));
    r.push_back(make_rule("uninitialized", R"(\buninitiali[sz]ed)"));
    return r;
  }();
  return rules;
}

std::vector<KeywordRule> parse_rules(std::string_view text) {
  std::vector<KeywordRule> rules;
  std::vector<std::string> lines = util::split(text, '\n');
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string line = lines[i];
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw MinerError("line " + std::to_string(i + 1) + ": expected name<TAB>regex");
    }
    std::string name = line.substr(0, tab);
    std::string pattern = line.substr(tab + 1);
    try {
      rules.push_back(make_rule(name, pattern));
    } catch (const std::regex_error& e) {
      throw MinerError("line " + std::to_string(i + 1) + ": bad regex for rule '" + name +
                       "': " + e.what());
    }
  }
  return rules;
}

std::vector<KeywordRule> load_rules(const std::string& path) {
  return parse_rules(util::read_file_bytes(path));
}

std::string serialize_rules(const std::vector<KeywordRule>& rules) {
  std::string out;
  for (const KeywordRule& rule : rules) {
    out += rule.name;
    out += '\t';
    out += rule.pattern;
    out += '\n';
  }
  return out;
}

MinerVerdict match_security_keywords(std::string_view message,
                                     const std::vector<KeywordRule>& rules) {
  MinerVerdict verdict;
  for (const KeywordRule& rule : rules) {
    if (std::regex_search(message.begin(), message.end(), rule.compiled)) {
      verdict.matched_keywords.push_back(rule.name);
    }
  }
  verdict.cve_ids = extract_cves(message);
  verdict.flagged = !verdict.matched_keywords.empty() || !verdict.cve_ids.empty();
  return verdict;
}

std::vector<CommitRecord> parse_commit_log(std::string_view text) {
  std::vector<CommitRecord> records;
  std::vector<std::string> lines = util::split(text, '\n');
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string line = lines[i];
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields = util::split(line, '\t');
    if (fields.size() != 4) {
      throw MinerError("line " + std::to_string(i + 1) + ": expected 4 tab-separated fields, got " +
                       std::to_string(fields.size()));
    }
    if (fields[0].empty()) {
      throw MinerError("line " + std::to_string(i + 1) + ": empty sha");
    }
    CommitRecord record;
    record.sha = fields[0];
    record.added_lines = parse_count(fields[1], i + 1, "added count");
    record.deleted_lines = parse_count(fields[2], i + 1, "deleted count");
    record.message = util::unescape_control(fields[3]);
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<CommitRecord> load_commit_log(const std::string& path) {
  return parse_commit_log(util::read_file_bytes(path));
}

std::string serialize_commit_log(const std::vector<CommitRecord>& records) {
  std::string out;
  for (const CommitRecord& record : records) {
    out += record.sha;
    out += '\t';
    out += std::to_string(record.added_lines);
    out += '\t';
    out += std::to_string(record.deleted_lines);
    out += '\t';
    out += util::escape_control(record.message);
    out += '\n';
  }
  return out;
}

std::vector<CommitRecord> parse_git_numstat(std::string_view text) {
  std::vector<CommitRecord> records;
  CommitRecord current;
  bool in_commit = false;
  std::string message;

  auto flush = [&] {
    if (!in_commit) return;
    current.message = util::trim(message);
    records.push_back(std::move(current));
    current = {};
    message.clear();
    in_commit = false;
  };

  std::vector<std::string> lines = util::split(text, '\n');
  for (std::string& line : lines) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("commit ", 0) == 0) {
      flush();
      in_commit = true;
      std::vector<std::string> parts = util::split_nonempty(line.substr(7), ' ');
      current.sha = parts.empty() ? "" : parts[0];
      continue;
    }
    if (!in_commit) continue;
    if (line.rfind("    ", 0) == 0) {
      if (!message.empty()) message += '\n';
      message += line.substr(4);
      continue;
    }
    // numstat row: added<TAB>deleted<TAB>path, '-' for binary entries.
    std::vector<std::string> fields = util::split(line, '\t');
    if (fields.size() == 3 && !fields[0].empty()) {
      auto count = [](const std::string& field) -> long long {
        if (field == "-") return 0;
        long long value = 0;
        auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
        if (ec != std::errc{} || ptr != field.data() + field.size()) return -1;
        return value;
      };
      long long added = count(fields[0]);
      long long deleted = count(fields[1]);
      if (added >= 0 && deleted >= 0) {
        current.added_lines += added;
        current.deleted_lines += deleted;
        current.files.push_back(fields[2]);
      }
    }
  }
  flush();
  return records;
}

std::vector<std::pair<CommitRecord, MinerVerdict>> mine(
    const std::vector<CommitRecord>& log, const std::vector<KeywordRule>& rules) {
  std::vector<std::pair<CommitRecord, MinerVerdict>> flagged;
  for (const CommitRecord& record : log) {
    MinerVerdict verdict = match_security_keywords(record.message, rules);
    if (verdict.flagged) flagged.emplace_back(record, std::move(verdict));
  }
  return flagged;
}

CveGrouping group_by_cve(const std::vector<std::pair<CommitRecord, MinerVerdict>>& flagged) {
  CveGrouping grouping;
  for (const auto& [record, verdict] : flagged) {
    if (verdict.cve_ids.empty()) {
      grouping.remainder.push_back(record);
      continue;
    }
    for (const std::string& cve : verdict.cve_ids) {
      auto it = std::find_if(grouping.groups.begin(), grouping.groups.end(),
                             [&cve](const CveGroup& g) { return g.cve_id == cve; });
      if (it == grouping.groups.end()) {
        grouping.groups.push_back({cve, {record}});
      } else {
        it->commits.push_back(record);
      }
    }
  }
  return grouping;
}

}  // namespace mutforge
