#include "mutforge/reporter.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "mutforge/util.hpp"

namespace mutforge {

std::pair<long long, long long> score_fraction(const CampaignSummary& summary,
                                               bool include_timeouts) {
  long long killed = summary.count(MutantStatus::KilledByTest) +
                     summary.count(MutantStatus::KilledByCrash);
  if (include_timeouts) killed += summary.count(MutantStatus::KilledByTimeout);
  long long alive = summary.count(MutantStatus::Alive);
  return {killed, killed + alive};
}

double mutation_score(const CampaignSummary& summary, bool include_timeouts) {
  auto [killed, measured] = score_fraction(summary, include_timeouts);
  if (measured == 0)
    throw std::invalid_argument("mutation score undefined: nothing was measured");
  return static_cast<double>(killed) / static_cast<double>(measured);
}

std::string_view to_string(GroupBy g) {
  switch (g) {
    case GroupBy::Operator: return "operator";
    case GroupBy::FixingCategory: return "fixing_category";
    case GroupBy::Cwe: return "cwe";
    case GroupBy::File: return "file";
  }
  return "operator";
}

std::optional<GroupBy> parse_group_by(std::string_view name) {
  for (GroupBy g : {GroupBy::Operator, GroupBy::FixingCategory, GroupBy::Cwe,
                    GroupBy::File}) {
    if (to_string(g) == name) return g;
  }
  return std::nullopt;
}

namespace {

constexpr std::size_t kExcerptLimit = 120;

std::string excerpt_of(const std::string& matched_text) {
  std::string out;
  for (char c : matched_text) {
    if (c == '\n') break;
    if (out.size() >= kExcerptLimit) {
      out += "...";
      break;
    }
    unsigned char u = static_cast<unsigned char>(c);
    out += (u < 0x20 || u > 0x7e) ? ' ' : c;
  }
  return out;
}

std::string group_key_of(const Mutant& mutant, GroupBy group_by,
                         const std::vector<MutationOperator>& catalog) {
  switch (group_by) {
    case GroupBy::Operator:
      return mutant.site.operator_id;
    case GroupBy::File:
      return mutant.site.file;
    case GroupBy::FixingCategory: {
      const MutationOperator* op = find_operator(catalog, mutant.site.operator_id);
      if (op == nullptr) return "unknown";
      return std::string(to_string(op->inverted_fixing_pattern.category));
    }
    case GroupBy::Cwe: {
      const MutationOperator* op = find_operator(catalog, mutant.site.operator_id);
      if (op == nullptr || !op->seeds_cwe) return "uncategorized";
      return "CWE-" + std::to_string(*op->seeds_cwe);
    }
  }
  return "unknown";
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::vector<AliveGroup> alive_report(const MutantStore& store, GroupBy group_by,
                                     const std::vector<MutationOperator>& catalog) {
  std::map<std::string, std::vector<AliveEntry>> buckets;
  for (const Mutant& mutant : store.mutants()) {
    if (mutant.status != MutantStatus::Alive) continue;
    AliveEntry entry;
    entry.mutant_id = mutant.mutant_id;
    entry.file = mutant.site.file;
    entry.first_line = mutant.site.first_line;
    entry.last_line = mutant.site.last_line;
    entry.operator_id = mutant.site.operator_id;
    entry.excerpt = excerpt_of(mutant.site.matched_text);
    buckets[group_key_of(mutant, group_by, catalog)].push_back(std::move(entry));
  }
  std::vector<AliveGroup> groups;
  groups.reserve(buckets.size());
  for (auto& [key, entries] : buckets) {
    std::sort(entries.begin(), entries.end(),
              [](const AliveEntry& a, const AliveEntry& b) {
                return std::tie(a.file, a.first_line, a.operator_id, a.mutant_id) <
                       std::tie(b.file, b.first_line, b.operator_id, b.mutant_id);
              });
    groups.push_back(AliveGroup{key, std::move(entries)});
  }
  std::sort(groups.begin(), groups.end(), [](const AliveGroup& a, const AliveGroup& b) {
    if (a.entries.size() != b.entries.size())
      return a.entries.size() > b.entries.size();
    return a.key < b.key;
  });
  return groups;
}

CampaignReport build_campaign_report(const MutantStore& store,
                                     const std::vector<MutationOperator>& catalog,
                                     GroupBy group_by, bool include_timeouts) {
  CampaignReport report;
  report.summary = store.summarize();
  report.include_timeouts = include_timeouts;
  auto [killed, measured] = score_fraction(report.summary, include_timeouts);
  report.killed = killed;
  report.alive = measured - killed;
  if (measured > 0) report.score = mutation_score(report.summary, include_timeouts);
  report.group_by = group_by;
  report.alive_groups = alive_report(store, group_by, catalog);
  return report;
}

std::optional<ReportFormat> parse_report_format(std::string_view name) {
  if (name == "text") return ReportFormat::Text;
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  return std::nullopt;
}

namespace {

std::string render_text(const CampaignReport& report) {
  std::ostringstream out;
  out << "campaign: " << report.summary.total << " mutants\n";
  for (MutantStatus status : all_mutant_statuses()) {
    out << "  " << to_string(status) << ": " << report.summary.count(status)
        << "\n";
  }
  const char* convention =
      report.include_timeouts ? "timeouts included" : "timeouts excluded";
  if (report.score) {
    out << "mutation score (" << convention << "): " << report.killed << "/"
        << (report.killed + report.alive) << " = "
        << util::format_fixed(*report.score * 100.0, 1) << "%\n";
  } else {
    out << "mutation score (" << convention << "): undefined (nothing measured)\n";
  }
  if (report.alive_groups.empty()) {
    out << "no alive mutants\n";
    return out.str();
  }
  out << "alive mutants by " << to_string(report.group_by) << ":\n";
  for (const AliveGroup& group : report.alive_groups) {
    out << "  " << group.key << " (" << group.entries.size() << ")\n";
    for (const AliveEntry& entry : group.entries) {
      out << "    " << entry.file << ":" << entry.first_line;
      if (entry.last_line != entry.first_line) out << "-" << entry.last_line;
      out << " [" << entry.operator_id << "] " << entry.excerpt << "\n";
    }
  }
  return out.str();
}

nlohmann::json summary_to_json(const CampaignSummary& summary) {
  nlohmann::json by_status = nlohmann::json::object();
  for (const auto& [status, count] : summary.by_status)
    by_status[std::string(to_string(status))] = count;
  nlohmann::json by_operator = nlohmann::json::object();
  for (const auto& [op, counts] : summary.by_operator) {
    nlohmann::json inner = nlohmann::json::object();
    for (const auto& [status, count] : counts)
      inner[std::string(to_string(status))] = count;
    by_operator[op] = inner;
  }
  return {{"total", summary.total},
          {"by_status", by_status},
          {"by_operator", by_operator}};
}

CampaignSummary summary_from_json(const nlohmann::json& j) {
  CampaignSummary summary;
  summary.total = j.at("total").get<long long>();
  for (const auto& [name, count] : j.at("by_status").items()) {
    auto status = parse_mutant_status(name);
    if (!status) throw std::invalid_argument("unknown status: " + name);
    summary.by_status[*status] = count.get<long long>();
  }
  for (const auto& [op, counts] : j.at("by_operator").items()) {
    for (const auto& [name, count] : counts.items()) {
      auto status = parse_mutant_status(name);
      if (!status) throw std::invalid_argument("unknown status: " + name);
      summary.by_operator[op][*status] = count.get<long long>();
    }
  }
  return summary;
}

std::string render_json(const CampaignReport& report) {
  nlohmann::json j;
  j["summary"] = summary_to_json(report.summary);
  j["include_timeouts"] = report.include_timeouts;
  j["killed"] = report.killed;
  j["alive"] = report.alive;
  if (report.score) {
    j["score"] = *report.score;
  } else {
    j["score"] = nullptr;
  }
  j["group_by"] = std::string(to_string(report.group_by));
  nlohmann::json groups = nlohmann::json::array();
  for (const AliveGroup& group : report.alive_groups) {
    nlohmann::json entries = nlohmann::json::array();
    for (const AliveEntry& entry : group.entries) {
      entries.push_back({{"mutant_id", entry.mutant_id},
                         {"file", entry.file},
                         {"first_line", entry.first_line},
                         {"last_line", entry.last_line},
                         {"operator_id", entry.operator_id},
                         {"excerpt", entry.excerpt}});
    }
    groups.push_back({{"key", group.key},
                      {"count", group.entries.size()},
                      {"entries", entries}});
  }
  j["alive_groups"] = groups;
  return j.dump(2) + "\n";
}

std::string render_csv(const CampaignReport& report) {
  std::ostringstream out;
  out << "group,count\n";
  for (const AliveGroup& group : report.alive_groups)
    out << csv_escape(group.key) << "," << group.entries.size() << "\n";
  return out.str();
}

}  // namespace

std::string render_report(const CampaignReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::Text: return render_text(report);
    case ReportFormat::Json: return render_json(report);
    case ReportFormat::Csv: return render_csv(report);
  }
  return render_text(report);
}

CampaignReport parse_campaign_report(std::string_view json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  CampaignReport report;
  report.summary = summary_from_json(j.at("summary"));
  report.include_timeouts = j.at("include_timeouts").get<bool>();
  report.killed = j.at("killed").get<long long>();
  report.alive = j.at("alive").get<long long>();
  if (!j.at("score").is_null()) report.score = j.at("score").get<double>();
  auto group_by = parse_group_by(j.at("group_by").get<std::string>());
  if (!group_by) throw std::invalid_argument("unknown group_by");
  report.group_by = *group_by;
  for (const auto& group_json : j.at("alive_groups")) {
    AliveGroup group;
    group.key = group_json.at("key").get<std::string>();
    for (const auto& entry_json : group_json.at("entries")) {
      AliveEntry entry;
      entry.mutant_id = entry_json.at("mutant_id").get<std::string>();
      entry.file = entry_json.at("file").get<std::string>();
      entry.first_line = entry_json.at("first_line").get<std::uint64_t>();
      entry.last_line = entry_json.at("last_line").get<std::uint64_t>();
      entry.operator_id = entry_json.at("operator_id").get<std::string>();
      entry.excerpt = entry_json.at("excerpt").get<std::string>();
      group.entries.push_back(std::move(entry));
    }
    report.alive_groups.push_back(std::move(group));
  }
  return report;
}

}  // namespace mutforge
