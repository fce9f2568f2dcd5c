#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mutforge/mutant_store.hpp"
#include "mutforge/operator_catalog.hpp"

namespace mutforge {

// killed / (killed + alive); killed counts KilledByTest + KilledByCrash, plus
// KilledByTimeout when include_timeouts. Invalid and Skipped never enter the
// denominator. Throws std::invalid_argument when nothing was measured.
double mutation_score(const CampaignSummary& summary, bool include_timeouts);

// {numerator, denominator} behind mutation_score, exact.
std::pair<long long, long long> score_fraction(const CampaignSummary& summary,
                                               bool include_timeouts);

enum class GroupBy { Operator, FixingCategory, Cwe, File };
std::string_view to_string(GroupBy g);
std::optional<GroupBy> parse_group_by(std::string_view name);

struct AliveEntry {
  std::string mutant_id;
  std::string file;
  std::uint64_t first_line = 0;
  std::uint64_t last_line = 0;
  std::string operator_id;
  std::string excerpt;  // first line of the matched text, printable, bounded

  bool operator==(const AliveEntry&) const = default;
};

struct AliveGroup {
  std::string key;
  std::vector<AliveEntry> entries;

  bool operator==(const AliveGroup&) const = default;
};

// Each Alive mutant lands in exactly one group. Groups are sorted by
// descending size, ties by key; entries by (file, line, operator).
// The catalog resolves fixing-pattern and CWE keys; operators missing from it
// group under "unknown" / "uncategorized".
std::vector<AliveGroup> alive_report(const MutantStore& store, GroupBy group_by,
                                     const std::vector<MutationOperator>& catalog);

struct CampaignReport {
  CampaignSummary summary;
  bool include_timeouts = true;
  long long killed = 0;  // numerator under the chosen timeout convention
  long long alive = 0;
  std::optional<double> score;  // empty when killed + alive == 0
  GroupBy group_by = GroupBy::Operator;
  std::vector<AliveGroup> alive_groups;

  bool operator==(const CampaignReport&) const = default;
};

CampaignReport build_campaign_report(const MutantStore& store,
                                     const std::vector<MutationOperator>& catalog,
                                     GroupBy group_by, bool include_timeouts);

enum class ReportFormat { Text, Json, Csv };
std::optional<ReportFormat> parse_report_format(std::string_view name);

// text: human-oriented; json: lossless (see parse_campaign_report);
// csv: one data row per alive group under a header.
std::string render_report(const CampaignReport& report, ReportFormat format);

// Inverse of the json rendering.
CampaignReport parse_campaign_report(std::string_view json_text);

}  // namespace mutforge
