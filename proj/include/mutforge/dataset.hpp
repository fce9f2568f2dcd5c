#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mutforge/taxonomy.hpp"

namespace mutforge {

// Thrown by load_dataset on malformed input or label violations.
class DatasetError : public std::runtime_error {
 public:
  explicit DatasetError(const std::string& what) : std::runtime_error(what) {}
};

// Counting dimensions. The *_subcategory dimensions key records by leaf,
// the rest by top-level category (library / class / symptom / effort bucket).
enum class Dimension {
  Library,
  VulnCategory,
  VulnSubcategory,
  RootCause,
  RootCauseSubcategory,
  Symptom,
  Fixing,
  FixingSubcategory,
  Effort,
};

std::string_view to_string(Dimension d);
std::optional<Dimension> parse_dimension(std::string_view s);

// Canonical key of `record` along `d` (a canonical enum name).
std::string dimension_key(const VulnRecord& record, Dimension d);
// All keys of `d`'s domain, in canonical declaration order.
std::vector<std::string> dimension_domain(Dimension d);

// Conjunctive record filter; unset fields match everything.
struct RecordFilter {
  std::optional<Library> library;
  std::optional<VulnClass> vuln_category;
  std::optional<RootCauseClass> root_cause_category;
  std::optional<FixClass> fixing_category;
  std::optional<Symptom> symptom;
  std::optional<EffortBucket> effort;

  bool matches(const VulnRecord& record) const;
};

// Ordered key -> count table. Only keys with nonzero counts appear,
// in canonical domain order.
struct CountTable {
  std::vector<std::pair<std::string, long long>> entries;

  long long total() const;
  long long at(std::string_view key) const;  // 0 when absent
};

// Dense counts over the full domains of both dimensions.
struct CrossTab {
  std::vector<std::string> row_keys;
  std::vector<std::string> col_keys;
  std::vector<std::vector<long long>> cells;  // cells[row][col]

  long long at(std::string_view row, std::string_view col) const;
  long long row_total(std::string_view row) const;
  long long col_total(std::string_view col) const;
  long long grand_total() const;
};

CountTable count_by(const std::vector<VulnRecord>& records, Dimension d,
                    const RecordFilter& filter = {});
// pre: row_dim != col_dim (throws std::invalid_argument otherwise).
CrossTab cross_tab(const std::vector<VulnRecord>& records, Dimension row_dim,
                   Dimension col_dim);
// Fraction of records in the Micro or Small effort bucket.
// pre: records non-empty (throws std::invalid_argument otherwise).
double micro_small_share(const std::vector<VulnRecord>& records);

// Loading / saving. Schema: delimited text, ',' between columns, ';' inside
// list-valued columns, fixed 13-column header (see kDatasetHeader).
extern const char kDatasetHeader[];

std::vector<VulnRecord> parse_dataset(std::string_view text);
std::vector<VulnRecord> load_dataset(const std::string& path);
std::string serialize_record(const VulnRecord& record);
std::string serialize_dataset(const std::vector<VulnRecord>& records);
void save_dataset(const std::vector<VulnRecord>& records, const std::string& path);

// Everything the stats command publishes for one dataset.
struct StatsReport {
  long long record_count = 0;
  CountTable by_library;
  CrossTab library_by_vuln;        // library x vuln class
  CrossTab library_by_root_cause;  // library x root-cause class
  CrossTab library_by_symptom;     // library x symptom
  CrossTab library_by_fixing;      // library x fixing class
  CountTable by_vuln_subcategory;
  CountTable by_root_cause_subcategory;
  CountTable by_fixing_subcategory;
  CountTable by_effort;
  CrossTab root_cause_by_symptom;
  CrossTab root_cause_by_fixing;
  CrossTab root_cause_by_effort;
  double micro_small_share = 0.0;
};

StatsReport build_stats_report(const std::vector<VulnRecord>& records);

enum class StatsFormat { Text, Json, Csv };
std::optional<StatsFormat> parse_stats_format(std::string_view s);
std::string render_stats(const StatsReport& report, StatsFormat format);

}  // namespace mutforge
