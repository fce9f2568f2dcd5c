#include "mutforge/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "mutforge/util.hpp"

namespace mutforge {

namespace {

constexpr std::string_view kDimensionNames[] = {
    "library",      "vuln_category", "vuln_subcategory",    "root_cause",
    "root_cause_subcategory", "symptom", "fixing", "fixing_subcategory", "effort",
};
constexpr Dimension kDimensions[] = {
    Dimension::Library,        Dimension::VulnCategory, Dimension::VulnSubcategory,
    Dimension::RootCause,      Dimension::RootCauseSubcategory, Dimension::Symptom,
    Dimension::Fixing,         Dimension::FixingSubcategory,    Dimension::Effort,
};

}  // namespace

std::string_view to_string(Dimension d) {
  return kDimensionNames[static_cast<std::size_t>(d)];
}

std::optional<Dimension> parse_dimension(std::string_view s) {
  for (std::size_t i = 0; i < std::size(kDimensions); ++i) {
    if (kDimensionNames[i] == s) return kDimensions[i];
  }
  return std::nullopt;
}

std::string dimension_key(const VulnRecord& record, Dimension d) {
  switch (d) {
    case Dimension::Library: return std::string(to_string(record.library));
    case Dimension::VulnCategory: return std::string(to_string(record.vuln.category));
    case Dimension::VulnSubcategory: return std::string(to_string(record.vuln.subcategory));
    case Dimension::RootCause: return std::string(to_string(record.root_cause.category));
    case Dimension::RootCauseSubcategory:
      return std::string(to_string(record.root_cause.subcategory));
    case Dimension::Symptom: return std::string(to_string(record.symptom));
    case Dimension::Fixing: return std::string(to_string(record.fixing.category));
    case Dimension::FixingSubcategory:
      return std::string(to_string(record.fixing.subcategory));
    case Dimension::Effort: return std::string(to_string(record.effort()));
  }
  return {};
}

std::vector<std::string> dimension_domain(Dimension d) {
  std::vector<std::string> keys;
  auto collect = [&keys](auto span) {
    for (auto v : span) keys.emplace_back(to_string(v));
  };
  switch (d) {
    case Dimension::Library: collect(all_libraries()); break;
    case Dimension::VulnCategory: collect(all_vuln_classes()); break;
    case Dimension::VulnSubcategory: collect(all_vuln_leaves()); break;
    case Dimension::RootCause: collect(all_root_cause_classes()); break;
    case Dimension::RootCauseSubcategory: collect(all_root_cause_leaves()); break;
    case Dimension::Symptom: collect(all_symptoms()); break;
    case Dimension::Fixing: collect(all_fix_classes()); break;
    case Dimension::FixingSubcategory: collect(all_fix_leaves()); break;
    case Dimension::Effort: collect(all_effort_buckets()); break;
  }
  return keys;
}

bool RecordFilter::matches(const VulnRecord& record) const {
  if (library && record.library != *library) return false;
  if (vuln_category && record.vuln.category != *vuln_category) return false;
  if (root_cause_category && record.root_cause.category != *root_cause_category) return false;
  if (fixing_category && record.fixing.category != *fixing_category) return false;
  if (symptom && record.symptom != *symptom) return false;
  if (effort && record.effort() != *effort) return false;
  return true;
}

long long CountTable::total() const {
  long long sum = 0;
  for (const auto& [key, count] : entries) sum += count;
  return sum;
}

long long CountTable::at(std::string_view key) const {
  for (const auto& [k, count] : entries) {
    if (k == key) return count;
  }
  return 0;
}

long long CrossTab::at(std::string_view row, std::string_view col) const {
  for (std::size_t r = 0; r < row_keys.size(); ++r) {
    if (row_keys[r] != row) continue;
    for (std::size_t c = 0; c < col_keys.size(); ++c) {
      if (col_keys[c] == col) return cells[r][c];
    }
  }
  return 0;
}

long long CrossTab::row_total(std::string_view row) const {
  for (std::size_t r = 0; r < row_keys.size(); ++r) {
    if (row_keys[r] != row) continue;
    long long sum = 0;
    for (long long v : cells[r]) sum += v;
    return sum;
  }
  return 0;
}

long long CrossTab::col_total(std::string_view col) const {
  for (std::size_t c = 0; c < col_keys.size(); ++c) {
    if (col_keys[c] != col) continue;
    long long sum = 0;
    for (const auto& row : cells) sum += row[c];
    return sum;
  }
  return 0;
}

long long CrossTab::grand_total() const {
  long long sum = 0;
  for (const auto& row : cells) {
    for (long long v : row) sum += v;
  }
  return sum;
}

CountTable count_by(const std::vector<VulnRecord>& records, Dimension d,
                    const RecordFilter& filter) {
  std::vector<std::string> domain = dimension_domain(d);
  std::vector<long long> counts(domain.size(), 0);
  for (const VulnRecord& record : records) {
    if (!filter.matches(record)) continue;
    std::string key = dimension_key(record, d);
    auto it = std::find(domain.begin(), domain.end(), key);
    counts[static_cast<std::size_t>(it - domain.begin())]++;
  }
  CountTable table;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    if (counts[i] > 0) table.entries.emplace_back(domain[i], counts[i]);
  }
  return table;
}

CrossTab cross_tab(const std::vector<VulnRecord>& records, Dimension row_dim,
                   Dimension col_dim) {
  if (row_dim == col_dim) {
    throw std::invalid_argument("cross_tab: row and column dimensions must differ");
  }
  CrossTab tab;
  tab.row_keys = dimension_domain(row_dim);
  tab.col_keys = dimension_domain(col_dim);
  tab.cells.assign(tab.row_keys.size(),
                   std::vector<long long>(tab.col_keys.size(), 0));
  for (const VulnRecord& record : records) {
    std::string rk = dimension_key(record, row_dim);
    std::string ck = dimension_key(record, col_dim);
    auto rit = std::find(tab.row_keys.begin(), tab.row_keys.end(), rk);
    auto cit = std::find(tab.col_keys.begin(), tab.col_keys.end(), ck);
    tab.cells[static_cast<std::size_t>(rit - tab.row_keys.begin())]
             [static_cast<std::size_t>(cit - tab.col_keys.begin())]++;
  }
  return tab;
}

double micro_small_share(const std::vector<VulnRecord>& records) {
  if (records.empty()) {
    throw std::invalid_argument("micro_small_share: empty record set");
  }
  long long hits = 0;
  for (const VulnRecord& record : records) {
    EffortBucket bucket = record.effort();
    if (bucket == EffortBucket::Micro || bucket == EffortBucket::Small) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(records.size());
}

const char kDatasetHeader[] =
    "id,library,vuln_category,vuln_subcategory,root_cause_category,"
    "root_cause_subcategory,symptom,fixing_category,fixing_subcategory,"
    "added_lines,deleted_lines,commit_ids,cve_ids";

namespace {

long long parse_count_field(std::string_view field, std::size_t line_no,
                            const char* what) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw DatasetError("line " + std::to_string(line_no) + ": bad " + what + " '" +
                       std::string(field) + "'");
  }
  return value;
}

template <typename Parser>
auto parse_enum_field(Parser parser, std::string_view field, std::size_t line_no,
                      const char* what) {
  auto parsed = parser(field);
  if (!parsed) {
    throw DatasetError("line " + std::to_string(line_no) + ": unknown " + what + " '" +
                       std::string(field) + "'");
  }
  return *parsed;
}

}  // namespace

std::vector<VulnRecord> parse_dataset(std::string_view text) {
  std::vector<std::string> lines = util::split(text, '\n');
  // Tolerate CRLF and a trailing newline.
  for (std::string& line : lines) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();

  if (lines.empty()) throw DatasetError("line 1: missing header");
  if (lines[0] != kDatasetHeader) {
    throw DatasetError("line 1: bad header (expected '" + std::string(kDatasetHeader) + "')");
  }

  std::vector<VulnRecord> records;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::size_t line_no = i + 1;
    std::vector<std::string> fields = util::split(lines[i], ',');
    if (fields.size() != 13) {
      throw DatasetError("line " + std::to_string(line_no) + ": expected 13 columns, got " +
                         std::to_string(fields.size()));
    }
    VulnRecord record;
    record.id = fields[0];
    record.library = parse_enum_field(parse_library, fields[1], line_no, "library");
    record.vuln.category =
        parse_enum_field(parse_vuln_class, fields[2], line_no, "vuln_category");
    record.vuln.subcategory =
        parse_enum_field(parse_vuln_leaf, fields[3], line_no, "vuln_subcategory");
    record.root_cause.category =
        parse_enum_field(parse_root_cause_class, fields[4], line_no, "root_cause_category");
    record.root_cause.subcategory = parse_enum_field(parse_root_cause_leaf, fields[5],
                                                     line_no, "root_cause_subcategory");
    record.symptom = parse_enum_field(parse_symptom, fields[6], line_no, "symptom");
    record.fixing.category =
        parse_enum_field(parse_fix_class, fields[7], line_no, "fixing_category");
    record.fixing.subcategory =
        parse_enum_field(parse_fix_leaf, fields[8], line_no, "fixing_subcategory");
    record.added_lines = parse_count_field(fields[9], line_no, "added_lines");
    record.deleted_lines = parse_count_field(fields[10], line_no, "deleted_lines");
    record.commit_ids = util::split_nonempty(fields[11], ';');
    record.cve_ids = util::split_nonempty(fields[12], ';');
    records.push_back(std::move(record));
  }

  std::string bad;
  for (const VulnRecord& record : records) {
    LabelValidation check = validate_label(record);
    if (!check.ok()) {
      if (!bad.empty()) bad += "; ";
      bad += record.id + " (" + util::join(check.violations, ", ") + ")";
    }
  }
  if (!bad.empty()) throw DatasetError("dataset validation failed: " + bad);
  return records;
}

std::vector<VulnRecord> load_dataset(const std::string& path) {
  return parse_dataset(util::read_file_bytes(path));
}

std::string serialize_record(const VulnRecord& record) {
  std::ostringstream out;
  out << record.id << ',' << to_string(record.library) << ','
      << to_string(record.vuln.category) << ',' << to_string(record.vuln.subcategory) << ','
      << to_string(record.root_cause.category) << ','
      << to_string(record.root_cause.subcategory) << ',' << to_string(record.symptom) << ','
      << to_string(record.fixing.category) << ',' << to_string(record.fixing.subcategory)
      << ',' << record.added_lines << ',' << record.deleted_lines << ','
      << util::join(record.commit_ids, ";") << ',' << util::join(record.cve_ids, ";");
  return out.str();
}

std::string serialize_dataset(const std::vector<VulnRecord>& records) {
  std::string out = kDatasetHeader;
  out += '\n';
  for (const VulnRecord& record : records) {
    out += serialize_record(record);
    out += '\n';
  }
  return out;
}

void save_dataset(const std::vector<VulnRecord>& records, const std::string& path) {
  util::write_file_atomic(path, serialize_dataset(records));
}

StatsReport build_stats_report(const std::vector<VulnRecord>& records) {
  StatsReport report;
  report.record_count = static_cast<long long>(records.size());
  report.by_library = count_by(records, Dimension::Library);
  report.library_by_vuln = cross_tab(records, Dimension::Library, Dimension::VulnCategory);
  report.library_by_root_cause = cross_tab(records, Dimension::Library, Dimension::RootCause);
  report.library_by_symptom = cross_tab(records, Dimension::Library, Dimension::Symptom);
  report.library_by_fixing = cross_tab(records, Dimension::Library, Dimension::Fixing);
  report.by_vuln_subcategory = count_by(records, Dimension::VulnSubcategory);
  report.by_root_cause_subcategory = count_by(records, Dimension::RootCauseSubcategory);
  report.by_fixing_subcategory = count_by(records, Dimension::FixingSubcategory);
  report.by_effort = count_by(records, Dimension::Effort);
  report.root_cause_by_symptom = cross_tab(records, Dimension::RootCause, Dimension::Symptom);
  report.root_cause_by_fixing = cross_tab(records, Dimension::RootCause, Dimension::Fixing);
  report.root_cause_by_effort = cross_tab(records, Dimension::RootCause, Dimension::Effort);
  report.micro_small_share = records.empty() ? 0.0 : micro_small_share(records);
  return report;
}

std::optional<StatsFormat> parse_stats_format(std::string_view s) {
  if (s == "text") return StatsFormat::Text;
  if (s == "json") return StatsFormat::Json;
  if (s == "csv") return StatsFormat::Csv;
  return std::nullopt;
}

namespace {

void render_count_table_text(std::ostringstream& out, const std::string& title,
                             const CountTable& table, long long total) {
  out << title << "\n";
  std::size_t width = 0;
  for (const auto& [key, count] : table.entries) width = std::max(width, key.size());
  for (const auto& [key, count] : table.entries) {
    out << "  " << key << std::string(width - key.size() + 2, ' ') << count;
    if (total > 0) {
      double pct = 100.0 * static_cast<double>(count) / static_cast<double>(total);
      out << "  (" << util::format_fixed(pct, 1) << "%)";
    }
    out << "\n";
  }
  out << "\n";
}

void render_cross_tab_text(std::ostringstream& out, const std::string& title,
                           const CrossTab& tab) {
  out << title << "\n";
  std::size_t row_width = 5;
  for (const auto& key : tab.row_keys) row_width = std::max(row_width, key.size());
  std::vector<std::size_t> col_widths;
  for (std::size_t c = 0; c < tab.col_keys.size(); ++c) {
    std::size_t w = tab.col_keys[c].size();
    for (std::size_t r = 0; r < tab.row_keys.size(); ++r) {
      w = std::max(w, std::to_string(tab.cells[r][c]).size());
    }
    col_widths.push_back(w);
  }
  auto pad = [&out](const std::string& text, std::size_t width) {
    if (text.size() < width) out << std::string(width - text.size(), ' ');
    out << text;
  };
  out << "  " << std::string(row_width, ' ');
  for (std::size_t c = 0; c < tab.col_keys.size(); ++c) {
    out << "  ";
    pad(tab.col_keys[c], col_widths[c]);
  }
  out << "  total\n";
  for (std::size_t r = 0; r < tab.row_keys.size(); ++r) {
    out << "  " << tab.row_keys[r]
        << std::string(row_width - tab.row_keys[r].size(), ' ');
    long long row_sum = 0;
    for (std::size_t c = 0; c < tab.col_keys.size(); ++c) {
      out << "  ";
      pad(std::to_string(tab.cells[r][c]), col_widths[c]);
      row_sum += tab.cells[r][c];
    }
    out << "  " << row_sum << "\n";
  }
  out << "  " << "total" << std::string(row_width - 5, ' ');
  for (std::size_t c = 0; c < tab.col_keys.size(); ++c) {
    out << "  ";
    pad(std::to_string(tab.col_total(tab.col_keys[c])), col_widths[c]);
  }
  out << "  " << tab.grand_total() << "\n\n";
}

nlohmann::json count_table_json(const CountTable& table) {
  nlohmann::json obj = nlohmann::json::object();
  for (const auto& [key, count] : table.entries) obj[key] = count;
  return obj;
}

nlohmann::json cross_tab_json(const CrossTab& tab) {
  nlohmann::json obj;
  obj["rows"] = tab.row_keys;
  obj["cols"] = tab.col_keys;
  obj["cells"] = tab.cells;
  return obj;
}

void render_count_table_csv(std::ostringstream& out, const std::string& name,
                            const CountTable& table) {
  for (const auto& [key, count] : table.entries) {
    out << name << "," << key << ",," << count << "\n";
  }
}

void render_cross_tab_csv(std::ostringstream& out, const std::string& name,
                          const CrossTab& tab) {
  for (std::size_t r = 0; r < tab.row_keys.size(); ++r) {
    for (std::size_t c = 0; c < tab.col_keys.size(); ++c) {
      out << name << "," << tab.row_keys[r] << "," << tab.col_keys[c] << ","
          << tab.cells[r][c] << "\n";
    }
  }
}

}  // namespace

std::string render_stats(const StatsReport& report, StatsFormat format) {
  switch (format) {
    case StatsFormat::Text: {
      std::ostringstream out;
      out << "records: " << report.record_count << "\n\n";
      render_count_table_text(out, "records by library", report.by_library,
                              report.record_count);
      render_cross_tab_text(out, "vulnerability types by library", report.library_by_vuln);
      render_cross_tab_text(out, "root causes by library", report.library_by_root_cause);
      render_cross_tab_text(out, "symptoms by library", report.library_by_symptom);
      render_cross_tab_text(out, "fixing patterns by library", report.library_by_fixing);
      render_count_table_text(out, "vulnerability subcategories", report.by_vuln_subcategory,
                              0);
      render_count_table_text(out, "root cause subcategories",
                              report.by_root_cause_subcategory, 0);
      render_count_table_text(out, "fixing pattern subcategories",
                              report.by_fixing_subcategory, 0);
      render_count_table_text(out, "fixing effort", report.by_effort, report.record_count);
      render_cross_tab_text(out, "root causes by symptom", report.root_cause_by_symptom);
      render_cross_tab_text(out, "root causes by fixing pattern",
                            report.root_cause_by_fixing);
      render_cross_tab_text(out, "root causes by fixing effort",
                            report.root_cause_by_effort);
      out << "micro or small repairs: "
          << util::format_fixed(100.0 * report.micro_small_share, 1) << "%\n";
      return out.str();
    }
    case StatsFormat::Json: {
      nlohmann::json doc;
      doc["record_count"] = report.record_count;
      doc["by_library"] = count_table_json(report.by_library);
      doc["library_by_vuln"] = cross_tab_json(report.library_by_vuln);
      doc["library_by_root_cause"] = cross_tab_json(report.library_by_root_cause);
      doc["library_by_symptom"] = cross_tab_json(report.library_by_symptom);
      doc["library_by_fixing"] = cross_tab_json(report.library_by_fixing);
      doc["by_vuln_subcategory"] = count_table_json(report.by_vuln_subcategory);
      doc["by_root_cause_subcategory"] =
          count_table_json(report.by_root_cause_subcategory);
      doc["by_fixing_subcategory"] = count_table_json(report.by_fixing_subcategory);
      doc["by_effort"] = count_table_json(report.by_effort);
      doc["root_cause_by_symptom"] = cross_tab_json(report.root_cause_by_symptom);
      doc["root_cause_by_fixing"] = cross_tab_json(report.root_cause_by_fixing);
      doc["root_cause_by_effort"] = cross_tab_json(report.root_cause_by_effort);
      doc["micro_small_share"] = report.micro_small_share;
      return doc.dump(2) + "\n";
    }
    case StatsFormat::Csv: {
      std::ostringstream out;
      out << "table,row,col,count\n";
      out << "record_count,,," << report.record_count << "\n";
      render_count_table_csv(out, "by_library", report.by_library);
      render_cross_tab_csv(out, "library_by_vuln", report.library_by_vuln);
      render_cross_tab_csv(out, "library_by_root_cause", report.library_by_root_cause);
      render_cross_tab_csv(out, "library_by_symptom", report.library_by_symptom);
      render_cross_tab_csv(out, "library_by_fixing", report.library_by_fixing);
      render_count_table_csv(out, "by_vuln_subcategory", report.by_vuln_subcategory);
      render_count_table_csv(out, "by_root_cause_subcategory",
                             report.by_root_cause_subcategory);
      render_count_table_csv(out, "by_fixing_subcategory", report.by_fixing_subcategory);
      render_count_table_csv(out, "by_effort", report.by_effort);
      render_cross_tab_csv(out, "root_cause_by_symptom", report.root_cause_by_symptom);
      render_cross_tab_csv(out, "root_cause_by_fixing", report.root_cause_by_fixing);
      render_cross_tab_csv(out, "root_cause_by_effort", report.root_cause_by_effort);
      char value[64];
      std::snprintf(value, sizeof(value), "%.17g", report.micro_small_share);
      out << "micro_small_share,,," << value << "\n";
      return out.str();
    }
  }
  return {};
}

}  // namespace mutforge
