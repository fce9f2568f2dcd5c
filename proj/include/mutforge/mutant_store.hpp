#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mutforge/operator_catalog.hpp"
#include "mutforge/scanner.hpp"

namespace mutforge {

class StoreError : public std::runtime_error {
 public:
  explicit StoreError(const std::string& what) : std::runtime_error(what) {}
};

enum class MutantStatus {
  Pending,
  Invalid,
  KilledByTest,
  KilledByCrash,
  KilledByTimeout,
  Alive,
  Skipped,
};

std::string_view to_string(MutantStatus s);
std::optional<MutantStatus> parse_mutant_status(std::string_view s);
std::span<const MutantStatus> all_mutant_statuses();
inline bool is_terminal(MutantStatus s) { return s != MutantStatus::Pending; }

inline constexpr std::size_t kMaxExcerptBytes = 64 * 1024;

struct Evidence {
  std::string phase;  // "build" or "test"
  int exit_code = 0;
  std::optional<std::string> signal_name;
  std::string first_failing_test;
  std::string output_excerpt;  // bounded to kMaxExcerptBytes
  double duration_seconds = 0.0;

  bool operator==(const Evidence&) const = default;
};

struct Mutant {
  std::string mutant_id;
  MatchSite site;
  std::string original_text;  // must equal site.matched_text
  std::string mutated_text;
  MutantStatus status = MutantStatus::Pending;
  std::optional<Evidence> evidence;

  bool operator==(const Mutant&) const = default;
};

// Stable campaign identity: equal for identical corpus bytes and catalog on
// any machine.
std::string compute_mutant_id(const MatchSite& site);

// Builds a Pending mutant, applying the operator's transform to the site.
Mutant make_mutant(const MatchSite& site, const MutationOperator& op);

struct CampaignSummary {
  std::map<MutantStatus, long long> by_status;  // zero-filled over all statuses
  std::map<std::string, std::map<MutantStatus, long long>> by_operator;
  long long total = 0;

  long long count(MutantStatus s) const;

  bool operator==(const CampaignSummary&) const = default;
};

// Durable mutant database: a directory holding `header`, an append-only `log`
// of insert/status records (one JSON document per line), and a `lock` file.
// State is rebuilt by replaying the log; a corrupt tail is truncated with a
// warning on read-write open and skipped on read-only open.
class MutantStore {
 public:
  enum class Mode { ReadWrite, ReadOnly };

  static MutantStore open(const std::string& path, Mode mode = Mode::ReadWrite);

  MutantStore(MutantStore&& other) noexcept;
  MutantStore& operator=(MutantStore&& other) noexcept;
  MutantStore(const MutantStore&) = delete;
  MutantStore& operator=(const MutantStore&) = delete;
  ~MutantStore();

  // Count of newly inserted mutants; duplicates by mutant_id are ignored.
  // Mutants whose original_text disagrees with their site are rejected.
  std::size_t append_mutants(const std::vector<Mutant>& mutants);

  // Legal only for existing Pending mutants and terminal target statuses.
  void update_status(const std::string& mutant_id, MutantStatus status,
                     const std::optional<Evidence>& evidence);

  const std::vector<Mutant>& mutants() const { return mutants_; }
  const Mutant* find(std::string_view mutant_id) const;
  CampaignSummary summarize() const;
  const std::vector<std::string>& warnings() const { return warnings_; }
  const std::string& path() const { return path_; }

  void close();

 private:
  MutantStore() = default;
  void append_line(const std::string& line);
  void replay(const std::string& log_path);

  std::string path_;
  Mode mode_ = Mode::ReadWrite;
  int log_fd_ = -1;
  int lock_fd_ = -1;
  std::vector<Mutant> mutants_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::string> warnings_;
};

}  // namespace mutforge
