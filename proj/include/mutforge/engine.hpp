#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mutforge/mutant_store.hpp"
#include "mutforge/operator_catalog.hpp"
#include "mutforge/scanner.hpp"

namespace mutforge {

class EngineError : public std::runtime_error {
 public:
  explicit EngineError(const std::string& what) : std::runtime_error(what) {}
};

// Transient workspace/process trouble; the campaign retries once, then skips.
class InfraError : public EngineError {
 public:
  explicit InfraError(const std::string& what) : EngineError(what) {}
};

std::vector<std::string> default_crash_markers();

struct RunConfig {
  std::string corpus_root;
  std::vector<std::string> build_command;  // empty: no build phase
  std::vector<std::string> test_command;
  double timeout_seconds = 60.0;
  int workers = 1;
  std::string workspace_root;
  std::map<std::string, std::string> env_overrides;
  std::vector<std::string> crash_markers = default_crash_markers();
  CorpusFilter scan_filter;  // used when run has to scan first
};

// One build or test execution. `ran == false` means the phase never happened
// (no build step configured, or the build already failed).
struct PhaseResult {
  bool ran = false;
  bool started = true;  // false: infrastructure could not launch the command
  bool timed_out = false;
  int exit_code = 0;
  std::optional<int> term_signal;
  std::string output;
  double duration_seconds = 0.0;
};

// Total classification: timeout in either phase wins, then build failure
// (Invalid), then exit 0 (Alive), then crash signals/markers (KilledByCrash),
// otherwise KilledByTest. Build ok with the test never run yields Skipped.
MutantStatus classify_outcome(const PhaseResult& build, const PhaseResult& test,
                              const std::vector<std::string>& crash_markers);

// First test id named by a "FAIL: <id>" / "FAILED <id>" / "[ FAILED ] <id>"
// output line; empty when none is found.
std::string parse_first_failing_test(std::string_view output);

// Private corpus copy a worker patches in place. At most one mutant may be
// applied per file at a time; apply/revert must pair up.
class Workspace {
 public:
  static Workspace create(const std::string& corpus_root, const std::string& dir);

  const std::string& root() const { return dir_; }

  // False on context mismatch (file bytes drifted since scan); no write then.
  bool apply(const Mutant& mutant);
  void revert(const Mutant& mutant);
  void rebuild();

 private:
  Workspace() = default;
  struct Applied {
    std::string mutant_id;
    std::string digest;  // whole-file digest right after the apply
  };
  std::string corpus_root_;
  std::string dir_;
  std::map<std::string, Applied> applied_;  // keyed by site file
};

struct EvaluationResult {
  MutantStatus status = MutantStatus::Skipped;
  Evidence evidence;
};

// apply -> build -> test -> classify -> revert; the revert runs on every
// path. Throws InfraError when the harness itself misbehaves.
EvaluationResult evaluate_mutant(Workspace& workspace, const Mutant& mutant,
                                 const RunConfig& config);

struct CampaignCallbacks {
  std::function<void(const Mutant&, MutantStatus)> on_result;
};

// Drives every Pending mutant in the store to a terminal status. An empty
// store is populated by scanning the corpus with `operators` first. Fatal
// configuration problems throw EngineError before any evaluation.
CampaignSummary run_campaign(const RunConfig& config, MutantStore& store,
                             const std::vector<MutationOperator>& operators,
                             const CampaignCallbacks& callbacks = {});

}  // namespace mutforge
