#include "mutforge/engine.hpp"

#include <atomic>
#include <csignal>
#include <exception>
#include <filesystem>
#include <mutex>
#include <regex>
#include <system_error>
#include <thread>

#include "mutforge/subprocess.hpp"
#include "mutforge/util.hpp"

namespace fs = std::filesystem;

namespace mutforge {

std::vector<std::string> default_crash_markers() {
  return {"Segmentation fault", "core dumped", "AddressSanitizer"};
}

namespace {

bool phase_ok(const PhaseResult& phase) {
  return !phase.ran ||
         (!phase.timed_out && !phase.term_signal && phase.exit_code == 0);
}

bool is_crash_signal(int sig) {
  return sig == SIGSEGV || sig == SIGABRT || sig == SIGBUS || sig == SIGILL;
}

}  // namespace

MutantStatus classify_outcome(const PhaseResult& build, const PhaseResult& test,
                              const std::vector<std::string>& crash_markers) {
  if ((build.ran && build.timed_out) || (test.ran && test.timed_out))
    return MutantStatus::KilledByTimeout;
  if (build.ran && (build.term_signal || build.exit_code != 0))
    return MutantStatus::Invalid;
  if (!test.ran) return MutantStatus::Skipped;
  if (!test.term_signal && test.exit_code == 0) return MutantStatus::Alive;
  if (test.term_signal && is_crash_signal(*test.term_signal))
    return MutantStatus::KilledByCrash;
  for (const auto& marker : crash_markers)
    if (!marker.empty() && test.output.find(marker) != std::string::npos)
      return MutantStatus::KilledByCrash;
  return MutantStatus::KilledByTest;
}

std::string parse_first_failing_test(std::string_view output) {
  static const std::regex bracketed(R"(\[\s*FAILED\s*\]\s+(\S+))");
  static const std::regex plain(R"(^\s*FAIL(?:ED)?:?\s+(\S+))");
  std::size_t pos = 0;
  while (pos <= output.size()) {
    std::size_t nl = output.find('\n', pos);
    std::string line(nl == std::string_view::npos ? output.substr(pos)
                                                  : output.substr(pos, nl - pos));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::smatch m;
    if (std::regex_search(line, m, bracketed) || std::regex_search(line, m, plain)) {
      std::string name = m[1].str();
      while (!name.empty() && (name.back() == ',' || name.back() == '.'))
        name.pop_back();
      if (!name.empty()) return name;
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return "";
}

Workspace Workspace::create(const std::string& corpus_root, const std::string& dir) {
  Workspace workspace;
  workspace.corpus_root_ = corpus_root;
  workspace.dir_ = dir;
  workspace.rebuild();
  return workspace;
}

void Workspace::rebuild() {
  std::error_code ec;
  fs::remove_all(dir_, ec);
  if (ec) throw InfraError("cannot clear workspace " + dir_ + ": " + ec.message());
  fs::create_directories(dir_, ec);
  if (ec) throw InfraError("cannot create workspace " + dir_ + ": " + ec.message());
  fs::copy(corpus_root_, dir_,
           fs::copy_options::recursive | fs::copy_options::copy_symlinks, ec);
  if (ec)
    throw InfraError("cannot copy " + corpus_root_ + " into " + dir_ + ": " +
                     ec.message());
  applied_.clear();
}

bool Workspace::apply(const Mutant& mutant) {
  const std::string& rel = mutant.site.file;
  if (applied_.count(rel) != 0)
    throw std::logic_error("a mutant is already applied to " + rel);
  fs::path target = fs::path(dir_) / rel;
  std::string bytes;
  try {
    bytes = util::read_file_bytes(target);
  } catch (const std::exception& e) {
    throw InfraError(e.what());
  }
  if (mutant.site.start > mutant.site.end || mutant.site.end > bytes.size())
    return false;
  if (bytes.compare(mutant.site.start, mutant.site.end - mutant.site.start,
                    mutant.original_text) != 0)
    return false;
  std::string next = bytes.substr(0, mutant.site.start);
  next += mutant.mutated_text;
  next += bytes.substr(mutant.site.end);
  std::error_code perm_ec;
  fs::perms perms = fs::status(target, perm_ec).permissions();
  try {
    util::write_file_atomic(target, next);
  } catch (const std::exception& e) {
    throw InfraError(e.what());
  }
  if (!perm_ec) fs::permissions(target, perms, perm_ec);
  applied_[rel] = {mutant.mutant_id, util::sha256_hex(next)};
  return true;
}

void Workspace::revert(const Mutant& mutant) {
  auto it = applied_.find(mutant.site.file);
  if (it == applied_.end() || it->second.mutant_id != mutant.mutant_id)
    throw std::logic_error("revert without a matching apply for " + mutant.site.file);
  fs::path target = fs::path(dir_) / mutant.site.file;
  std::string bytes;
  try {
    bytes = util::read_file_bytes(target);
  } catch (const std::exception& e) {
    applied_.erase(it);
    throw InfraError(e.what());
  }
  // the digest pins the exact post-apply bytes, so any outside write is
  // caught even when the mutation was a pure deletion
  if (util::sha256_hex(bytes) != it->second.digest) {
    applied_.erase(it);
    throw InfraError("workspace file " + mutant.site.file +
                     " changed while a mutant was applied");
  }
  std::string original = bytes.substr(0, mutant.site.start);
  original += mutant.original_text;
  original += bytes.substr(mutant.site.start + mutant.mutated_text.size());
  std::error_code perm_ec;
  fs::perms perms = fs::status(target, perm_ec).permissions();
  try {
    util::write_file_atomic(target, original);
  } catch (const std::exception& e) {
    applied_.erase(it);
    throw InfraError(e.what());
  }
  if (!perm_ec) fs::permissions(target, perms, perm_ec);
  applied_.erase(it);
}

namespace {

PhaseResult to_phase(const ExecResult& exec) {
  PhaseResult phase;
  phase.ran = true;
  phase.started = exec.started;
  phase.timed_out = exec.timed_out;
  phase.exit_code = exec.exit_code;
  phase.term_signal = exec.term_signal;
  phase.output = exec.output;
  phase.duration_seconds = exec.duration_seconds;
  return phase;
}

}  // namespace

EvaluationResult evaluate_mutant(Workspace& workspace, const Mutant& mutant,
                                 const RunConfig& config) {
  if (!workspace.apply(mutant))
    throw InfraError("mutant " + mutant.mutant_id + " no longer matches " +
                     mutant.site.file);
  PhaseResult build;
  PhaseResult test;
  bool reverted = false;
  auto revert_once = [&] {
    if (!reverted) {
      reverted = true;
      workspace.revert(mutant);
    }
  };
  try {
    if (!config.build_command.empty()) {
      build = to_phase(run_command(config.build_command, workspace.root(),
                                   config.env_overrides, config.timeout_seconds));
      if (!build.started) throw InfraError("build command could not start");
    }
    if (phase_ok(build)) {
      test = to_phase(run_command(config.test_command, workspace.root(),
                                  config.env_overrides, config.timeout_seconds));
      if (!test.started) throw InfraError("test command could not start");
    }
  } catch (...) {
    try {
      revert_once();
    } catch (...) {
      // the original failure is the one worth reporting
    }
    throw;
  }
  revert_once();

  EvaluationResult result;
  result.status = classify_outcome(build, test, config.crash_markers);
  const PhaseResult& decisive = test.ran ? test : build;
  result.evidence.phase = test.ran ? "test" : "build";
  result.evidence.exit_code = decisive.term_signal ? 0 : decisive.exit_code;
  if (decisive.term_signal)
    result.evidence.signal_name = signal_name(*decisive.term_signal);
  result.evidence.duration_seconds = decisive.duration_seconds;
  result.evidence.output_excerpt = decisive.output.substr(
      0, std::min(decisive.output.size(), kMaxExcerptBytes));
  if (result.status == MutantStatus::KilledByTest)
    result.evidence.first_failing_test = parse_first_failing_test(test.output);
  return result;
}

CampaignSummary run_campaign(const RunConfig& config, MutantStore& store,
                             const std::vector<MutationOperator>& operators,
                             const CampaignCallbacks& callbacks) {
  if (config.corpus_root.empty() || !fs::exists(config.corpus_root))
    throw EngineError("corpus root does not exist: " + config.corpus_root);
  if (config.test_command.empty()) throw EngineError("test command is empty");
  if (config.timeout_seconds <= 0) throw EngineError("timeout must be positive");
  if (config.workers < 1) throw EngineError("worker count must be at least 1");
  if (config.workspace_root.empty()) throw EngineError("workspace root is empty");

  if (store.mutants().empty()) {
    auto sites = scan_corpus(config.corpus_root, config.scan_filter, operators);
    std::vector<Mutant> fresh;
    fresh.reserve(sites.size());
    for (const auto& site : sites) {
      const MutationOperator* op = find_operator(operators, site.operator_id);
      if (op != nullptr) fresh.push_back(make_mutant(site, *op));
    }
    store.append_mutants(fresh);
  }

  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < store.mutants().size(); ++i)
    if (store.mutants()[i].status == MutantStatus::Pending) pending.push_back(i);
  if (pending.empty()) return store.summarize();

  std::atomic<std::size_t> cursor{0};
  std::mutex store_mutex;
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker_main = [&](int worker_index) {
    try {
      fs::path dir = fs::path(config.workspace_root) /
                     ("worker-" + std::to_string(worker_index));
      Workspace workspace = Workspace::create(config.corpus_root, dir.string());
      for (;;) {
        std::size_t slot = cursor.fetch_add(1);
        if (slot >= pending.size()) break;
        Mutant mutant;
        {
          std::lock_guard<std::mutex> lock(store_mutex);
          mutant = store.mutants()[pending[slot]];
        }
        EvaluationResult result;
        try {
          result = evaluate_mutant(workspace, mutant, config);
        } catch (const InfraError&) {
          // one retry on a pristine workspace, then give the mutant up
          try {
            workspace.rebuild();
            result = evaluate_mutant(workspace, mutant, config);
          } catch (const InfraError& again) {
            workspace.rebuild();
            result.status = MutantStatus::Skipped;
            result.evidence = Evidence{};
            result.evidence.phase = "build";
            result.evidence.output_excerpt =
                std::string("infrastructure failure: ") + again.what();
          }
        }
        {
          std::lock_guard<std::mutex> lock(store_mutex);
          store.update_status(mutant.mutant_id, result.status, result.evidence);
        }
        if (callbacks.on_result) callbacks.on_result(mutant, result.status);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };

  std::vector<std::thread> threads;
  int worker_count = config.workers;
  if (pending.size() < static_cast<std::size_t>(worker_count))
    worker_count = static_cast<int>(pending.size());
  threads.reserve(worker_count);
  for (int i = 0; i < worker_count; ++i) threads.emplace_back(worker_main, i);
  for (auto& thread : threads) thread.join();
  if (first_error) std::rethrow_exception(first_error);

  return store.summarize();
}

}  // namespace mutforge
