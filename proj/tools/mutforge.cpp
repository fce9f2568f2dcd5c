#include <unistd.h>

#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mutforge/commit_miner.hpp"
#include "mutforge/dataset.hpp"
#include "mutforge/engine.hpp"
#include "mutforge/mutant_store.hpp"
#include "mutforge/operator_catalog.hpp"
#include "mutforge/reporter.hpp"
#include "mutforge/scanner.hpp"
#include "mutforge/util.hpp"

namespace fs = std::filesystem;
using namespace mutforge;

namespace {

std::vector<MutationOperator> catalog_or_builtin(const std::string& path) {
  if (path.empty()) return builtin_catalog();
  return load_catalog(path);
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& warning : warnings)
    std::cerr << "mutforge: warning: " << warning << "\n";
}

void print_summary(const CampaignSummary& summary) {
  std::cout << "total mutants: " << summary.total << "\n";
  for (MutantStatus status : all_mutant_statuses())
    std::cout << "  " << to_string(status) << ": " << summary.count(status) << "\n";
  for (bool include_timeouts : {true, false}) {
    auto [killed, measured] = score_fraction(summary, include_timeouts);
    const char* convention = include_timeouts ? "included" : "excluded";
    if (measured == 0) {
      std::cout << "mutation score (timeouts " << convention
                << "): undefined\n";
    } else {
      std::cout << "mutation score (timeouts " << convention << "): " << killed
                << "/" << measured << " = "
                << util::format_fixed(mutation_score(summary, include_timeouts) * 100.0, 1)
                << "%\n";
    }
  }
}

struct ScanArgs {
  std::string corpus;
  std::string store;
  std::string catalog;
  CorpusFilter filter;
};

int do_scan(const ScanArgs& args) {
  auto catalog = catalog_or_builtin(args.catalog);
  std::vector<std::string> warnings;
  auto sites = scan_corpus(args.corpus, args.filter, catalog, &warnings);
  print_warnings(warnings);
  if (args.store.empty()) {
    for (const auto& site : sites) {
      nlohmann::json j{{"mutant_id", compute_mutant_id(site)},
                       {"file", site.file},
                       {"start", site.start},
                       {"end", site.end},
                       {"first_line", site.first_line},
                       {"last_line", site.last_line},
                       {"operator_id", site.operator_id},
                       {"matched_text_b64", util::base64_encode(site.matched_text)},
                       {"context_digest", site.context_digest}};
      std::cout << j.dump() << "\n";
    }
    return 0;
  }
  auto store = MutantStore::open(args.store, MutantStore::Mode::ReadWrite);
  print_warnings(store.warnings());
  std::vector<Mutant> mutants;
  mutants.reserve(sites.size());
  for (const auto& site : sites) {
    const MutationOperator* op = find_operator(catalog, site.operator_id);
    if (op != nullptr) mutants.push_back(make_mutant(site, *op));
  }
  std::size_t inserted = store.append_mutants(mutants);
  std::cout << "inserted " << inserted << " of " << mutants.size()
            << " mutants into " << args.store << "\n";
  return 0;
}

struct RunArgs {
  std::string corpus;
  std::string store;
  std::string catalog;
  std::string build_cmd;
  std::string test_cmd;
  double timeout = 60.0;
  int workers = 1;
  std::string workspace;
  std::vector<std::string> env;
  CorpusFilter filter;
  bool quiet = false;
};

int do_run(const RunArgs& args) {
  RunConfig config;
  config.corpus_root = args.corpus;
  if (!args.build_cmd.empty())
    config.build_command = util::split_command(args.build_cmd);
  config.test_command = util::split_command(args.test_cmd);
  config.timeout_seconds = args.timeout;
  config.workers = args.workers;
  config.scan_filter = args.filter;
  for (const auto& pair : args.env) {
    std::size_t eq = pair.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--env expects KEY=VALUE, got: " + pair);
    config.env_overrides[pair.substr(0, eq)] = pair.substr(eq + 1);
  }
  bool temp_workspace = args.workspace.empty();
  config.workspace_root =
      temp_workspace
          ? (fs::temp_directory_path() / ("mutforge-" + std::to_string(::getpid())))
                .string()
          : args.workspace;

  auto catalog = catalog_or_builtin(args.catalog);
  auto store = MutantStore::open(args.store, MutantStore::Mode::ReadWrite);
  print_warnings(store.warnings());

  CampaignCallbacks callbacks;
  if (!args.quiet) {
    callbacks.on_result = [](const Mutant& mutant, MutantStatus status) {
      std::cerr << "mutforge: " << mutant.mutant_id.substr(0, 12) << " "
                << mutant.site.operator_id << " " << mutant.site.file << ":"
                << mutant.site.first_line << " -> " << to_string(status) << "\n";
    };
  }

  CampaignSummary summary;
  try {
    summary = run_campaign(config, store, catalog, callbacks);
  } catch (...) {
    if (temp_workspace) {
      std::error_code ec;
      fs::remove_all(config.workspace_root, ec);
    }
    throw;
  }
  if (temp_workspace) {
    std::error_code ec;
    fs::remove_all(config.workspace_root, ec);
  }

  print_summary(summary);
  long long pending = summary.count(MutantStatus::Pending);
  if (pending > 0) {
    std::cerr << "mutforge: " << pending << " mutants still pending\n";
    return 1;
  }
  return 0;
}

struct ReportArgs {
  std::string store;
  std::string catalog;
  std::string format = "text";
  std::string group_by = "operator";
  bool include_timeouts = false;
};

int do_report(const ReportArgs& args) {
  auto store = MutantStore::open(args.store, MutantStore::Mode::ReadOnly);
  print_warnings(store.warnings());
  auto catalog = catalog_or_builtin(args.catalog);
  auto report = build_campaign_report(store, catalog, *parse_group_by(args.group_by),
                                      args.include_timeouts);
  std::cout << render_report(report, *parse_report_format(args.format));
  return 0;
}

struct StatsArgs {
  std::string dataset;
  std::string format = "text";
};

int do_stats(const StatsArgs& args) {
  auto records = load_dataset(args.dataset);
  auto report = build_stats_report(records);
  std::cout << render_stats(report, *parse_stats_format(args.format));
  return 0;
}

struct MineArgs {
  std::string log;
  std::string rules;
  bool group = false;
  std::string format = "text";
};

std::vector<CommitRecord> load_any_commit_log(const std::string& path) {
  std::string text = util::read_file_bytes(path);
  std::string_view view = text;
  std::size_t first = view.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && view.substr(first).starts_with("commit "))
    return parse_git_numstat(text);
  return parse_commit_log(text);
}

int do_mine(const MineArgs& args) {
  auto rules = args.rules.empty() ? default_rules() : load_rules(args.rules);
  auto log = load_any_commit_log(args.log);
  auto flagged = mine(log, rules);

  if (args.format == "json") {
    nlohmann::json j;
    j["total_commits"] = log.size();
    j["flagged_count"] = flagged.size();
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& [commit, verdict] : flagged) {
      rows.push_back({{"sha", commit.sha},
                      {"keywords", verdict.matched_keywords},
                      {"cve_ids", verdict.cve_ids}});
    }
    j["flagged"] = rows;
    if (args.group) {
      auto grouping = group_by_cve(flagged);
      nlohmann::json groups = nlohmann::json::array();
      for (const auto& group : grouping.groups) {
        std::vector<std::string> shas;
        for (const auto& commit : group.commits) shas.push_back(commit.sha);
        groups.push_back({{"cve_id", group.cve_id}, {"shas", shas}});
      }
      j["groups"] = groups;
      std::vector<std::string> ungrouped;
      for (const auto& commit : grouping.remainder) ungrouped.push_back(commit.sha);
      j["ungrouped"] = ungrouped;
    }
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  if (args.group) {
    auto grouping = group_by_cve(flagged);
    for (const auto& group : grouping.groups) {
      std::vector<std::string> shas;
      for (const auto& commit : group.commits) shas.push_back(commit.sha);
      std::cout << group.cve_id << "\t" << util::join(shas, ",") << "\n";
    }
    std::vector<std::string> shas;
    for (const auto& commit : grouping.remainder) shas.push_back(commit.sha);
    if (!shas.empty()) std::cout << "(no-cve)\t" << util::join(shas, ",") << "\n";
    return 0;
  }

  for (const auto& [commit, verdict] : flagged) {
    std::cout << commit.sha << "\t" << util::join(verdict.matched_keywords, ",")
              << "\t" << util::join(verdict.cve_ids, ",") << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mutforge: security-aware mutation testing for ML native code"};
  app.set_config("--config", "", "configuration file")->envname("MUTFORGE_CONFIG");
  app.require_subcommand(1);

  ScanArgs scan_args;
  auto* scan_cmd = app.add_subcommand("scan", "find mutation sites in a corpus");
  scan_cmd->add_option("--corpus", scan_args.corpus, "corpus root directory")
      ->required();
  scan_cmd->add_option("--store", scan_args.store,
                       "mutant store to seed (omit to print sites to stdout)");
  scan_cmd->add_option("--catalog", scan_args.catalog,
                       "operator catalog file (default: builtin)");
  scan_cmd->add_option("--include", scan_args.filter.include, "include globs")
      ->capture_default_str();
  scan_cmd->add_option("--exclude", scan_args.filter.exclude, "exclude globs")
      ->capture_default_str();

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "evaluate every pending mutant");
  run_cmd->add_option("--corpus", run_args.corpus, "corpus root directory")
      ->required();
  run_cmd->add_option("--store", run_args.store, "mutant store directory")
      ->required();
  run_cmd->add_option("--catalog", run_args.catalog,
                      "operator catalog file (default: builtin)");
  run_cmd->add_option("--build-cmd", run_args.build_cmd,
                      "build command (omit to skip the build phase)");
  run_cmd->add_option("--test-cmd", run_args.test_cmd, "test command")->required();
  run_cmd->add_option("--timeout", run_args.timeout, "per-phase timeout in seconds")
      ->capture_default_str();
  run_cmd->add_option("--workers", run_args.workers, "parallel workers")
      ->capture_default_str();
  run_cmd->add_option("--workspace", run_args.workspace,
                      "workspace root (default: a temporary directory)");
  run_cmd->add_option("--env", run_args.env, "KEY=VALUE for child processes");
  run_cmd->add_option("--include", run_args.filter.include, "include globs")
      ->capture_default_str();
  run_cmd->add_option("--exclude", run_args.filter.exclude, "exclude globs")
      ->capture_default_str();
  run_cmd->add_flag("--quiet", run_args.quiet, "suppress per-mutant progress");

  ReportArgs report_args;
  auto* report_cmd = app.add_subcommand("report", "summarize a finished campaign");
  report_cmd->add_option("--store", report_args.store, "mutant store directory")
      ->required();
  report_cmd->add_option("--catalog", report_args.catalog,
                         "operator catalog file (default: builtin)");
  report_cmd->add_option("--format", report_args.format, "output format")
      ->check(CLI::IsMember({"text", "json", "csv"}))
      ->capture_default_str();
  report_cmd->add_option("--group-by", report_args.group_by, "alive-mutant grouping")
      ->check(CLI::IsMember({"operator", "fixing_category", "cwe", "file"}))
      ->capture_default_str();
  report_cmd->add_flag("--include-timeouts", report_args.include_timeouts,
                       "count timeout kills in the mutation score");

  StatsArgs stats_args;
  auto* stats_cmd = app.add_subcommand("stats", "aggregate a vulnerability dataset");
  stats_cmd->add_option("--dataset", stats_args.dataset, "dataset file")->required();
  stats_cmd->add_option("--format", stats_args.format, "output format")
      ->check(CLI::IsMember({"text", "json", "csv"}))
      ->capture_default_str();

  MineArgs mine_args;
  auto* mine_cmd = app.add_subcommand("mine", "flag security-related commits");
  mine_cmd->add_option("--log", mine_args.log, "commit log file")->required();
  mine_cmd->add_option("--rules", mine_args.rules,
                       "keyword rule file (default: builtin)");
  mine_cmd->add_flag("--group", mine_args.group, "group flagged commits by CVE");
  mine_cmd->add_option("--format", mine_args.format, "output format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();

  auto* catalog_cmd = app.add_subcommand("catalog", "operator catalog utilities");
  catalog_cmd->require_subcommand(1);
  std::string catalog_out;
  auto* catalog_print = catalog_cmd->add_subcommand(
      "print", "dump the builtin catalog in the loadable format");
  catalog_print->add_option("--out", catalog_out, "write to a file instead of stdout");
  std::string catalog_check_path;
  auto* catalog_check = catalog_cmd->add_subcommand("check", "validate a catalog file");
  catalog_check->add_option("file", catalog_check_path, "catalog file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(scan_cmd)) return do_scan(scan_args);
    if (app.got_subcommand(run_cmd)) return do_run(run_args);
    if (app.got_subcommand(report_cmd)) return do_report(report_args);
    if (app.got_subcommand(stats_cmd)) return do_stats(stats_args);
    if (app.got_subcommand(mine_cmd)) return do_mine(mine_args);
    if (app.got_subcommand(catalog_cmd)) {
      if (catalog_cmd->got_subcommand(catalog_print)) {
        std::string text = serialize_catalog(builtin_catalog());
        if (catalog_out.empty()) {
          std::cout << text;
        } else {
          util::write_file_bytes(catalog_out, text);
        }
        return 0;
      }
      auto catalog = load_catalog(catalog_check_path);
      std::cout << "catalog ok: " << catalog.size() << " operators\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "mutforge: error: " << e.what() << "\n";
    // reporting is advisory: it must not fail an otherwise green build
    return app.got_subcommand(report_cmd) ? 0 : 1;
  }
  return 2;
}
