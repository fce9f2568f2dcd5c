// End-to-end checks for the shipped binary and bundled data. Each check
// prints exactly one PASS/FAIL line; the exit code is the number of failures.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "mutforge/commit_miner.hpp"
#include "mutforge/dataset.hpp"
#include "mutforge/reporter.hpp"
#include "mutforge/subprocess.hpp"
#include "mutforge/util.hpp"
#include "property_suites.hpp"
#include "testutil.hpp"

namespace fs = std::filesystem;
using namespace mutforge;
using nlohmann::json;

namespace {

struct Check {
  std::string headline;
  bool ok = true;
  std::string detail;

  void fail(const std::string& what) {
    ok = false;
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
  void require(bool condition, const std::string& what) {
    if (!condition) fail(what);
  }
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string seconds_str(double s) { return util::format_fixed(s, 2) + "s"; }

const std::string kBin = MUTFORGE_BIN;
const std::string kRoot = SOURCE_ROOT;

ExecResult cli(const std::vector<std::string>& args, double timeout = 60.0) {
  std::vector<std::string> argv;
  argv.push_back(kBin);
  argv.insert(argv.end(), args.begin(), args.end());
  return run_command(argv, kRoot, {}, timeout);
}

void check_count(Check& c, const json& table, const std::string& key,
                 long long expected) {
  if (!table.contains(key)) {
    c.fail(key + " missing from the table");
    return;
  }
  long long actual = table.at(key).get<long long>();
  if (actual != expected) {
    c.fail(key + " = " + std::to_string(actual) + ", expected " +
           std::to_string(expected));
  }
}

// --- 1. aggregation over the bundled vulnerability dataset ------------------

Check dataset_tables() {
  Check c;
  Stopwatch timer;
  auto result =
      cli({"stats", "--dataset", kRoot + "/data/ml_vuln_dataset.csv", "--format",
           "json"});
  c.require(result.started && result.exit_code == 0 && !result.term_signal,
            "stats command failed");
  if (!c.ok) {
    c.headline = "dataset aggregation over the bundled corpus";
    return c;
  }
  json doc;
  try {
    doc = json::parse(result.output);
  } catch (const std::exception& e) {
    c.fail(std::string("stats output is not parseable: ") + e.what());
    c.headline = "dataset aggregation over the bundled corpus";
    return c;
  }

  c.require(doc["record_count"].get<long long>() == 596,
            "record count is not 596");

  const json& vuln = doc["by_vuln_subcategory"];
  check_count(c, vuln, "integer_overflow", 135);
  check_count(c, vuln, "insufficient_precision", 27);
  check_count(c, vuln, "division_by_zero", 17);
  check_count(c, vuln, "integer_underflow", 5);
  check_count(c, vuln, "memory_leak", 86);
  check_count(c, vuln, "null_pointer_dereference", 48);
  check_count(c, vuln, "infinite_loop", 34);
  check_count(c, vuln, "double_free", 6);
  check_count(c, vuln, "use_after_free", 5);

  const json& cause = doc["by_root_cause_subcategory"];
  check_count(c, cause, "numerical_precision_error", 94);
  check_count(c, cause, "tensor_property_issue", 73);
  check_count(c, cause, "using_improper_data_type", 24);
  check_count(c, cause, "incorrect_type_conversion", 22);
  check_count(c, cause, "invalid_memory_access", 79);
  check_count(c, cause, "improper_memory_management", 72);
  check_count(c, cause, "stack_or_buffer_size_issue", 13);
  check_count(c, cause, "out_of_bound_read", 12);
  check_count(c, cause, "using_wrong_api", 21);
  check_count(c, cause, "api_misuse", 20);
  check_count(c, cause, "malicious_parameters", 18);
  check_count(c, cause, "api_version_issue", 9);

  const json& fixing = doc["by_fixing_subcategory"];
  check_count(c, fixing, "add_checker_for_tensors_property", 102);
  check_count(c, fixing, "add_checker_for_overflow", 35);
  check_count(c, fixing, "add_checker_for_null_pointer_dereference", 34);
  check_count(c, fixing, "add_checker_for_recursion", 5);

  // two library-by-subcategory cells the published tables single out
  auto records = load_dataset(kRoot + "/data/ml_vuln_dataset.csv");
  auto cells = cross_tab(records, Dimension::Library, Dimension::VulnSubcategory);
  c.require(cells.at("tensorflow", "integer_overflow") == 63,
            "tensorflow x integer_overflow is not 63");
  c.require(cells.at("numpy", "memory_leak") == 65, "numpy x memory_leak is not 65");

  double elapsed = timer.seconds();
  c.require(elapsed < 1.0, "took " + seconds_str(elapsed) + ", limit is 1s");
  c.headline =
      "dataset aggregation reproduces the bundled 596-record corpus tables "
      "exactly (" +
      seconds_str(elapsed) + ")";
  return c;
}

// --- 2. repair effort distribution ------------------------------------------

Check effort_distribution() {
  Check c;
  Stopwatch timer;
  auto records = load_dataset(kRoot + "/data/ml_vuln_dataset.csv");
  auto by_effort = count_by(records, Dimension::Effort);
  c.require(by_effort.at("micro") == 201, "micro bucket is not 201");
  c.require(by_effort.at("small") == 240, "small bucket is not 240");
  c.require(by_effort.at("medium") == 111, "medium bucket is not 111");
  c.require(by_effort.at("large") == 44, "large bucket is not 44");
  double share = micro_small_share(records);
  double expected = 441.0 / 596.0;
  c.require(share > expected - 0.0005 && share < expected + 0.0005,
            "micro-or-small share " + util::format_fixed(share, 4) +
                " is outside 0.7399 +/- 0.0005");
  double elapsed = timer.seconds();
  c.require(elapsed < 1.0, "took " + seconds_str(elapsed) + ", limit is 1s");
  c.headline =
      "repair effort buckets are 201/240/111/44 and the micro-or-small share is "
      "0.7399 +/- 0.0005 (" +
      seconds_str(elapsed) + ")";
  return c;
}

// --- 3. scope boundary -------------------------------------------------------

Check scope_boundary(const std::vector<propsuite::SuiteResult>& suites) {
  Check c;
  for (const auto& suite : suites) {
    c.require(suite.cases > 0, "a stand-in property suite did not run");
  }
  c.headline =
      "mutation campaigns against full ML libraries are not reproducible on a "
      "single desk machine; bounded property suites exercise the engine instead "
      "(by design)";
  return c;
}

// --- 4. deterministic toy campaign ------------------------------------------

Check toy_campaign() {
  Check c;
  Stopwatch timer;
  const std::string corpus = kRoot + "/tests/fixtures/toy_corpus";
  std::vector<std::string> reports;
  for (int attempt = 0; attempt < 3 && c.ok; ++attempt) {
    testutil::TempDir store("acceptance-toy");
    std::string store_path = (store.path() / "store").string();
    auto scan = cli({"scan", "--corpus", corpus, "--store", store_path});
    c.require(scan.started && scan.exit_code == 0, "scan failed");
    auto run = cli({"run", "--corpus", corpus, "--store", store_path, "--build-cmd",
                    "sh build.sh", "--test-cmd", "sh test.sh", "--timeout", "5",
                    "--workers", "2", "--quiet"},
                   110.0);
    c.require(run.started && run.exit_code == 0 && !run.term_signal,
              "campaign run did not finish cleanly");
    auto report = cli({"report", "--store", store_path, "--format", "json",
                       "--include-timeouts"});
    c.require(report.started && report.exit_code == 0, "report failed");
    if (c.ok) reports.push_back(report.output);
  }
  if (c.ok) {
    c.require(reports[0] == reports[1] && reports[1] == reports[2],
              "reports from fresh runs are not byte-identical");
    try {
      auto parsed = parse_campaign_report(reports[0]);
      c.require(parsed.summary.total == 12, "did not seed exactly 12 mutants");
      c.require(parsed.summary.count(MutantStatus::KilledByTest) == 6,
                "killed_by_test is not 6");
      c.require(parsed.summary.count(MutantStatus::KilledByCrash) == 1,
                "killed_by_crash is not 1");
      c.require(parsed.summary.count(MutantStatus::KilledByTimeout) == 1,
                "killed_by_timeout is not 1");
      c.require(parsed.summary.count(MutantStatus::Alive) == 3, "alive is not 3");
      c.require(parsed.summary.count(MutantStatus::Invalid) == 1,
                "invalid is not 1");
      c.require(parsed.summary.count(MutantStatus::Pending) == 0,
                "mutants left pending");
      c.require(parsed.killed == 8 && parsed.alive == 3,
                "score fraction is not 8/11");
    } catch (const std::exception& e) {
      c.fail(std::string("report is not parseable: ") + e.what());
    }
  }
  double elapsed = timer.seconds();
  c.require(elapsed < 120.0, "took " + seconds_str(elapsed) + ", limit is 120s");
  c.headline =
      "toy corpus campaign seeds 12 mutants, lands 6/1/1/3/1 across "
      "test-kill/crash/timeout/alive/invalid, scores 8/11, and three fresh runs "
      "are byte-identical (" +
      seconds_str(elapsed) + ")";
  return c;
}

// --- 5. a surviving mutant pinpoints the untested guard ----------------------

Check surviving_guard() {
  Check c;
  const std::string corpus = kRoot + "/tests/fixtures/alive_corpus";
  auto scan = cli({"scan", "--corpus", corpus});
  c.require(scan.started && scan.exit_code == 0, "scan failed");
  std::vector<std::string> lines;
  for (const auto& line : util::split(scan.output, '\n')) {
    if (!line.empty()) lines.push_back(line);
  }
  c.require(lines.size() == 1,
            "expected exactly 1 site, found " + std::to_string(lines.size()));
  if (c.ok) {
    try {
      json site = json::parse(lines[0]);
      c.require(site["operator_id"] == "CHK-TENSOR-DEL",
                "site is not a guard deletion");
      c.require(site["file"] == "kernel.cc", "site is not in kernel.cc");
      c.require(site["first_line"] == 81 && site["last_line"] == 84,
                "site does not span lines 81-84");
    } catch (const std::exception& e) {
      c.fail(std::string("site line is not parseable: ") + e.what());
    }
  }
  if (c.ok) {
    testutil::TempDir store("acceptance-alive");
    std::string store_path = (store.path() / "store").string();
    auto scan2 = cli({"scan", "--corpus", corpus, "--store", store_path});
    c.require(scan2.started && scan2.exit_code == 0, "seeding scan failed");
    auto run = cli({"run", "--corpus", corpus, "--store", store_path, "--test-cmd",
                    "sh test.sh", "--timeout", "5", "--quiet"},
                   60.0);
    c.require(run.started && run.exit_code == 0, "campaign run failed");
    auto report = cli({"report", "--store", store_path, "--format", "json"});
    c.require(report.started && report.exit_code == 0, "report failed");
    if (c.ok) {
      try {
        auto parsed = parse_campaign_report(report.output);
        c.require(parsed.summary.total == 1, "campaign did not hold exactly 1 mutant");
        c.require(parsed.summary.count(MutantStatus::Alive) == 1,
                  "the guard deletion did not survive");
      } catch (const std::exception& e) {
        c.fail(std::string("report is not parseable: ") + e.what());
      }
    }
  }
  c.headline =
      "deleting the one shape guard at kernel.cc:81-84 survives a test suite "
      "that never drives the invalid-shape path";
  return c;
}

// --- 6. property suites ------------------------------------------------------

Check property_suites(const std::vector<propsuite::SuiteResult>& suites,
                      const std::vector<std::string>& names) {
  Check c;
  std::size_t total = 0;
  for (std::size_t i = 0; i < suites.size(); ++i) {
    const auto& suite = suites[i];
    total += suite.cases;
    if (suite.cases < 1000) {
      c.fail(names[i] + " ran only " + std::to_string(suite.cases) + " cases");
    }
    if (suite.failed != 0) {
      std::string what =
          names[i] + " failed " + std::to_string(suite.failed) + " cases";
      if (!suite.messages.empty()) what += " (" + suite.messages.front() + ")";
      c.fail(what);
    }
  }
  c.headline = "five randomized property suites passed: " + std::to_string(total) +
               " generated cases across apply/revert, scanning, outcome "
               "classification, store replay, and tabulation";
  return c;
}

// --- 7. commit mining --------------------------------------------------------

// the security-fix messages seeded into data/commit_log.tsv
const std::vector<std::string> kSeededSecurityMessages = {
    "Fix heap buffer overflow in conv2d kernel when filter size is larger than input",
    "Prevent integer underflow in string repeat operation",
    "Patch CVE-2021-29513 type confusion in tensor decoding",
    "Reject out-of-bounds read in sparse slice gradient",
    "Fix use-after-free when session is closed during callback",
    "Avoid double free of device buffer on allocation failure",
    "Plug memory leak in dataset iterator destruction",
    "Guard against null pointer dereference in optimizer registry",
    "Fix segfault on empty input to quantized matmul",
    "Handle division by zero in mean reduction of empty axis",
    "Fix race condition between executor shutdown and step cancellation",
    "Break deadlock in collective ops when a participant aborts",
    "Stop infinite loop in shape inference for recursive functions",
    "Mitigate denial of service via crafted protobuf message",
    "Escape HTML to block XSS in profiler dashboard",
    "Harden SQL layer against injection through table name parameter",
    "Zero out uninitialized padding bytes in record writer",
    "Fix vulnerability in pickle loading of legacy checkpoints",
    "Security hardening for the saved model loader",
    "Prevent exploitable stack overflow in recursive parser",
    "Block attack vector through malformed npz archives",
    "Backport fixes for CVE-2022-21725 and CVE-2022-21726",
    "fix cve-2021-41228 code execution in saved_model_cli",
    "Additional regression test for CVE-2021-29513 boundary cases",
    "Sanitize negative strides to avoid out of bounds write in im2col",
};

Check commit_mining() {
  Check c;
  Stopwatch timer;
  auto result =
      cli({"mine", "--log", kRoot + "/data/commit_log.tsv", "--format", "json"});
  c.require(result.started && result.exit_code == 0, "mine command failed");
  if (c.ok) {
    try {
      json doc = json::parse(result.output);
      c.require(doc["total_commits"].get<long long>() == 50,
                "log does not hold 50 commits");
      c.require(doc["flagged_count"].get<long long>() == 25,
                "flagged " + doc["flagged_count"].dump() + " commits, expected 25");
      std::set<std::string> flagged;
      for (const auto& row : doc["flagged"]) {
        flagged.insert(row["sha"].get<std::string>());
      }
      std::set<std::string> expected;
      for (const auto& message : kSeededSecurityMessages) {
        expected.insert(util::sha256_hex(message).substr(0, 40));
      }
      c.require(flagged == expected,
                "flagged commits do not match the seeded security fixes");
    } catch (const std::exception& e) {
      c.fail(std::string("mine output is not parseable: ") + e.what());
    }
  }

  // CVE extraction against a fixed reference table
  const std::vector<std::pair<std::string, std::vector<std::string>>> table = {
      {"", {}},
      {"no identifiers here", {}},
      {"CVE-2021-29513", {"CVE-2021-29513"}},
      {"cve-2021-29513", {"CVE-2021-29513"}},
      {"Cve-2021-29513 and cVe-2021-29513", {"CVE-2021-29513"}},
      {"CVE-2022-21725 and CVE-2022-21726", {"CVE-2022-21725", "CVE-2022-21726"}},
      {"CVE-2021-123", {}},
      {"CVE-2021-1234567", {"CVE-2021-1234567"}},
      {"CVE-21-1234", {}},
      {"prefixCVE-2021-1111suffix", {"CVE-2021-1111"}},
      {"CVE 2021 1234", {}},
      {"CVE-2021-29513.", {"CVE-2021-29513"}},
      {"see CVE-2021-41228, CVE-2021-29513", {"CVE-2021-41228", "CVE-2021-29513"}},
      {"CVE-2021-29513 fixes CVE-2021-41228 and CVE-2021-29513 again",
       {"CVE-2021-29513", "CVE-2021-41228"}},
      {"CVE--2021-1234", {}},
      {"xcve-2021-0001x", {"CVE-2021-0001"}},
      {"CVE-0000-0000", {"CVE-0000-0000"}},
      {"multiline\nCVE-2020-5215\ntail", {"CVE-2020-5215"}},
      {"CVE-2021-29513CVE-2021-41228", {"CVE-2021-29513", "CVE-2021-41228"}},
      {"Backport fixes for CVE-2022-21725 and CVE-2022-21726",
       {"CVE-2022-21725", "CVE-2022-21726"}},
  };
  for (const auto& [input, expected] : table) {
    if (extract_cves(input) != expected) {
      c.fail("CVE extraction diverges on: \"" + input + "\"");
    }
  }

  double elapsed = timer.seconds();
  c.require(elapsed < 1.0, "took " + seconds_str(elapsed) + ", limit is 1s");
  c.headline =
      "commit mining flags exactly the 25 seeded security fixes out of 50 and CVE "
      "extraction matches its 20-case reference table (" +
      seconds_str(elapsed) + ")";
  return c;
}

void print(const Check& c, int& failures) {
  if (c.ok) {
    std::cout << "PASS: " << c.headline << "\n";
  } else {
    ++failures;
    std::cout << "FAIL: " << c.headline << ": " << c.detail << "\n";
  }
}

}  // namespace

int main() {
  std::vector<std::string> suite_names = {
      "apply/revert round-trip", "scan determinism", "outcome classification",
      "store replay",            "tabulation",
  };
  std::vector<propsuite::SuiteResult> suites;
  suites.push_back(propsuite::apply_revert_round_trip(1000, 0xacce97ed0001ULL));
  suites.push_back(propsuite::scan_determinism(1000, 0xacce97ed0002ULL));
  suites.push_back(propsuite::outcome_classification_total(1000));
  suites.push_back(propsuite::store_replay_consistency(1000, 0xacce97ed0003ULL));
  suites.push_back(propsuite::tabulation_consistency(1000, 0xacce97ed0004ULL));

  int failures = 0;
  print(dataset_tables(), failures);
  print(effort_distribution(), failures);
  print(scope_boundary(suites), failures);
  print(toy_campaign(), failures);
  print(surviving_guard(), failures);
  print(property_suites(suites, suite_names), failures);
  print(commit_mining(), failures);
  return failures;
}
