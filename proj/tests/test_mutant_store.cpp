#include <doctest.h>

#include <filesystem>

#include "mutforge/mutant_store.hpp"
#include "mutforge/util.hpp"
#include "testutil.hpp"

using namespace mutforge;

namespace {

MatchSite sample_site(const std::string& file, std::uint64_t start,
                      const std::string& operator_id = "CHK-TENSOR-DEL") {
  MatchSite site;
  site.file = file;
  site.start = start;
  site.end = start + 15;
  site.first_line = 3;
  site.last_line = 3;
  site.operator_id = operator_id;
  site.matched_text = "OP_REQUIRES(a);";
  site.context_digest = util::sha256_hex("pretend file body");
  return site;
}

Mutant sample_mutant(const std::string& file, std::uint64_t start) {
  const auto* op = find_operator(builtin_catalog(), "CHK-TENSOR-DEL");
  REQUIRE(op != nullptr);
  return make_mutant(sample_site(file, start), *op);
}

Evidence sample_evidence() {
  Evidence evidence;
  evidence.phase = "test";
  evidence.exit_code = 1;
  evidence.signal_name = std::nullopt;
  evidence.first_failing_test = "suite.case_one";
  evidence.output_excerpt = "FAIL: suite.case_one\nexpected 3 got 4\n";
  evidence.duration_seconds = 0.25;
  return evidence;
}

}  // namespace

TEST_SUITE("mutant_store") {

TEST_CASE("status names round-trip and terminality is total") {
  auto statuses = all_mutant_statuses();
  CHECK(statuses.size() == 7);
  for (MutantStatus s : statuses) {
    CHECK(parse_mutant_status(to_string(s)) == s);
  }
  CHECK(to_string(MutantStatus::Pending) == "pending");
  CHECK(to_string(MutantStatus::KilledByTest) == "killed_by_test");
  CHECK(to_string(MutantStatus::KilledByCrash) == "killed_by_crash");
  CHECK(to_string(MutantStatus::KilledByTimeout) == "killed_by_timeout");
  CHECK(!parse_mutant_status("Pending").has_value());
  CHECK(!parse_mutant_status("").has_value());
  CHECK(!is_terminal(MutantStatus::Pending));
  for (MutantStatus s : statuses) {
    if (s != MutantStatus::Pending) CHECK(is_terminal(s));
  }
}

TEST_CASE("mutant ids are stable and sensitive to identity fields") {
  auto site = sample_site("a.c", 10);
  auto id = compute_mutant_id(site);
  CHECK(id.size() == 64);
  CHECK(id.find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(compute_mutant_id(site) == id);

  auto other = site;
  other.file = "b.c";
  CHECK(compute_mutant_id(other) != id);
  other = site;
  other.start = 11;
  CHECK(compute_mutant_id(other) != id);
  other = site;
  other.end = 99;
  CHECK(compute_mutant_id(other) != id);
  other = site;
  other.operator_id = "MEM-RELEASE-DEL";
  CHECK(compute_mutant_id(other) != id);
  other = site;
  other.context_digest = util::sha256_hex("different body");
  CHECK(compute_mutant_id(other) != id);

  // content identity flows through the digest, not the excerpt copy
  other = site;
  other.matched_text = "something else";
  CHECK(compute_mutant_id(other) == id);
}

TEST_CASE("make_mutant applies the operator transform") {
  auto deleted = sample_mutant("a.c", 10);
  CHECK(deleted.status == MutantStatus::Pending);
  CHECK(deleted.original_text == "OP_REQUIRES(a);");
  CHECK(deleted.mutated_text.empty());
  CHECK(!deleted.evidence.has_value());

  const auto* narrow = find_operator(builtin_catalog(), "TYPE-NARROW");
  auto site = sample_site("b.c", 0, "TYPE-NARROW");
  site.matched_text = "int64_t n = m;";
  site.end = site.start + site.matched_text.size();
  auto mutant = make_mutant(site, *narrow);
  CHECK(mutant.original_text == "int64_t n = m;");
  CHECK(mutant.mutated_text == "int32_t n = m;");
}

TEST_CASE("store persists inserts and status updates across reopen") {
  testutil::TempDir dir("store");
  auto path = (dir.path() / "db").string();
  auto first = sample_mutant("a.c", 10);
  auto second = sample_mutant("a.c", 40);

  {
    auto store = MutantStore::open(path);
    CHECK(store.path() == path);
    CHECK(store.append_mutants({first, second}) == 2);
    CHECK(store.mutants().size() == 2);

    auto evidence = sample_evidence();
    store.update_status(first.mutant_id, MutantStatus::KilledByTest, evidence);

    Evidence crash;
    crash.phase = "test";
    crash.exit_code = 0;
    crash.signal_name = "SIGSEGV";
    crash.output_excerpt = std::string("binary\0bytes\xff", 13);
    crash.duration_seconds = 1.5;
    store.update_status(second.mutant_id, MutantStatus::KilledByCrash, crash);
  }

  auto store = MutantStore::open(path, MutantStore::Mode::ReadOnly);
  REQUIRE(store.mutants().size() == 2);
  const Mutant* found = store.find(first.mutant_id);
  REQUIRE(found != nullptr);
  CHECK(found->status == MutantStatus::KilledByTest);
  REQUIRE(found->evidence.has_value());
  CHECK(*found->evidence == sample_evidence());
  CHECK(found->site == first.site);
  CHECK(found->original_text == first.original_text);
  CHECK(found->mutated_text == first.mutated_text);

  const Mutant* crashed = store.find(second.mutant_id);
  REQUIRE(crashed->evidence.has_value());
  CHECK(crashed->evidence->signal_name == "SIGSEGV");
  CHECK(crashed->evidence->output_excerpt == std::string("binary\0bytes\xff", 13));
  CHECK(store.find("no-such-id") == nullptr);
}

TEST_CASE("duplicate inserts are ignored, integrity violations rejected") {
  testutil::TempDir dir("store");
  auto store = MutantStore::open((dir.path() / "db").string());
  auto mutant = sample_mutant("a.c", 10);
  CHECK(store.append_mutants({mutant, mutant}) == 1);
  CHECK(store.append_mutants({mutant}) == 0);
  CHECK(store.mutants().size() == 1);

  auto torn = sample_mutant("a.c", 99);
  torn.original_text = "does not match the site";
  CHECK_THROWS_WITH_AS(store.append_mutants({torn}),
                       doctest::Contains("disagrees"), StoreError);
}

TEST_CASE("status transitions are guarded") {
  testutil::TempDir dir("store");
  auto store = MutantStore::open((dir.path() / "db").string());
  auto mutant = sample_mutant("a.c", 10);
  store.append_mutants({mutant});

  CHECK_THROWS_WITH_AS(
      store.update_status("missing", MutantStatus::Alive, std::nullopt),
      doctest::Contains("unknown mutant id"), StoreError);
  CHECK_THROWS_WITH_AS(
      store.update_status(mutant.mutant_id, MutantStatus::Pending, std::nullopt),
      doctest::Contains("back to pending"), StoreError);

  store.update_status(mutant.mutant_id, MutantStatus::Alive, std::nullopt);
  CHECK_THROWS_WITH_AS(
      store.update_status(mutant.mutant_id, MutantStatus::KilledByTest, std::nullopt),
      doctest::Contains("already terminal"), StoreError);
  CHECK(store.find(mutant.mutant_id)->status == MutantStatus::Alive);
}

TEST_CASE("oversized evidence excerpts are clamped") {
  testutil::TempDir dir("store");
  auto path = (dir.path() / "db").string();
  auto mutant = sample_mutant("a.c", 10);
  {
    auto store = MutantStore::open(path);
    store.append_mutants({mutant});
    Evidence evidence = sample_evidence();
    evidence.output_excerpt.assign(kMaxExcerptBytes + 5000, 'x');
    store.update_status(mutant.mutant_id, MutantStatus::KilledByTest, evidence);
    CHECK(store.find(mutant.mutant_id)->evidence->output_excerpt.size() ==
          kMaxExcerptBytes);
  }
  auto store = MutantStore::open(path, MutantStore::Mode::ReadOnly);
  CHECK(store.find(mutant.mutant_id)->evidence->output_excerpt.size() ==
        kMaxExcerptBytes);
}

TEST_CASE("a second writer is refused while the first holds the lock") {
  testutil::TempDir dir("store");
  auto path = (dir.path() / "db").string();
  auto store = MutantStore::open(path);
  CHECK_THROWS_WITH_AS(MutantStore::open(path), doctest::Contains("locked"),
                       StoreError);

  // the refused attempt must not poison the holder
  CHECK(store.append_mutants({sample_mutant("a.c", 10)}) == 1);
  store.close();
  auto reopened = MutantStore::open(path);
  CHECK(reopened.mutants().size() == 1);

  // read-only access never takes the write lock
  auto ro = MutantStore::open(path, MutantStore::Mode::ReadOnly);
  CHECK(ro.mutants().size() == 1);
}

TEST_CASE("read-only stores reject writes and missing paths") {
  testutil::TempDir dir("store");
  auto path = (dir.path() / "db").string();
  CHECK_THROWS_AS(MutantStore::open(path, MutantStore::Mode::ReadOnly), StoreError);
  { MutantStore::open(path); }
  auto ro = MutantStore::open(path, MutantStore::Mode::ReadOnly);
  CHECK_THROWS_WITH_AS(ro.append_mutants({sample_mutant("a.c", 1)}),
                       doctest::Contains("not writable"), StoreError);
}

TEST_CASE("corrupt log tails truncate on write, stay put on read") {
  testutil::TempDir dir("store");
  auto path = (dir.path() / "db").string();
  auto log_path = (dir.path() / "db" / "log").string();
  auto mutant = sample_mutant("a.c", 10);
  {
    auto store = MutantStore::open(path);
    store.append_mutants({mutant});
    store.update_status(mutant.mutant_id, MutantStatus::Alive, std::nullopt);
  }
  auto clean_size = std::filesystem::file_size(log_path);

  // garbage with a newline plus a torn final record
  {
    std::string log = util::read_file_bytes(log_path);
    log += "this is not json\n{\"type\":\"insert\",\"mut";
    util::write_file_bytes(log_path, log);
  }

  {
    auto ro = MutantStore::open(path, MutantStore::Mode::ReadOnly);
    REQUIRE(ro.mutants().size() == 1);
    CHECK(ro.mutants()[0].status == MutantStatus::Alive);
    REQUIRE(ro.warnings().size() == 1);
    CHECK(ro.warnings()[0].find("ignored") != std::string::npos);
  }
  CHECK(std::filesystem::file_size(log_path) > clean_size);  // untouched

  {
    auto rw = MutantStore::open(path);
    REQUIRE(rw.warnings().size() == 1);
    CHECK(rw.warnings()[0].find("truncated") != std::string::npos);
    CHECK(rw.mutants().size() == 1);
  }
  CHECK(std::filesystem::file_size(log_path) == clean_size);

  // after truncation the store accepts appends again
  auto rw = MutantStore::open(path);
  CHECK(rw.warnings().empty());
  CHECK(rw.append_mutants({sample_mutant("a.c", 50)}) == 1);
}

TEST_CASE("stale status records are skipped with a warning, not fatal") {
  testutil::TempDir dir("store");
  auto path = (dir.path() / "db").string();
  auto log_path = (dir.path() / "db" / "log").string();
  auto mutant = sample_mutant("a.c", 10);
  {
    auto store = MutantStore::open(path);
    store.append_mutants({mutant});
  }
  {
    std::string log = util::read_file_bytes(log_path);
    log += "{\"type\":\"status\",\"mutant_id\":\"unknown\",\"status\":\"alive\","
           "\"evidence\":null}\n";
    util::write_file_bytes(log_path, log);
    auto store = MutantStore::open(path);
    REQUIRE(store.warnings().size() == 1);
    CHECK(store.warnings()[0].find("inapplicable") != std::string::npos);
    CHECK(store.mutants().size() == 1);
    // the stale record is structurally sound, so nothing is truncated
    store.close();
    CHECK(util::read_file_bytes(log_path) == log);
  }
}

TEST_CASE("summaries are zero-filled over every status") {
  testutil::TempDir dir("store");
  auto store = MutantStore::open((dir.path() / "db").string());
  auto summary = store.summarize();
  CHECK(summary.total == 0);
  CHECK(summary.by_status.size() == 7);
  for (const auto& [status, count] : summary.by_status) CHECK(count == 0);
  CHECK(summary.by_operator.empty());

  auto a = sample_mutant("a.c", 10);
  auto b = sample_mutant("a.c", 40);
  auto c = sample_mutant("b.c", 5);
  store.append_mutants({a, b, c});
  store.update_status(a.mutant_id, MutantStatus::KilledByTest, sample_evidence());
  store.update_status(b.mutant_id, MutantStatus::Alive, std::nullopt);

  summary = store.summarize();
  CHECK(summary.total == 3);
  CHECK(summary.count(MutantStatus::KilledByTest) == 1);
  CHECK(summary.count(MutantStatus::Alive) == 1);
  CHECK(summary.count(MutantStatus::Pending) == 1);
  CHECK(summary.count(MutantStatus::Invalid) == 0);
  REQUIRE(summary.by_operator.count("CHK-TENSOR-DEL") == 1);
  const auto& per_op = summary.by_operator.at("CHK-TENSOR-DEL");
  CHECK(per_op.size() == 7);
  CHECK(per_op.at(MutantStatus::KilledByTest) == 1);
  CHECK(per_op.at(MutantStatus::Skipped) == 0);
}

TEST_CASE("stores move cleanly") {
  testutil::TempDir dir("store");
  auto a = MutantStore::open((dir.path() / "db").string());
  a.append_mutants({sample_mutant("a.c", 10)});
  MutantStore b = std::move(a);
  CHECK(b.mutants().size() == 1);
  CHECK(b.append_mutants({sample_mutant("a.c", 77)}) == 1);
}

}  // TEST_SUITE
