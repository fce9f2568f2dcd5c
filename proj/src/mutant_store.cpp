#include "mutforge/mutant_store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstring>
#include <filesystem>

#include <json.hpp>

#include "mutforge/util.hpp"

namespace fs = std::filesystem;

namespace mutforge {

namespace {

constexpr std::array<MutantStatus, 7> kStatuses = {
    MutantStatus::Pending,        MutantStatus::Invalid,      MutantStatus::KilledByTest,
    MutantStatus::KilledByCrash,  MutantStatus::KilledByTimeout, MutantStatus::Alive,
    MutantStatus::Skipped,
};
constexpr std::array<std::string_view, 7> kStatusNames = {
    "pending", "invalid", "killed_by_test", "killed_by_crash",
    "killed_by_timeout", "alive", "skipped",
};

nlohmann::json evidence_to_json(const Evidence& evidence) {
  nlohmann::json j;
  j["phase"] = evidence.phase;
  j["exit_code"] = evidence.exit_code;
  if (evidence.signal_name) {
    j["signal_name"] = *evidence.signal_name;
  } else {
    j["signal_name"] = nullptr;
  }
  j["first_failing_test"] = evidence.first_failing_test;
  j["output_excerpt_b64"] = util::base64_encode(evidence.output_excerpt);
  j["duration_seconds"] = evidence.duration_seconds;
  return j;
}

std::string decode_b64_field(const nlohmann::json& j, const char* key) {
  auto decoded = util::base64_decode(j.at(key).get<std::string>());
  if (!decoded) throw StoreError(std::string("undecodable base64 in ") + key);
  return std::move(*decoded);
}

Evidence evidence_from_json(const nlohmann::json& j) {
  Evidence evidence;
  evidence.phase = j.at("phase").get<std::string>();
  evidence.exit_code = j.at("exit_code").get<int>();
  if (!j.at("signal_name").is_null()) {
    evidence.signal_name = j.at("signal_name").get<std::string>();
  }
  evidence.first_failing_test = j.at("first_failing_test").get<std::string>();
  evidence.output_excerpt = decode_b64_field(j, "output_excerpt_b64");
  evidence.duration_seconds = j.at("duration_seconds").get<double>();
  return evidence;
}

nlohmann::json insert_to_json(const Mutant& mutant) {
  nlohmann::json j;
  j["type"] = "insert";
  j["mutant_id"] = mutant.mutant_id;
  j["site"] = {{"file", mutant.site.file},
               {"start", mutant.site.start},
               {"end", mutant.site.end},
               {"first_line", mutant.site.first_line},
               {"last_line", mutant.site.last_line},
               {"operator_id", mutant.site.operator_id},
               {"matched_text_b64", util::base64_encode(mutant.site.matched_text)},
               {"context_digest", mutant.site.context_digest}};
  j["original_b64"] = util::base64_encode(mutant.original_text);
  j["mutated_b64"] = util::base64_encode(mutant.mutated_text);
  return j;
}

Mutant insert_from_json(const nlohmann::json& j) {
  Mutant mutant;
  mutant.mutant_id = j.at("mutant_id").get<std::string>();
  const auto& site = j.at("site");
  mutant.site.file = site.at("file").get<std::string>();
  mutant.site.start = site.at("start").get<std::uint64_t>();
  mutant.site.end = site.at("end").get<std::uint64_t>();
  mutant.site.first_line = site.at("first_line").get<std::uint64_t>();
  mutant.site.last_line = site.at("last_line").get<std::uint64_t>();
  mutant.site.operator_id = site.at("operator_id").get<std::string>();
  mutant.site.matched_text = decode_b64_field(site, "matched_text_b64");
  mutant.site.context_digest = site.at("context_digest").get<std::string>();
  mutant.original_text = decode_b64_field(j, "original_b64");
  mutant.mutated_text = decode_b64_field(j, "mutated_b64");
  mutant.status = MutantStatus::Pending;
  return mutant;
}

}  // namespace

std::string_view to_string(MutantStatus s) {
  return kStatusNames[static_cast<std::size_t>(s)];
}

std::optional<MutantStatus> parse_mutant_status(std::string_view s) {
  for (std::size_t i = 0; i < kStatuses.size(); ++i) {
    if (kStatusNames[i] == s) return kStatuses[i];
  }
  return std::nullopt;
}

std::span<const MutantStatus> all_mutant_statuses() { return kStatuses; }

std::string compute_mutant_id(const MatchSite& site) {
  std::string key;
  key += site.file;
  key += '\0';
  key += std::to_string(site.start);
  key += '\0';
  key += std::to_string(site.end);
  key += '\0';
  key += site.operator_id;
  key += '\0';
  key += site.context_digest;
  return util::sha256_hex(key);
}

Mutant make_mutant(const MatchSite& site, const MutationOperator& op) {
  Mutant mutant;
  mutant.mutant_id = compute_mutant_id(site);
  mutant.site = site;
  mutant.original_text = site.matched_text;
  mutant.mutated_text = apply_transform(op.transform, site.matched_text);
  mutant.status = MutantStatus::Pending;
  return mutant;
}

long long CampaignSummary::count(MutantStatus s) const {
  auto it = by_status.find(s);
  return it == by_status.end() ? 0 : it->second;
}

MutantStore MutantStore::open(const std::string& path, Mode mode) {
  MutantStore store;
  store.path_ = path;
  store.mode_ = mode;

  fs::path dir(path);
  std::string header_path = (dir / "header").string();
  std::string log_path = (dir / "log").string();
  std::string lock_path = (dir / "lock").string();

  if (mode == Mode::ReadWrite) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw StoreError("cannot create store at '" + path + "': " + ec.message());
    store.lock_fd_ = ::open(lock_path.c_str(), O_CREAT | O_RDWR, 0644);
    if (store.lock_fd_ < 0) {
      throw StoreError("cannot open lock file: " + std::string(std::strerror(errno)));
    }
    if (::flock(store.lock_fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(store.lock_fd_);
      store.lock_fd_ = -1;
      throw StoreError("store '" + path + "' is locked by another writer");
    }
    if (!fs::exists(header_path)) {
      nlohmann::json header;
      header["format"] = "mutforge-store";
      header["version"] = 1;
      header["digest"] = "sha-256";
      util::write_file_atomic(header_path, header.dump() + "\n");
    }
  } else if (!fs::is_directory(dir)) {
    throw StoreError("store '" + path + "' does not exist");
  }

  if (fs::exists(header_path)) {
    nlohmann::json header;
    try {
      header = nlohmann::json::parse(util::read_file_bytes(header_path));
    } catch (const std::exception& e) {
      if (store.lock_fd_ >= 0) ::close(store.lock_fd_);
      throw StoreError("store header unreadable: " + std::string(e.what()));
    }
    if (header.value("format", "") != "mutforge-store" ||
        header.value("digest", "") != "sha-256") {
      if (store.lock_fd_ >= 0) ::close(store.lock_fd_);
      throw StoreError("store header has unknown format");
    }
  } else if (mode == Mode::ReadOnly) {
    throw StoreError("store '" + path + "' has no header");
  }

  if (fs::exists(log_path)) store.replay(log_path);

  if (mode == Mode::ReadWrite) {
    store.log_fd_ = ::open(log_path.c_str(), O_CREAT | O_WRONLY | O_APPEND, 0644);
    if (store.log_fd_ < 0) {
      ::close(store.lock_fd_);
      store.lock_fd_ = -1;
      throw StoreError("cannot open store log: " + std::string(std::strerror(errno)));
    }
  }
  return store;
}

void MutantStore::replay(const std::string& log_path) {
  std::string text = util::read_file_bytes(log_path);
  std::size_t pos = 0;
  std::size_t good_end = 0;
  std::size_t line_no = 0;
  bool corrupt = false;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    ++line_no;
    if (nl == std::string::npos) {
      corrupt = true;  // partial trailing line, no terminator
      break;
    }
    std::string_view line(text.data() + pos, nl - pos);
    nlohmann::json record;
    bool applied = false;
    try {
      record = nlohmann::json::parse(line);
      std::string type = record.at("type").get<std::string>();
      if (type == "insert") {
        Mutant mutant = insert_from_json(record);
        if (index_.find(mutant.mutant_id) == index_.end()) {
          index_[mutant.mutant_id] = mutants_.size();
          mutants_.push_back(std::move(mutant));
        }
        applied = true;
      } else if (type == "status") {
        std::string id = record.at("mutant_id").get<std::string>();
        auto status = parse_mutant_status(record.at("status").get<std::string>());
        auto it = index_.find(id);
        if (status && it != index_.end() &&
            mutants_[it->second].status == MutantStatus::Pending &&
            *status != MutantStatus::Pending) {
          mutants_[it->second].status = *status;
          if (!record.at("evidence").is_null()) {
            mutants_[it->second].evidence = evidence_from_json(record.at("evidence"));
          }
          applied = true;
        } else {
          warnings_.push_back("log line " + std::to_string(line_no) +
                              ": inapplicable status record skipped");
          applied = true;  // structurally valid, semantically stale
        }
      }
    } catch (const std::exception&) {
      applied = false;
    }
    if (!applied) {
      corrupt = true;
      break;
    }
    pos = nl + 1;
    good_end = pos;
  }

  if (corrupt) {
    std::size_t dropped = text.size() - good_end;
    if (mode_ == Mode::ReadWrite) {
      fs::resize_file(log_path, good_end);
      warnings_.push_back("corrupt log tail (" + std::to_string(dropped) +
                          " bytes) truncated");
    } else {
      warnings_.push_back("corrupt log tail (" + std::to_string(dropped) +
                          " bytes) ignored");
    }
  }
}

MutantStore::MutantStore(MutantStore&& other) noexcept { *this = std::move(other); }

MutantStore& MutantStore::operator=(MutantStore&& other) noexcept {
  if (this != &other) {
    close();
    path_ = std::move(other.path_);
    mode_ = other.mode_;
    log_fd_ = other.log_fd_;
    lock_fd_ = other.lock_fd_;
    mutants_ = std::move(other.mutants_);
    index_ = std::move(other.index_);
    warnings_ = std::move(other.warnings_);
    other.log_fd_ = -1;
    other.lock_fd_ = -1;
  }
  return *this;
}

MutantStore::~MutantStore() { close(); }

void MutantStore::close() {
  if (log_fd_ >= 0) {
    ::close(log_fd_);
    log_fd_ = -1;
  }
  if (lock_fd_ >= 0) {
    ::close(lock_fd_);  // releases the flock
    lock_fd_ = -1;
  }
}

void MutantStore::append_line(const std::string& line) {
  if (mode_ != Mode::ReadWrite || log_fd_ < 0) {
    throw StoreError("store is not writable");
  }
  std::string payload = line + "\n";
  std::size_t written = 0;
  while (written < payload.size()) {
    ssize_t n = ::write(log_fd_, payload.data() + written, payload.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw StoreError("store write failed: " + std::string(std::strerror(errno)));
    }
    written += static_cast<std::size_t>(n);
  }
}

std::size_t MutantStore::append_mutants(const std::vector<Mutant>& mutants) {
  std::size_t inserted = 0;
  for (const Mutant& mutant : mutants) {
    if (mutant.original_text != mutant.site.matched_text) {
      throw StoreError("mutant " + mutant.mutant_id +
                       ": original_text disagrees with site text");
    }
    if (index_.find(mutant.mutant_id) != index_.end()) continue;
    append_line(insert_to_json(mutant).dump());
    Mutant stored = mutant;
    stored.status = MutantStatus::Pending;
    stored.evidence.reset();
    index_[stored.mutant_id] = mutants_.size();
    mutants_.push_back(std::move(stored));
    ++inserted;
  }
  return inserted;
}

void MutantStore::update_status(const std::string& mutant_id, MutantStatus status,
                                const std::optional<Evidence>& evidence) {
  auto it = index_.find(mutant_id);
  if (it == index_.end()) throw StoreError("unknown mutant id '" + mutant_id + "'");
  Mutant& mutant = mutants_[it->second];
  if (mutant.status != MutantStatus::Pending) {
    throw StoreError("mutant " + mutant_id + " already terminal (" +
                     std::string(to_string(mutant.status)) + ")");
  }
  if (status == MutantStatus::Pending) {
    throw StoreError("cannot transition mutant " + mutant_id + " back to pending");
  }
  std::optional<Evidence> bounded = evidence;
  if (bounded && bounded->output_excerpt.size() > kMaxExcerptBytes) {
    bounded->output_excerpt.resize(kMaxExcerptBytes);
  }
  nlohmann::json record;
  record["type"] = "status";
  record["mutant_id"] = mutant_id;
  record["status"] = std::string(to_string(status));
  record["evidence"] = bounded ? evidence_to_json(*bounded) : nlohmann::json(nullptr);
  append_line(record.dump());
  mutant.status = status;
  mutant.evidence = bounded;
}

const Mutant* MutantStore::find(std::string_view mutant_id) const {
  auto it = index_.find(std::string(mutant_id));
  return it == index_.end() ? nullptr : &mutants_[it->second];
}

CampaignSummary MutantStore::summarize() const {
  CampaignSummary summary;
  for (MutantStatus s : kStatuses) summary.by_status[s] = 0;
  for (const Mutant& mutant : mutants_) {
    summary.by_status[mutant.status]++;
    auto& per_op = summary.by_operator[mutant.site.operator_id];
    if (per_op.empty()) {
      for (MutantStatus s : kStatuses) per_op[s] = 0;
    }
    per_op[mutant.status]++;
    summary.total++;
  }
  return summary;
}

}  // namespace mutforge
