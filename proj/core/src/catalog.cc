/*
 * Copyright 2026 The inferq Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "inferq/catalog.h"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <atomic>
#include <cctype>
#include <chrono>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "inferq/digest.h"
#include "inferq/error.h"
#include "inferq/model_io.h"

namespace inferq {

namespace fs = std::filesystem;

struct Catalog::State {
  Snapshot snapshot;
  std::map<std::string, std::vector<CatalogEntry>> entries;
};

namespace {

[[noreturn]] void io_fail(const std::string& what, const fs::path& path) {
  throw Error(ErrorCode::kIoError, what + " " + path.string() + ": " + std::strerror(errno));
}

class Fd {
 public:
  explicit Fd(int fd) : fd_(fd) {}
  ~Fd() {
    if (fd_ >= 0) ::close(fd_);
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  int get() const { return fd_; }

 private:
  int fd_;
};

void write_all(int fd, const char* data, size_t n, const fs::path& path) {
  while (n > 0) {
    const ssize_t w = ::write(fd, data, n);
    if (w < 0) {
      if (errno == EINTR) continue;
      io_fail("cannot write", path);
    }
    data += w;
    n -= static_cast<size_t>(w);
  }
}

void sync_dir(const fs::path& dir) {
  Fd fd(::open(dir.c_str(), O_RDONLY | O_DIRECTORY));
  if (fd.get() >= 0) ::fsync(fd.get());
}

bool valid_name(const std::string& name) {
  if (name.empty() || !(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_')) return false;
  for (char c : name) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail("cannot read", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// `<txid> name:version:digest ... ts=<unix_ms>`
struct Record {
  uint64_t txid = 0;
  int64_t ts = 0;
  std::vector<CatalogEntry> entries;
};

Record parse_record(const std::string& line, const fs::path& log) {
  std::istringstream in(line);
  Record r;
  std::string tok;
  auto bad = [&]() { return Error(ErrorCode::kParseError, "corrupt log record in " + log.string() + ": " + line); };
  if (!(in >> tok)) throw bad();
  try {
    r.txid = std::stoull(tok);
  } catch (const std::exception&) {
    throw bad();
  }
  while (in >> tok) {
    if (tok.rfind("ts=", 0) == 0) {
      try {
        r.ts = std::stoll(tok.substr(3));
      } catch (const std::exception&) {
        throw bad();
      }
      continue;
    }
    const auto a = tok.find(':');
    const auto b = tok.find(':', a == std::string::npos ? a : a + 1);
    if (a == std::string::npos || b == std::string::npos) throw bad();
    CatalogEntry e;
    e.name = tok.substr(0, a);
    try {
      e.version = std::stoll(tok.substr(a + 1, b - a - 1));
    } catch (const std::exception&) {
      throw bad();
    }
    e.digest = tok.substr(b + 1);
    e.txid = r.txid;
    r.entries.push_back(std::move(e));
  }
  for (auto& e : r.entries) e.created_at_ms = r.ts;
  return r;
}

class FileLock {
 public:
  explicit FileLock(int fd) : fd_(fd) {
    while (::flock(fd_, LOCK_EX) != 0) {
      if (errno != EINTR) throw Error(ErrorCode::kIoError, "cannot lock catalog");
    }
  }
  ~FileLock() { ::flock(fd_, LOCK_UN); }

 private:
  int fd_;
};

}  // namespace

Catalog::Catalog(fs::path root, FaultHook hook)
    : root_(std::move(root)), hook_(std::move(hook)), state_(std::make_shared<const State>()) {
  std::error_code ec;
  fs::create_directories(root_ / "objects", ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create catalog at " + root_.string() + ": " + ec.message());
  lock_fd_ = ::open((root_ / "lock").c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (lock_fd_ < 0) io_fail("cannot open", root_ / "lock");
  {
    Fd log(::open((root_ / "log").c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644));
    if (log.get() < 0) io_fail("cannot open", root_ / "log");
  }
  std::lock_guard<std::mutex> guard(commit_mu_);
  FileLock lock(lock_fd_);
  // A record without its newline is a commit that never completed.
  const std::string text = read_file(root_ / "log");
  const auto end = text.rfind('\n');
  const size_t complete = end == std::string::npos ? 0 : end + 1;
  if (complete < text.size()) {
    if (::truncate((root_ / "log").c_str(), static_cast<off_t>(complete)) != 0) {
      io_fail("cannot truncate", root_ / "log");
    }
  }
  catch_up();
}

Catalog::~Catalog() {
  if (lock_fd_ >= 0) ::close(lock_fd_);
}

bool Catalog::exists(const fs::path& dir) { return fs::is_regular_file(dir / "log"); }

std::shared_ptr<const Catalog::State> Catalog::state() const { return std::atomic_load(&state_); }

void Catalog::catch_up() {
  const fs::path log = root_ / "log";
  std::ifstream in(log, std::ios::binary);
  if (!in) io_fail("cannot read", log);
  in.seekg(static_cast<std::streamoff>(log_offset_));
  std::string rest((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto end = rest.rfind('\n');
  if (end == std::string::npos) return;
  auto next = std::make_shared<State>(*state());
  std::istringstream lines(rest.substr(0, end + 1));
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    Record r = parse_record(line, log);
    for (auto& e : r.entries) {
      next->snapshot.versions[e.name] = e.version;
      next->entries[e.name].push_back(std::move(e));
    }
    next->snapshot.txid = r.txid;
  }
  log_offset_ += end + 1;
  std::atomic_store(&state_, std::shared_ptr<const State>(std::move(next)));
}

void Catalog::write_object(const std::string& digest, const std::string& document) {
  const fs::path target = root_ / "objects" / digest;
  if (fs::exists(target) && sha256_hex(read_file(target)) == digest) return;
  const fs::path temp = root_ / "objects" / (".tmp-" + digest + "-" + std::to_string(::getpid()));
  {
    Fd fd(::open(temp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644));
    if (fd.get() < 0) io_fail("cannot create", temp);
    write_all(fd.get(), document.data(), document.size(), temp);
    if (hook_) hook_(WriteStep::kObjectWritten);
    if (::fsync(fd.get()) != 0) io_fail("cannot sync", temp);
  }
  if (hook_) hook_(WriteStep::kObjectSynced);
  if (::rename(temp.c_str(), target.c_str()) != 0) io_fail("cannot rename", temp);
  sync_dir(root_ / "objects");
}

std::vector<int64_t> Catalog::commit(const Snapshot& base,
                                     const std::vector<std::pair<std::string, ModelPipeline>>& updates) {
  if (updates.empty()) return {};
  std::set<std::string> names;
  std::vector<std::string> documents;
  for (const auto& [name, model] : updates) {
    if (!valid_name(name)) throw Error(ErrorCode::kValidationError, "invalid model name '" + name + "'");
    if (!names.insert(name).second) {
      throw Error(ErrorCode::kValidationError, "model '" + name + "' appears twice in one transaction");
    }
    ModelPipeline stored = model;
    stored.name = name;
    validate_model(stored);
    documents.push_back(save_model(stored));
  }

  std::lock_guard<std::mutex> guard(commit_mu_);
  FileLock lock(lock_fd_);
  catch_up();
  const auto current = state();
  for (const auto& name : names) {
    auto now = current->snapshot.versions.find(name);
    auto then = base.versions.find(name);
    const int64_t now_v = now == current->snapshot.versions.end() ? 0 : now->second;
    const int64_t then_v = then == base.versions.end() ? 0 : then->second;
    if (now_v != then_v) {
      throw Error(ErrorCode::kConflict, "model '" + name + "' changed since the transaction began (version " +
                                            std::to_string(then_v) + " -> " + std::to_string(now_v) + ")");
    }
  }

  Record r;
  r.txid = current->snapshot.txid + 1;
  r.ts = now_ms();
  std::string line = std::to_string(r.txid);
  std::vector<int64_t> versions;
  for (size_t i = 0; i < updates.size(); ++i) {
    const std::string& name = updates[i].first;
    auto it = current->snapshot.versions.find(name);
    const int64_t v = (it == current->snapshot.versions.end() ? 0 : it->second) + 1;
    const std::string digest = sha256_hex(documents[i]);
    write_object(digest, documents[i]);
    line += " " + name + ":" + std::to_string(v) + ":" + digest;
    versions.push_back(v);
  }
  line += " ts=" + std::to_string(r.ts) + "\n";

  const fs::path log = root_ / "log";
  // Drops the tail of a commit that failed part-way through.
  if (fs::file_size(log) > log_offset_ && ::truncate(log.c_str(), static_cast<off_t>(log_offset_)) != 0) {
    io_fail("cannot truncate", log);
  }
  {
    Fd fd(::open(log.c_str(), O_WRONLY | O_APPEND | O_CLOEXEC));
    if (fd.get() < 0) io_fail("cannot open", log);
    const size_t half = line.size() / 2;
    write_all(fd.get(), line.data(), half, log);
    if (hook_) hook_(WriteStep::kLogPartial);
    write_all(fd.get(), line.data() + half, line.size() - half, log);
    if (hook_) hook_(WriteStep::kLogWritten);
    if (::fsync(fd.get()) != 0) io_fail("cannot sync", log);
  }
  if (hook_) hook_(WriteStep::kLogSynced);
  catch_up();
  return versions;
}

int64_t Catalog::register_model(const std::string& name, const ModelPipeline& model) {
  return transact({{name, model}}).front();
}

std::vector<int64_t> Catalog::transact(const std::vector<std::pair<std::string, ModelPipeline>>& updates) {
  for (;;) {
    {
      std::lock_guard<std::mutex> guard(commit_mu_);
      FileLock lock(lock_fd_);
      catch_up();
    }
    Transaction tx = begin();
    for (const auto& [name, model] : updates) tx.put(name, model);
    try {
      return tx.commit();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kConflict) throw;
    }
  }
}

ModelPipeline Catalog::get(const std::string& name, std::optional<int64_t> version) const {
  const auto s = state();
  auto it = s->entries.find(name);
  if (it == s->entries.end()) throw Error(ErrorCode::kUnknownModel, "unknown model '" + name + "'");
  const auto& versions = it->second;
  if (version && (*version < 1 || *version > static_cast<int64_t>(versions.size()))) {
    throw Error(ErrorCode::kUnknownVersion, "model '" + name + "' has no version " + std::to_string(*version));
  }
  const CatalogEntry& e = version ? versions[*version - 1] : versions.back();
  const fs::path path = root_ / "objects" / e.digest;
  if (!fs::exists(path)) {
    throw Error(ErrorCode::kDigestMismatch, "object " + e.digest + " for " + name + "@" +
                                                std::to_string(e.version) + " is missing");
  }
  const std::string doc = read_file(path);
  if (sha256_hex(doc) != e.digest) {
    throw Error(ErrorCode::kDigestMismatch,
                "object for " + name + "@" + std::to_string(e.version) + " does not match its digest");
  }
  return load_model(doc);
}

std::vector<CatalogEntry> Catalog::history(const std::string& name) const {
  const auto s = state();
  auto it = s->entries.find(name);
  if (it == s->entries.end()) throw Error(ErrorCode::kUnknownModel, "unknown model '" + name + "'");
  return it->second;
}

Snapshot Catalog::snapshot() const { return state()->snapshot; }

Transaction Catalog::begin() const { return Transaction(const_cast<Catalog*>(this), snapshot()); }

ResolvedModel Catalog::resolve(const std::string& name, std::optional<int64_t> version) const {
  auto model = std::make_shared<const ModelPipeline>(get(name, version));
  const int64_t v = version ? *version : state()->snapshot.versions.at(name);
  return ResolvedModel{ModelRef{name, v, ""}, std::move(model)};
}

void Transaction::put(const std::string& name, const ModelPipeline& model) {
  for (const auto& u : updates_) {
    if (u.first == name) {
      throw Error(ErrorCode::kValidationError, "model '" + name + "' appears twice in one transaction");
    }
  }
  ModelPipeline stored = model;
  stored.name = name;
  validate_model(stored);
  updates_.emplace_back(name, std::move(stored));
}

std::vector<int64_t> Transaction::commit() {
  auto versions = catalog_->commit(base_, updates_);
  updates_.clear();
  return versions;
}

std::vector<std::pair<std::string, ModelPipeline>> load_manifest(const fs::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("updates") || !doc["updates"].is_array()) {
    throw Error(ErrorCode::kValidationError, path.string() + ": expected an object with an 'updates' array");
  }
  std::vector<std::pair<std::string, ModelPipeline>> out;
  for (const auto& u : doc["updates"]) {
    if (!u.is_object() || !u.contains("name") || !u["name"].is_string() || !u.contains("file") ||
        !u["file"].is_string()) {
      throw Error(ErrorCode::kValidationError, path.string() + ": each update needs string 'name' and 'file'");
    }
    fs::path file = u["file"].get<std::string>();
    if (file.is_relative()) file = path.parent_path() / file;
    out.emplace_back(u["name"].get<std::string>(), load_model_file(file));
  }
  return out;
}

}  // namespace inferq
