#include "a4f/repo/store.hpp"

#include <fstream>
#include <stdexcept>

namespace a4f {

using nlohmann::json;

bool MemoryStore::insert(const std::string& kind, const std::string& key, const json& value) {
  std::unique_lock lock(mutex_);
  return insert_locked(kind, key, value);
}

bool MemoryStore::insert_locked(const std::string& kind, const std::string& key, const json& value) {
  Table& t = tables_[kind];
  if (!t.index.emplace(key, t.rows.size()).second) return false;
  t.rows.emplace_back(key, value);
  return true;
}

bool MemoryStore::contains_locked(const std::string& kind, const std::string& key) const {
  auto t = tables_.find(kind);
  return t != tables_.end() && t->second.index.count(key) > 0;
}

std::optional<json> MemoryStore::get(const std::string& kind, const std::string& key) const {
  std::shared_lock lock(mutex_);
  auto t = tables_.find(kind);
  if (t == tables_.end()) return std::nullopt;
  auto it = t->second.index.find(key);
  if (it == t->second.index.end()) return std::nullopt;
  return std::optional<json>(std::in_place, t->second.rows[it->second].second);
}

void MemoryStore::for_each(const std::string& kind,
                           const std::function<void(const std::string&, const json&)>& fn) const {
  std::shared_lock lock(mutex_);
  auto t = tables_.find(kind);
  if (t == tables_.end()) return;
  for (const auto& [key, value] : t->second.rows) fn(key, value);
}

FileStore::FileStore(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  {
    std::ifstream in(path_);
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
      if (line.empty()) continue;
      json entry = json::parse(line, nullptr, false);
      bool ok = !entry.is_discarded() && entry.is_object() && entry.contains("kind") && entry["kind"].is_string() &&
                entry.contains("key") && entry["key"].is_string() && entry.contains("value");
      if (ok) ok = insert_locked(entry["kind"].get<std::string>(), entry["key"].get<std::string>(), entry["value"]);
      if (!ok) {
        if (corrupt_lines_++ == 0) first_corrupt_line_ = n;
      }
    }
  }
  out_ = std::fopen(path_.c_str(), "ab");
  if (!out_) throw std::runtime_error("cannot open store " + path_.string() + " for appending");
  // Start on a fresh line after a torn final write.
  std::ifstream tail(path_, std::ios::binary | std::ios::ate);
  if (tail && tail.tellg() > 0) {
    tail.seekg(-1, std::ios::end);
    if (tail.get() != '\n') std::fputc('\n', out_);
  }
}

FileStore::~FileStore() {
  if (out_) std::fclose(out_);
}

bool FileStore::insert(const std::string& kind, const std::string& key, const json& value) {
  std::unique_lock lock(mutex_);
  if (contains_locked(kind, key)) return false;
  std::string line = json{{"kind", kind}, {"key", key}, {"value", value}}.dump() + "\n";
  // The log is written before the index so a failed write leaves no record
  // that a restart would lose.
  if (std::fwrite(line.data(), 1, line.size(), out_) != line.size() || std::fflush(out_) != 0) {
    write_failed_ = true;
    throw std::runtime_error("cannot append to store " + path_.string());
  }
  return insert_locked(kind, key, value);
}

StoreHealth FileStore::health() const {
  std::shared_lock lock(mutex_);
  if (write_failed_) return {false, "writes to " + path_.string() + " have failed"};
  if (corrupt_lines_ > 0) {
    return {false, std::to_string(corrupt_lines_) + " unreadable line(s) in " + path_.string() + ", first at line " +
                       std::to_string(first_corrupt_line_)};
  }
  if (!std::filesystem::exists(path_)) return {false, path_.string() + " has disappeared"};
  return {};
}

}  // namespace a4f
