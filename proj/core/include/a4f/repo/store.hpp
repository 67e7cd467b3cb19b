#pragma once

#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace a4f {

struct StoreHealth {
  bool ok = true;
  std::string detail;
};

/// Append-only key-value store. Records are grouped by kind ("model",
/// "link", ...), written once and never changed.
class Store {
 public:
  virtual ~Store() = default;

  /// Adds a record; false when the kind already has that key.
  virtual bool insert(const std::string& kind, const std::string& key, const nlohmann::json& value) = 0;
  [[nodiscard]] virtual std::optional<nlohmann::json> get(const std::string& kind, const std::string& key) const = 0;
  /// Records of one kind in insertion order.
  virtual void for_each(const std::string& kind,
                        const std::function<void(const std::string&, const nlohmann::json&)>& fn) const = 0;
  [[nodiscard]] virtual StoreHealth health() const = 0;
};

/// In-memory store, for tests and throwaway servers.
class MemoryStore : public Store {
 public:
  bool insert(const std::string& kind, const std::string& key, const nlohmann::json& value) override;
  [[nodiscard]] std::optional<nlohmann::json> get(const std::string& kind, const std::string& key) const override;
  void for_each(const std::string& kind,
                const std::function<void(const std::string&, const nlohmann::json&)>& fn) const override;
  [[nodiscard]] StoreHealth health() const override { return {}; }

 protected:
  /// Inserts under the caller's lock; false on a duplicate key.
  bool insert_locked(const std::string& kind, const std::string& key, const nlohmann::json& value);
  [[nodiscard]] bool contains_locked(const std::string& kind, const std::string& key) const;

  mutable std::shared_mutex mutex_;

 private:
  struct Table {
    std::map<std::string, std::size_t> index;
    std::vector<std::pair<std::string, nlohmann::json>> rows;
  };
  std::map<std::string, Table> tables_;
};

/// A MemoryStore backed by a JSON-lines log, one `{"kind", "key", "value"}`
/// object per line. The log is replayed on open; lines that do not parse are
/// skipped and reported through health().
class FileStore : public MemoryStore {
 public:
  explicit FileStore(std::filesystem::path path);
  ~FileStore() override;
  FileStore(const FileStore&) = delete;
  FileStore& operator=(const FileStore&) = delete;

  bool insert(const std::string& kind, const std::string& key, const nlohmann::json& value) override;
  [[nodiscard]] StoreHealth health() const override;

  [[nodiscard]] const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::FILE* out_ = nullptr;
  std::size_t corrupt_lines_ = 0;
  std::size_t first_corrupt_line_ = 0;
  bool write_failed_ = false;
};

}  // namespace a4f
