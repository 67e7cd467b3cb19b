#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "a4f/challenge/challenge.hpp"
#include "a4f/lang/parser.hpp"
#include "a4f/repo/store.hpp"
#include "a4f/repo/theme.hpp"

namespace a4f {

inline constexpr std::size_t kTokenLength = 11;

/// Random URL-safe token of kTokenLength characters from [0-9A-Za-z], drawn
/// from the operating system's cryptographic generator.
std::string random_token();

/// UTC time as `YYYY-MM-DDTHH:MM:SS.mmmZ`.
std::string iso8601(std::chrono::system_clock::time_point t);

enum class Visibility { Public, Private };

std::string_view to_string(Visibility v);

/// One stored version of a model: a shared root or an executed derivation.
struct ModelRecord {
  std::string id;
  std::optional<std::string> parent;
  /// Id of the shared model this record derives from (its own id for a root).
  std::string root;
  std::string time;
  std::string code;
  std::optional<std::string> command;
  std::optional<std::string> result;  // sat, unsat, error or limit
  std::optional<nlohmann::json> theme;

  friend bool operator==(const ModelRecord&, const ModelRecord&) = default;
};

struct LinkRecord {
  std::string token;
  std::string model_id;
  Visibility visibility = Visibility::Public;
};

struct InstanceRecord {
  std::string token;
  std::string model_id;
  std::string command;
  std::uint64_t skip = 0;
  nlohmann::json instance;
  nlohmann::json theme;
  nlohmann::json layout;

  /// The stored document, without the token.
  [[nodiscard]] nlohmann::json document() const;
};

/// What a link holder gets to see.
struct ModelView {
  std::string model_id;
  Visibility visibility = Visibility::Public;
  /// Full text for the private link, public view otherwise.
  std::string code;
  std::vector<CommandEntry> command_index;
  std::optional<nlohmann::json> theme;
  bool has_secrets = false;
};

enum class RepoErrorCode { NotFound, Forbidden, InvalidArgument };

std::string_view to_string(RepoErrorCode code);

class RepoError : public std::runtime_error {
 public:
  RepoError(RepoErrorCode code, std::string message) : std::runtime_error(std::move(message)), code_(code) {}
  [[nodiscard]] RepoErrorCode code() const { return code_; }

 private:
  RepoErrorCode code_;
};

struct RepositoryOptions {
  std::function<std::chrono::system_clock::time_point()> clock = [] { return std::chrono::system_clock::now(); };
  std::function<std::string()> tokens = random_token;
  ParseOptions parse;
};

/// Models, links, executions and shared instances on top of a Store.
///
/// Record ids and tokens share one namespace and are unique across it.
/// Thread-safe: writes are serialized, reads run concurrently.
class Repository {
 public:
  explicit Repository(std::shared_ptr<Store> store, RepositoryOptions options = {});

  struct Shared {
    std::string model_id;
    std::string public_token;
    std::optional<std::string> private_token;  // iff the code has secrets
  };

  /// Stores a new root model. Throws LangError when the code does not parse
  /// and std::invalid_argument for a theme projecting unknown sigs.
  Shared save_shared(const std::string& code, const std::optional<Theme>& theme = std::nullopt);

  /// Throws RepoError(NotFound).
  [[nodiscard]] ModelView load(const std::string& token) const;

  [[nodiscard]] std::optional<LinkRecord> link(const std::string& token) const;
  [[nodiscard]] std::optional<ModelRecord> model(const std::string& id) const;

  /// Record id that `parent` denotes for an execution through `link_token`:
  /// a record id or link token of the same tree, or the link's model when
  /// empty. Throws RepoError (NotFound, InvalidArgument for another tree).
  [[nodiscard]] std::string resolve_parent(const std::string& link_token, const std::string& parent) const;

  /// Appends an execution under `parent`, a record id or a link token of the
  /// same tree; empty means the model `link_token` points to. The child's
  /// time never precedes its parent's. Throws RepoError.
  std::string record_execution(const std::string& link_token, const std::string& parent, const std::string& code,
                               const std::string& command, const std::string& result);

  /// `{"root", "nodes": [{"id", "parent", "time", "code", "command",
  /// "result"}]}` with nodes in ascending time order. Only the private link
  /// may export; a public token raises RepoError(Forbidden).
  [[nodiscard]] nlohmann::json export_tree(const std::string& private_token) const;

  /// Stores a shared instance; record.token is ignored and the new token
  /// returned. Throws RepoError(NotFound) for an unknown model and
  /// std::invalid_argument for a malformed instance, theme or layout.
  std::string save_instance(InstanceRecord record);
  [[nodiscard]] InstanceRecord load_instance(const std::string& token) const;

  [[nodiscard]] StoreHealth health() const { return store_->health(); }

 private:
  std::string fresh_token_locked();
  void insert_model_locked(const ModelRecord& record);

  std::shared_ptr<Store> store_;
  RepositoryOptions options_;
  mutable std::mutex write_mutex_;
  mutable std::mutex tree_mutex_;
  std::map<std::string, std::vector<std::string>> trees_;  // root -> ids in insertion order
};

}  // namespace a4f
