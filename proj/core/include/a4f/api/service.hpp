#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "a4f/repo/repository.hpp"

namespace a4f {

struct ServiceConfig {
  int port = 8080;
  /// JSON-lines store; empty keeps everything in memory.
  std::string store_path = "a4f-store.jsonl";
  std::chrono::milliseconds solve_timeout{10'000};
  int max_scope = kDefaultMaxScope;
  std::size_t max_code_bytes = 64 * 1024;
  /// `*` allows any origin.
  std::vector<std::string> cors_allowed_origins{"*"};
  int executes_per_minute = 30;
  /// Concurrent solves; 0 means one per hardware thread.
  std::size_t solver_slots = 0;
  std::chrono::milliseconds queue_timeout{30'000};

  /// Defaults overridden by A4F_PORT, A4F_STORE, A4F_TIMEOUT_MS and
  /// A4F_MAX_SCOPE. Throws std::invalid_argument on unusable values.
  static ServiceConfig from_env();
  /// Throws std::invalid_argument unless every limit is positive and
  /// max_scope is within the hard cap.
  void validate() const;
};

struct HttpRequest {
  std::string method;
  std::string path;
  std::string body;
  std::string remote_addr;
  std::string origin;
};

struct HttpResponse {
  int status = 200;
  std::string body;
  std::map<std::string, std::string> headers;
};

/// Admits at most `slots` holders at a time, strictly in arrival order.
class FifoGate {
 public:
  explicit FifoGate(std::size_t slots) : slots_(slots) {}

  /// False when the deadline passes before this caller's turn.
  bool acquire(std::chrono::steady_clock::time_point deadline);
  void release();

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  std::size_t slots_;
  std::size_t active_ = 0;
  std::uint64_t next_ticket_ = 0;
  std::deque<std::uint64_t> queue_;
};

/// Sliding one-minute window of requests per client address.
class RateLimiter {
 public:
  using Clock = std::function<std::chrono::steady_clock::time_point()>;

  explicit RateLimiter(int per_minute, Clock clock = [] { return std::chrono::steady_clock::now(); })
      : per_minute_(per_minute), clock_(std::move(clock)) {}

  /// Counts the request and tells whether it is within the limit.
  bool admit(const std::string& client);

 private:
  std::mutex mutex_;
  int per_minute_;
  Clock clock_;
  std::map<std::string, std::deque<std::chrono::steady_clock::time_point>> seen_;
};

/// The HTTP API as a plain request handler, independent of any server.
///
/// Endpoints:
///   POST /api/models                 share a model
///   GET  /api/models/{token}         open a link
///   POST /api/models/{token}/execute run a command and record it
///   GET  /api/models/{token}/tree    derivation tree (private link only)
///   POST /api/instances              share an instance
///   GET  /api/instances/{token}      open a shared instance
///   GET  /healthz                    store health
///
/// Errors come back as `{"error": code, "message": text, "position"?}`.
class Service {
 public:
  Service(ServiceConfig config, std::shared_ptr<Store> store, RepositoryOptions repo_options = {},
          RateLimiter::Clock rate_clock = [] { return std::chrono::steady_clock::now(); });

  /// Thread-safe.
  HttpResponse handle(const HttpRequest& request);

  [[nodiscard]] const ServiceConfig& config() const { return config_; }
  [[nodiscard]] Repository& repository() { return repo_; }

 private:
  HttpResponse share(const HttpRequest& request);
  HttpResponse open(const std::string& token);
  HttpResponse execute(const HttpRequest& request, const std::string& token);
  HttpResponse tree(const std::string& token);
  HttpResponse share_instance(const HttpRequest& request);
  HttpResponse open_instance(const std::string& token);
  HttpResponse health();

  ServiceConfig config_;
  Repository repo_;
  RateLimiter limiter_;
  FifoGate solvers_;
};

/// Opens the configured store: a FileStore, or a MemoryStore for an empty path.
std::shared_ptr<Store> open_store(const ServiceConfig& config);

}  // namespace a4f
