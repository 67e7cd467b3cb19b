#pragma once

#include <memory>
#include <string>
#include <thread>

#include "a4f/api/service.hpp"

namespace a4f {

/// Serves a Service over HTTP/1.1.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds to `host:port`; port 0 picks a free one. Returns the bound port.
  /// Throws std::runtime_error when binding fails.
  int bind(const std::string& host, int port);
  /// Serves until stop(); blocks the caller.
  void listen();
  /// Serves on a background thread.
  void start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
};

}  // namespace a4f
