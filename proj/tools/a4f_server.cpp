// HTTP service for sharing, executing and grading models.

#include <CLI11.hpp>

#include <csignal>
#include <iostream>

#include "a4f/api/http_server.hpp"

int main(int argc, char** argv) {
  a4f::ServiceConfig config;
  try {
    config = a4f::ServiceConfig::from_env();
  } catch (const std::exception& e) {
    std::cerr << "a4f-server: " << e.what() << "\n";
    return 2;
  }

  CLI::App app{"Serve the model sharing and grading API"};
  std::string host = "0.0.0.0";
  int timeout_ms = static_cast<int>(config.solve_timeout.count());
  int queue_ms = static_cast<int>(config.queue_timeout.count());
  app.add_option("--host", host, "Address to bind")->capture_default_str();
  app.add_option("--port", config.port, "Port to listen on (A4F_PORT)")->capture_default_str();
  app.add_option("--store", config.store_path, "JSON-lines store file, empty for memory only (A4F_STORE)")
      ->capture_default_str();
  app.add_option("--timeout-ms", timeout_ms, "Solve timeout per execution (A4F_TIMEOUT_MS)")->capture_default_str();
  app.add_option("--max-scope", config.max_scope, "Largest scope a command may ask for (A4F_MAX_SCOPE)")
      ->capture_default_str();
  app.add_option("--max-code-bytes", config.max_code_bytes, "Largest accepted model text")->capture_default_str();
  app.add_option("--rate-limit", config.executes_per_minute, "Executions per minute per client address")
      ->capture_default_str();
  app.add_option("--solver-slots", config.solver_slots, "Concurrent solves, 0 for one per hardware thread")
      ->capture_default_str();
  app.add_option("--queue-timeout-ms", queue_ms, "How long an execution may wait for a solver slot")
      ->capture_default_str();
  app.add_option("--cors-origin", config.cors_allowed_origins, "Allowed CORS origin, repeatable; * for any");
  CLI11_PARSE(app, argc, argv);
  config.solve_timeout = std::chrono::milliseconds(timeout_ms);
  config.queue_timeout = std::chrono::milliseconds(queue_ms);

  // Handle shutdown signals synchronously on the main thread.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  try {
    config.validate();
    a4f::Service service(config, a4f::open_store(config));
    auto health = service.repository().health();
    if (!health.ok) std::cerr << "a4f-server: store warning: " << health.detail << "\n";
    a4f::HttpServer server(service);
    int port = server.bind(host, config.port);
    server.start();
    std::cerr << "a4f-server: listening on " << host << ":" << port << "\n";
    int sig = 0;
    sigwait(&signals, &sig);
    std::cerr << "a4f-server: shutting down\n";
    server.stop();
  } catch (const std::exception& e) {
    std::cerr << "a4f-server: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
