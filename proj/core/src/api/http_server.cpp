#include "a4f/api/http_server.hpp"

#include <httplib.h>

#include <stdexcept>

namespace a4f {

namespace {

// Solves block their worker thread while they wait at the FIFO gate, so the
// pool is sized well past the solver slots to keep health checks and reads
// responsive under load.
constexpr std::size_t kWorkerThreads = 64;

}  // namespace

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>()) {
  auto& s = impl_->server;
  s.new_task_queue = [] { return new httplib::ThreadPool(kWorkerThreads); };
  s.set_payload_max_length(service.config().max_code_bytes * 4 + 64 * 1024);
  auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
    HttpRequest request{req.method, req.path, req.body, req.remote_addr, req.get_header_value("Origin")};
    HttpResponse response = service.handle(request);
    res.status = response.status;
    for (const auto& [name, value] : response.headers) {
      if (name != "Content-Type") res.set_header(name, value);
    }
    if (!response.body.empty()) {
      auto type = response.headers.find("Content-Type");
      res.set_content(response.body, type == response.headers.end() ? "text/plain" : type->second);
    }
  };
  // Routing lives in Service; every path goes through it.
  s.Get(".*", forward);
  s.Post(".*", forward);
  s.Put(".*", forward);
  s.Delete(".*", forward);
  s.Options(".*", forward);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  auto& s = impl_->server;
  if (port == 0) {
    int bound = s.bind_to_any_port(host);
    if (bound < 0) throw std::runtime_error("cannot bind " + host);
    return bound;
  }
  if (!s.bind_to_port(host, port)) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::start() {
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void HttpServer::stop() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace a4f
