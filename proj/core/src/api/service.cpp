#include "a4f/api/service.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <thread>

#include "a4f/challenge/challenge.hpp"
#include "a4f/finder/instance.hpp"

namespace a4f {

using nlohmann::json;

namespace {

int env_int(const char* name, int fallback) {
  const char* v = std::getenv(name);
  if (!v || !*v) return fallback;
  char* end = nullptr;
  long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n <= 0 || n > 1'000'000'000) {
    throw std::invalid_argument(std::string(name) + " must be a positive integer");
  }
  return static_cast<int>(n);
}

HttpResponse json_response(int status, const json& body) { return {status, body.dump(), {}}; }

HttpResponse error(int status, std::string_view code, const std::string& message) {
  return json_response(status, {{"error", code}, {"message", message}});
}

json position_json(std::string_view text, Span span) {
  LineCol lc = line_col(text, span.begin);
  return {{"offset", span.begin}, {"line", lc.line}, {"column", lc.column}};
}

// Wire codes are PascalCase throughout; the language layer names its codes
// in snake_case.
std::string pascal_case(std::string_view snake) {
  std::string out;
  bool upper = true;
  for (char c : snake) {
    if (c == '_') {
      upper = true;
    } else {
      out += upper ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : c;
      upper = false;
    }
  }
  return out;
}

HttpResponse lang_error(const LangError& e, std::string_view text) {
  int status = e.code() == LangErrorCode::CodeTooLarge ? 413 : 400;
  json body = {{"error", pascal_case(to_string(e.code()))}, {"message", e.what()}};
  if (e.code() != LangErrorCode::CodeTooLarge) body["position"] = position_json(text, e.span());
  return json_response(status, body);
}

HttpResponse repo_error(const RepoError& e) {
  int status = 400;
  if (e.code() == RepoErrorCode::NotFound) status = 404;
  if (e.code() == RepoErrorCode::Forbidden) status = 403;
  return error(status, to_string(e.code()), e.what());
}

std::vector<std::string> segments(const std::string& path) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < path.size()) {
    std::size_t j = path.find('/', i);
    if (j == std::string::npos) j = path.size();
    if (j > i) out.push_back(path.substr(i, j - i));
    i = j + 1;
  }
  return out;
}

// Parses a JSON object body; nullopt when it is not one.
std::optional<json> object_body(const std::string& body) {
  json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return std::nullopt;
  return doc;
}

std::optional<std::string> string_member(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_string()) return std::nullopt;
  return doc[key].get<std::string>();
}

}  // namespace

ServiceConfig ServiceConfig::from_env() {
  ServiceConfig c;
  c.port = env_int("A4F_PORT", c.port);
  if (const char* store = std::getenv("A4F_STORE")) c.store_path = store;
  c.solve_timeout = std::chrono::milliseconds(env_int("A4F_TIMEOUT_MS", static_cast<int>(c.solve_timeout.count())));
  c.max_scope = env_int("A4F_MAX_SCOPE", c.max_scope);
  c.validate();
  return c;
}

void ServiceConfig::validate() const {
  if (port < 0 || port > 65535) throw std::invalid_argument("port out of range");
  if (solve_timeout.count() <= 0) throw std::invalid_argument("solve timeout must be positive");
  if (max_scope <= 0 || max_scope > kHardMaxScope) {
    throw std::invalid_argument("max scope must be between 1 and " + std::to_string(kHardMaxScope));
  }
  if (max_code_bytes == 0) throw std::invalid_argument("max code bytes must be positive");
  if (executes_per_minute <= 0) throw std::invalid_argument("rate limit must be positive");
  if (queue_timeout.count() <= 0) throw std::invalid_argument("queue timeout must be positive");
}

bool FifoGate::acquire(std::chrono::steady_clock::time_point deadline) {
  std::unique_lock lock(mutex_);
  const std::uint64_t ticket = next_ticket_++;
  queue_.push_back(ticket);
  bool turn = cv_.wait_until(lock, deadline, [&] { return queue_.front() == ticket && active_ < slots_; });
  queue_.erase(std::find(queue_.begin(), queue_.end(), ticket));
  if (turn) ++active_;
  cv_.notify_all();
  return turn;
}

void FifoGate::release() {
  std::lock_guard lock(mutex_);
  --active_;
  cv_.notify_all();
}

bool RateLimiter::admit(const std::string& client) {
  std::lock_guard lock(mutex_);
  auto now = clock_();
  auto& q = seen_[client];
  while (!q.empty() && now - q.front() >= std::chrono::minutes(1)) q.pop_front();
  if (static_cast<int>(q.size()) >= per_minute_) return false;
  q.push_back(now);
  return true;
}

std::shared_ptr<Store> open_store(const ServiceConfig& config) {
  if (config.store_path.empty()) return std::make_shared<MemoryStore>();
  return std::make_shared<FileStore>(config.store_path);
}

Service::Service(ServiceConfig config, std::shared_ptr<Store> store, RepositoryOptions repo_options,
                 RateLimiter::Clock rate_clock)
    : config_((config.validate(), std::move(config))),
      repo_(std::move(store), [&] {
        repo_options.parse.max_bytes = config_.max_code_bytes;
        return std::move(repo_options);
      }()),
      limiter_(config_.executes_per_minute, std::move(rate_clock)),
      solvers_(config_.solver_slots ? config_.solver_slots : std::max(1U, std::thread::hardware_concurrency())) {}

HttpResponse Service::handle(const HttpRequest& request) {
  HttpResponse response;
  try {
    auto parts = segments(request.path);
    const std::string& m = request.method;
    if (m == "OPTIONS") {
      response = {204, "", {}};
    } else if (parts == std::vector<std::string>{"healthz"} && m == "GET") {
      response = health();
    } else if (parts.size() >= 2 && parts[0] == "api" && parts[1] == "models") {
      if (parts.size() == 2 && m == "POST") response = share(request);
      else if (parts.size() == 3 && m == "GET") response = open(parts[2]);
      else if (parts.size() == 4 && parts[3] == "execute" && m == "POST") response = execute(request, parts[2]);
      else if (parts.size() == 4 && parts[3] == "tree" && m == "GET") response = tree(parts[2]);
      else response = error(404, "NotFound", "no such endpoint");
    } else if (parts.size() >= 2 && parts[0] == "api" && parts[1] == "instances") {
      if (parts.size() == 2 && m == "POST") response = share_instance(request);
      else if (parts.size() == 3 && m == "GET") response = open_instance(parts[2]);
      else response = error(404, "NotFound", "no such endpoint");
    } else {
      response = error(404, "NotFound", "no such endpoint");
    }
  } catch (const std::exception& e) {
    response = error(500, "InternalError", e.what());
  }

  if (!response.body.empty()) response.headers["Content-Type"] = "application/json";
  const auto& allowed = config_.cors_allowed_origins;
  if (std::find(allowed.begin(), allowed.end(), "*") != allowed.end()) {
    response.headers["Access-Control-Allow-Origin"] = "*";
  } else if (!request.origin.empty() && std::find(allowed.begin(), allowed.end(), request.origin) != allowed.end()) {
    response.headers["Access-Control-Allow-Origin"] = request.origin;
    response.headers["Vary"] = "Origin";
  }
  response.headers["Access-Control-Allow-Methods"] = "GET, POST, OPTIONS";
  response.headers["Access-Control-Allow-Headers"] = "Content-Type";
  return response;
}

HttpResponse Service::share(const HttpRequest& request) {
  if (request.body.size() > config_.max_code_bytes * 2 + 4096) {
    return error(413, "CodeTooLarge", "request body too large");
  }
  auto doc = object_body(request.body);
  if (!doc) return error(400, "BadRequest", "expected a JSON object");
  auto code = string_member(*doc, "code");
  if (!code) return error(400, "BadRequest", "missing string member 'code'");
  std::optional<Theme> theme;
  try {
    if (doc->contains("theme") && !(*doc)["theme"].is_null()) theme = theme_from_json((*doc)["theme"]);
    auto shared = repo_.save_shared(*code, theme);
    return json_response(201, {{"public", shared.public_token},
                               {"private", shared.private_token ? json(*shared.private_token) : json(nullptr)}});
  } catch (const LangError& e) {
    return lang_error(e, *code);
  } catch (const std::invalid_argument& e) {
    return error(400, "BadRequest", e.what());
  }
}

HttpResponse Service::open(const std::string& token) {
  try {
    ModelView v = repo_.load(token);
    json commands = json::array();
    for (const auto& c : v.command_index) {
      commands.push_back({{"name", c.name}, {"kind", c.kind == CommandKind::Check ? "check" : "run"},
                          {"secret", c.secret}});
    }
    return json_response(200, {{"code", v.code},
                               {"commandIndex", commands},
                               {"theme", v.theme ? *v.theme : json(nullptr)},
                               {"hasSecrets", v.has_secrets},
                               {"visibility", to_string(v.visibility)}});
  } catch (const RepoError& e) {
    return repo_error(e);
  }
}

HttpResponse Service::execute(const HttpRequest& request, const std::string& token) {
  // Rejected calls are not recorded, so a flood cannot bloat the tree.
  if (!limiter_.admit(request.remote_addr)) {
    return error(429, "RateLimited", "too many executions from this address; try again in a minute");
  }
  auto doc = object_body(request.body);
  if (!doc) return error(400, "BadRequest", "expected a JSON object");
  auto code = string_member(*doc, "code");
  auto command = string_member(*doc, "command");
  if (!code || !command) return error(400, "BadRequest", "members 'code' and 'command' must be strings");
  std::uint64_t skip = 0;
  if (doc->contains("skip") && !(*doc)["skip"].is_null()) {
    if (!(*doc)["skip"].is_number_unsigned()) return error(400, "BadRequest", "'skip' must be a non-negative integer");
    skip = (*doc)["skip"].get<std::uint64_t>();
  }
  std::string parent;
  if (doc->contains("parent") && !(*doc)["parent"].is_null()) {
    if (!(*doc)["parent"].is_string()) return error(400, "BadRequest", "'parent' must be a string");
    parent = (*doc)["parent"].get<std::string>();
  }

  auto link = repo_.link(token);
  if (!link) return error(404, "NotFound", "no model for this link");
  try {
    parent = repo_.resolve_parent(token, parent);
  } catch (const RepoError& e) {
    return repo_error(e);
  }
  auto stored = repo_.model(link->model_id);
  if (!stored) return error(404, "NotFound", "the linked model is missing");

  auto record = [&](std::string_view result) {
    return repo_.record_execution(token, parent, *code, *command, std::string(result));
  };
  if (code->size() > config_.max_code_bytes) {
    record("error");
    return error(413, "CodeTooLarge", "code exceeds " + std::to_string(config_.max_code_bytes) + " bytes");
  }

  if (!solvers_.acquire(std::chrono::steady_clock::now() + config_.queue_timeout)) {
    record("limit");
    return error(503, "QueueTimeout", "the solver queue is full; try again later");
  }
  struct Release {
    FifoGate& gate;
    ~Release() { gate.release(); }
  } release{solvers_};

  FinderOptions options;
  options.budget.timeout = config_.solve_timeout;
  options.max_scope = config_.max_scope;
  ParseOptions parse_options;
  parse_options.max_bytes = config_.max_code_bytes;
  const Access access = link->visibility == Visibility::Private ? Access::Private : Access::Public;
  try {
    GradeResult g = execute_on_view(split(stored->code), *code, access, *command, skip, options, parse_options);
    std::string result(to_string(g.outcome()));
    json body = {{"result", result},
                 {"verdict", to_string(g.verdict)},
                 {"command", g.command},
                 {"modelId", record(result)}};
    if (g.instance) body["instance"] = to_json(*g.instance);
    if (!g.message.empty()) body["message"] = g.message;
    if (g.position) body["position"] = position_json(*code, *g.position);
    return json_response(200, body);
  } catch (const LangError& e) {
    std::string id = record("error");
    HttpResponse r = lang_error(e, *code);
    json body = json::parse(r.body);
    body["modelId"] = id;
    r.body = body.dump();
    return r;
  } catch (const ChallengeError& e) {
    std::string id = record("error");
    int status = e.code() == ChallengeErrorCode::SecretNameClash ? 422 : 400;
    return json_response(status, {{"error", to_string(e.code())}, {"message", e.what()}, {"modelId", id}});
  }
}

HttpResponse Service::tree(const std::string& token) {
  try {
    return json_response(200, repo_.export_tree(token));
  } catch (const RepoError& e) {
    return repo_error(e);
  }
}

HttpResponse Service::share_instance(const HttpRequest& request) {
  auto doc = object_body(request.body);
  if (!doc) return error(400, "BadRequest", "expected a JSON object");
  auto model = string_member(*doc, "model");
  auto command = string_member(*doc, "command");
  if (!model || !command || !doc->contains("instance")) {
    return error(400, "BadRequest", "members 'model', 'command' and 'instance' are required");
  }
  InstanceRecord r;
  // A link token stands for the model it points to.
  auto link = repo_.link(*model);
  r.model_id = link ? link->model_id : *model;
  r.command = *command;
  if (doc->contains("skip")) {
    if (!(*doc)["skip"].is_number_unsigned()) return error(400, "BadRequest", "'skip' must be a non-negative integer");
    r.skip = (*doc)["skip"].get<std::uint64_t>();
  }
  r.instance = (*doc)["instance"];
  r.theme = doc->value("theme", json::object());
  r.layout = doc->value("layout", json::object());
  try {
    return json_response(201, {{"token", repo_.save_instance(std::move(r))}});
  } catch (const RepoError& e) {
    return repo_error(e);
  } catch (const std::invalid_argument& e) {
    return error(400, "BadRequest", e.what());
  }
}

HttpResponse Service::open_instance(const std::string& token) {
  try {
    return json_response(200, repo_.load_instance(token).document());
  } catch (const RepoError& e) {
    return repo_error(e);
  }
}

HttpResponse Service::health() {
  StoreHealth h = repo_.health();
  if (!h.ok) return error(500, "StoreUnhealthy", h.detail);
  return json_response(200, {{"status", "ok"}});
}

}  // namespace a4f
