#include <doctest.h>
#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include "a4f/api/http_server.hpp"
#include "a4f/api/service.hpp"
#include "support/duels.hpp"
#include "support/model_gen.hpp"

using namespace a4f;
using nlohmann::json;

namespace {

const std::string kSecretful = R"(sig Node { next: set Node }
pred Inv2 { }
//SECRET
pred Spec { all n: Node | n not in n.^next }
//SECRET
check Inv2OK { Inv2 iff Spec } for 3
)";

// Pigeonhole: ten pigeons, nine holes. Unsat and far beyond any test budget.
const std::string kHeavy = R"(sig P { h: one H }
sig H {}
fact { all p, q: P | p != q implies p.h != q.h }
run Big {} for exactly 10 P, exactly 9 H
)";

const std::string kPlain = "sig A { r: set A }\nrun Show {} for 2\n";

ServiceConfig memory_config() {
  ServiceConfig c;
  c.store_path.clear();
  c.solver_slots = 2;
  c.max_scope = 10;
  return c;
}

HttpRequest post(std::string path, const json& body, std::string addr = "10.0.0.1") {
  return {"POST", std::move(path), body.dump(), std::move(addr), ""};
}

HttpRequest get(std::string path) { return {"GET", std::move(path), "", "10.0.0.1", ""}; }

json body(const HttpResponse& r) { return json::parse(r.body); }

struct Shared {
  std::string pub;
  std::string priv;
};

Shared share(Service& s, const std::string& code) {
  auto r = s.handle(post("/api/models", {{"code", code}}));
  REQUIRE(r.status == 201);
  json b = body(r);
  return {b["public"].get<std::string>(), b["private"].is_null() ? "" : b["private"].get<std::string>()};
}

json execute(Service& s, const std::string& token, const json& request, int expect = 200) {
  auto r = s.handle(post("/api/models/" + token + "/execute", request));
  CHECK(r.status == expect);
  return body(r);
}

}  // namespace

TEST_CASE("sharing returns a private link only for models with secrets") {
  Service s(memory_config(), std::make_shared<MemoryStore>());
  Shared plain = share(s, kPlain);
  CHECK(plain.pub.size() == kTokenLength);
  CHECK(plain.priv.empty());
  Shared secret = share(s, kSecretful);
  CHECK(secret.priv.size() == kTokenLength);
  CHECK(secret.priv != secret.pub);
}

TEST_CASE("opening a link shows the view its holder may see") {
  Service s(memory_config(), std::make_shared<MemoryStore>());
  Shared sh = share(s, kSecretful);

  json pub = body(s.handle(get("/api/models/" + sh.pub)));
  CHECK(pub["visibility"] == "public");
  CHECK(pub["hasSecrets"] == true);
  CHECK(pub["code"].get<std::string>().find("Spec") == std::string::npos);
  CHECK(pub["commandIndex"] == json::array({{{"name", "Inv2OK"}, {"kind", "check"}, {"secret", true}}}));
  CHECK(pub["theme"].is_null());

  json priv = body(s.handle(get("/api/models/" + sh.priv)));
  CHECK(priv["visibility"] == "private");
  CHECK(priv["code"] == kSecretful);

  auto missing = s.handle(get("/api/models/doesnotexist"));
  CHECK(missing.status == 404);
  CHECK(body(missing)["error"] == "NotFound");
}

TEST_CASE("share rejects bad input with a typed error") {
  ServiceConfig c = memory_config();
  c.max_code_bytes = 200;
  Service s(c, std::make_shared<MemoryStore>());

  auto bad = s.handle(post("/api/models", {{"code", "sig A {}\npred p { A in }\n"}}));
  CHECK(bad.status == 400);
  json b = body(bad);
  CHECK(b.contains("message"));
  CHECK(b["position"]["line"] == 2);
  CHECK(b["position"]["column"].get<int>() >= 1);
  CHECK(b["position"]["offset"].get<int>() > 9);

  auto big = s.handle(post("/api/models", {{"code", std::string(500, ' ') + "sig A {}"}}));
  CHECK(big.status == 413);
  CHECK(body(big)["error"] == "CodeTooLarge");

  CHECK(s.handle({"POST", "/api/models", "not json", "x", ""}).status == 400);
  CHECK(s.handle(post("/api/models", {{"code", 3}})).status == 400);
  auto theme = s.handle(post("/api/models", {{"code", kPlain}, {"theme", {{"projection", {"Ghost"}}}}}));
  CHECK(theme.status == 400);
  CHECK(s.handle(post("/api/models", {{"code", kPlain}, {"theme", 7}})).status == 400);
}

TEST_CASE("execute grades against the secrets and records the derivation") {
  Service s(memory_config(), std::make_shared<MemoryStore>());
  Shared sh = share(s, kSecretful);
  const std::string wrong = "sig Node { next: set Node }\npred Inv2 { no next }\n";
  const std::string right = "sig Node { next: set Node }\npred Inv2 { no iden & ^next }\n";

  json first = execute(s, sh.pub, {{"code", wrong}, {"command", "Inv2OK"}});
  CHECK(first["result"] == "sat");
  CHECK(first["verdict"] == "counterexample");
  CHECK(first.contains("instance"));
  std::string id1 = first["modelId"];

  json second = execute(s, sh.pub, {{"code", right}, {"command", "Inv2OK"}, {"parent", id1}});
  CHECK(second["result"] == "unsat");
  CHECK(second["verdict"] == "solved");
  CHECK_FALSE(second.contains("instance"));

  json broken = execute(s, sh.pub, {{"code", "sig Node {\n"}, {"command", "Inv2OK"}, {"parent", id1}}, 400);
  CHECK(broken["position"]["line"] == 2);
  CHECK(broken.contains("modelId"));

  json unknown = execute(s, sh.pub, {{"code", right}, {"command", "Nope"}}, 400);
  CHECK(unknown["error"] == "UnknownCommand");

  json clash = execute(s, sh.pub, {{"code", right + "pred Spec { }\n"}, {"command", "Inv2OK"}}, 422);
  CHECK(clash["error"] == "SecretNameClash");

  json tree = body(s.handle(get("/api/models/" + sh.priv + "/tree")));
  const auto& nodes = tree["nodes"];
  REQUIRE(nodes.size() == 6);
  CHECK(nodes[0]["parent"].is_null());
  CHECK(nodes[1]["id"] == id1);
  CHECK(nodes[2]["parent"] == id1);
  CHECK(nodes[3]["result"] == "error");
  CHECK(nodes[4]["result"] == "error");
  CHECK(nodes[5]["result"] == "error");

  CHECK(s.handle(get("/api/models/" + sh.pub + "/tree")).status == 403);
  CHECK(s.handle(get("/api/models/nothere/tree")).status == 404);
}

TEST_CASE("execute validates the request before running anything") {
  Service s(memory_config(), std::make_shared<MemoryStore>());
  Shared sh = share(s, kSecretful);
  Shared other = share(s, kPlain);
  execute(s, "missing", {{"code", kPlain}, {"command", "Show"}}, 404);
  execute(s, sh.pub, {{"code", kPlain}}, 400);
  execute(s, sh.pub, {{"code", kPlain}, {"command", "Inv2OK"}, {"skip", -1}}, 400);
  execute(s, sh.pub, {{"code", kPlain}, {"command", "Inv2OK"}, {"parent", "nosuchid"}}, 404);
  execute(s, sh.pub, {{"code", kPlain}, {"command", "Inv2OK"}, {"parent", other.pub}}, 400);
  json tree = body(s.handle(get("/api/models/" + sh.priv + "/tree")));
  CHECK(tree["nodes"].size() == 1);
}

TEST_CASE("the private link runs the submission without merging") {
  Service s(memory_config(), std::make_shared<MemoryStore>());
  Shared sh = share(s, kSecretful);
  json r = execute(s, sh.priv, {{"code", kSecretful}, {"command", "Inv2OK"}});
  CHECK(r["verdict"] == "counterexample");
  json run = execute(s, sh.priv, {{"code", "sig Node {}\nrun Some { some Node } for 2\n"}, {"command", "Some"},
                                  {"skip", 1}});
  CHECK(run["verdict"] == "witness");
}

TEST_CASE("rate limit rejects without recording and recovers after a minute") {
  auto now = std::make_shared<std::chrono::steady_clock::time_point>(std::chrono::steady_clock::time_point{});
  ServiceConfig c = memory_config();
  c.executes_per_minute = 3;
  Service s(c, std::make_shared<MemoryStore>(), {}, [now] { return *now; });
  Shared sh = share(s, kSecretful);
  const json req = {{"code", "sig Node { next: set Node }\npred Inv2 { }\n"}, {"command", "Inv2OK"}};

  for (int i = 0; i < 3; ++i) execute(s, sh.pub, req);
  json limited = execute(s, sh.pub, req, 429);
  CHECK(limited["error"] == "RateLimited");
  // Another address has its own window.
  CHECK(s.handle(post("/api/models/" + sh.pub + "/execute", req, "10.0.0.2")).status == 200);
  CHECK(body(s.handle(get("/api/models/" + sh.priv + "/tree")))["nodes"].size() == 5);

  *now += std::chrono::seconds(59);
  execute(s, sh.pub, req, 429);
  *now += std::chrono::seconds(2);
  execute(s, sh.pub, req);
}

TEST_CASE("fifo gate admits in arrival order and honours the deadline") {
  FifoGate gate(1);
  auto far = std::chrono::steady_clock::now() + std::chrono::seconds(30);
  REQUIRE(gate.acquire(far));
  CHECK_FALSE(gate.acquire(std::chrono::steady_clock::now() + std::chrono::milliseconds(20)));

  std::vector<int> order;
  std::mutex m;
  std::vector<std::thread> waiters;
  std::atomic<int> queued{0};
  for (int i = 0; i < 4; ++i) {
    waiters.emplace_back([&, i] {
      ++queued;
      REQUIRE(gate.acquire(far));
      {
        std::lock_guard lock(m);
        order.push_back(i);
      }
      gate.release();
    });
    // Let each waiter take its ticket before the next one starts.
    while (queued.load() <= i) std::this_thread::yield();
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  gate.release();
  for (auto& t : waiters) t.join();
  CHECK(order == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("a full solver queue records a limit and answers 503") {
  ServiceConfig c = memory_config();
  c.solver_slots = 1;
  c.queue_timeout = std::chrono::milliseconds(50);
  c.solve_timeout = std::chrono::milliseconds(3000);
  Service s(c, std::make_shared<MemoryStore>());
  Shared sh = share(s, kSecretful);

  // A command that cannot finish quickly keeps the only slot busy.
  std::thread busy([&] {
    s.handle(post("/api/models/" + sh.priv + "/execute", {{"code", kHeavy}, {"command", "Big"}}, "10.0.0.9"));
  });
  std::this_thread::sleep_for(std::chrono::milliseconds(200));
  json queued = execute(s, sh.pub, {{"code", "sig Node { next: set Node }\npred Inv2 { }\n"}, {"command", "Inv2OK"}}, 503);
  CHECK(queued["error"] == "QueueTimeout");
  busy.join();

  json tree = body(s.handle(get("/api/models/" + sh.priv + "/tree")));
  bool limit_recorded = false;
  for (const auto& n : tree["nodes"]) limit_recorded |= n["result"] == "limit";
  CHECK(limit_recorded);
}

TEST_CASE("a solve over budget reports a resource limit") {
  ServiceConfig c = memory_config();
  c.solve_timeout = std::chrono::milliseconds(200);
  Service s(c, std::make_shared<MemoryStore>());
  Shared sh = share(s, kSecretful);
  auto start = std::chrono::steady_clock::now();
  json r = execute(s, sh.priv, {{"code", kHeavy}, {"command", "Big"}});
  CHECK(std::chrono::steady_clock::now() - start < c.solve_timeout + std::chrono::seconds(1));
  CHECK(r["result"] == "limit");
  CHECK(r["verdict"] == "resource-limit");
}

TEST_CASE("scope above the configured maximum is reported as an error") {
  ServiceConfig c = memory_config();
  c.max_scope = 3;
  Service s(c, std::make_shared<MemoryStore>());
  Shared sh = share(s, kPlain);
  json r = execute(s, sh.pub, {{"code", "sig A {}\nrun Show {} for 5\n"}, {"command", "Show"}});
  CHECK(r["result"] == "error");
  CHECK(r.contains("message"));
}

TEST_CASE("instances round trip verbatim through their own links") {
  Service s(memory_config(), std::make_shared<MemoryStore>());
  Shared sh = share(s, kPlain);
  json instance = {{"universe", {"A$0", "A$1"}},
                   {"sigs", {{"A", {"A$0", "A$1"}}}},
                   {"fields", {{"r", json::array({json::array({"A$0", "A$1"})})}}}};
  json layout = {{"A$0", {{"x", 10.5}, {"y", 2}}}};
  auto created = s.handle(post("/api/instances",
                               {{"model", sh.pub}, {"command", "Show"}, {"skip", 2}, {"instance", instance},
                                {"layout", layout}}));
  REQUIRE(created.status == 201);
  std::string token = body(created)["token"];
  CHECK(token.size() == kTokenLength);

  json doc = body(s.handle(get("/api/instances/" + token)));
  CHECK(doc["model"] == s.repository().link(sh.pub)->model_id);
  CHECK(doc["command"] == "Show");
  CHECK(doc["skip"] == 2);
  CHECK(doc["instance"] == instance);
  CHECK(doc["layout"] == layout);

  CHECK(s.handle(get("/api/instances/zzzzzzzzzzz")).status == 404);
  CHECK(s.handle(post("/api/instances", {{"model", "nope"}, {"command", "Show"}, {"instance", instance}})).status ==
        404);
  CHECK(s.handle(post("/api/instances", {{"model", sh.pub}, {"command", "Show"}, {"instance", 5}})).status == 400);
  CHECK(s.handle(post("/api/instances", {{"model", sh.pub}})).status == 400);
}

TEST_CASE("cors headers, preflight and unknown routes") {
  ServiceConfig c = memory_config();
  c.cors_allowed_origins = {"https://app.example"};
  Service s(c, std::make_shared<MemoryStore>());
  HttpResponse pre = s.handle({"OPTIONS", "/api/models", "", "x", "https://app.example"});
  CHECK(pre.status == 204);
  CHECK(pre.headers["Access-Control-Allow-Origin"] == "https://app.example");
  CHECK(pre.headers["Access-Control-Allow-Methods"].find("POST") != std::string::npos);
  HttpResponse foreign = s.handle({"GET", "/healthz", "", "x", "https://evil.example"});
  CHECK(foreign.headers.count("Access-Control-Allow-Origin") == 0);

  Service any(memory_config(), std::make_shared<MemoryStore>());
  CHECK(any.handle(get("/healthz")).headers["Access-Control-Allow-Origin"] == "*");
  CHECK(any.handle(get("/nowhere")).status == 404);
  CHECK(any.handle({"DELETE", "/api/models", "", "x", ""}).status == 404);
}

TEST_CASE("healthz reflects the store") {
  Service s(memory_config(), std::make_shared<MemoryStore>());
  auto ok = s.handle(get("/healthz"));
  CHECK(ok.status == 200);
  CHECK(body(ok)["status"] == "ok");

  struct Broken : MemoryStore {
    StoreHealth health() const override { return {false, "disk gone"}; }
  };
  Service bad(memory_config(), std::make_shared<Broken>());
  auto r = bad.handle(get("/healthz"));
  CHECK(r.status == 500);
  CHECK(body(r)["message"] == "disk gone");
}

TEST_CASE("configuration from the environment") {
  ::setenv("A4F_PORT", "9191", 1);
  ::setenv("A4F_STORE", "/tmp/a4f-env.jsonl", 1);
  ::setenv("A4F_TIMEOUT_MS", "1500", 1);
  ::setenv("A4F_MAX_SCOPE", "5", 1);
  ServiceConfig c = ServiceConfig::from_env();
  CHECK(c.port == 9191);
  CHECK(c.store_path == "/tmp/a4f-env.jsonl");
  CHECK(c.solve_timeout == std::chrono::milliseconds(1500));
  CHECK(c.max_scope == 5);
  ::setenv("A4F_MAX_SCOPE", "99", 1);
  CHECK_THROWS_AS((void)ServiceConfig::from_env(), std::invalid_argument);
  ::setenv("A4F_MAX_SCOPE", "x", 1);
  CHECK_THROWS_AS((void)ServiceConfig::from_env(), std::invalid_argument);
  for (const char* v : {"A4F_PORT", "A4F_STORE", "A4F_TIMEOUT_MS", "A4F_MAX_SCOPE"}) ::unsetenv(v);
}

TEST_CASE("no response to a public link holder carries secret text") {
  testing::GenOptions gen;
  gen.secret_rate = 0.5;
  gen.canary = "CANARY_91be";
  ServiceConfig c = memory_config();
  c.executes_per_minute = 1'000'000;
  Service s(c, std::make_shared<MemoryStore>());
  int executed = 0;
  for (const auto& text : testing::generate_corpus(4242, 40, gen)) {
    auto created = s.handle(post("/api/models", {{"code", text}}));
    REQUIRE(created.status == 201);
    CHECK(created.body.find(gen.canary) == std::string::npos);
    std::string pub = body(created)["public"];
    auto opened = s.handle(get("/api/models/" + pub));
    CHECK(opened.body.find(gen.canary) == std::string::npos);
    json view = body(opened);
    for (const auto& entry : view["commandIndex"]) {
      for (int skip = 0; skip < 2; ++skip) {
        auto r = s.handle(post("/api/models/" + pub + "/execute",
                               {{"code", view["code"]}, {"command", entry["name"]}, {"skip", skip}}));
        CHECK(r.body.find(gen.canary) == std::string::npos);
        ++executed;
      }
    }
    CHECK(s.handle(get("/api/models/" + pub + "/tree")).body.find(gen.canary) == std::string::npos);
  }
  CHECK(executed > 40);
}

TEST_CASE("http server answers health checks quickly while solves are queued") {
  ServiceConfig c = memory_config();
  c.solver_slots = 1;
  c.solve_timeout = std::chrono::milliseconds(500);
  c.executes_per_minute = 1000;
  Service s(c, std::make_shared<MemoryStore>());
  HttpServer server(s);
  int port = server.bind("127.0.0.1", 0);
  server.start();

  httplib::Client client("127.0.0.1", port);
  auto created = client.Post("/api/models", json{{"code", kSecretful}}.dump(), "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  CHECK(created->get_header_value("Access-Control-Allow-Origin") == "*");
  std::string priv = json::parse(created->body)["private"];

  std::vector<std::thread> load;
  for (int i = 0; i < 4; ++i) {
    load.emplace_back([&] {
      httplib::Client c2("127.0.0.1", port);
      c2.set_read_timeout(30);
      c2.Post("/api/models/" + priv + "/execute", json{{"code", kHeavy}, {"command", "Big"}}.dump(),
              "application/json");
    });
  }
  std::this_thread::sleep_for(std::chrono::milliseconds(100));
  auto start = std::chrono::steady_clock::now();
  auto health = client.Get("/healthz");
  auto elapsed = std::chrono::steady_clock::now() - start;
  REQUIRE(health);
  CHECK(health->status == 200);
  CHECK(elapsed < std::chrono::milliseconds(500));
  for (auto& t : load) t.join();

  auto tree = client.Get("/api/models/" + priv + "/tree");
  REQUIRE(tree);
  CHECK(json::parse(tree->body)["nodes"].size() == 5);
  auto options = client.Options("/api/models");
  REQUIRE(options);
  CHECK(options->status == 204);
  server.stop();
}
