#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace {

const std::string kMine = A4F_MINE_PATH;
const std::string kData = A4F_DATA_DIR "/trees/";

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  Run r;
  std::string cmd = kMine + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int raw = pclose(p);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string golden_trees() {
  std::string args;
  for (int seed : {3, 17, 42, 77, 105}) args += " --tree " + kData + "synthetic-" + std::to_string(seed) + ".json";
  return args;
}

}  // namespace

TEST_CASE("a4f-mine reproduces the golden csv") {
  Run r = run("stats --format csv" + golden_trees());
  CHECK(r.status == 0);
  CHECK(r.out == slurp(kData + "expected.csv"));
}

TEST_CASE("a4f-mine json and text output") {
  Run j = run("stats --format json" + golden_trees());
  REQUIRE(j.status == 0);
  auto rows = nlohmann::json::parse(j.out);
  REQUIRE(rows.size() == 5);
  CHECK(rows[2]["link"] == "synthetic-42");
  CHECK(rows[2]["sessions"] == 8);

  Run t = run("stats --tree " + kData + "synthetic-77.json");
  CHECK(t.status == 0);
  CHECK(t.out.find("synthetic-77 |") == 0);
  CHECK(t.out.find("all 5 some 0 none 1 of 6") != std::string::npos);
}

TEST_CASE("a4f-mine writes the report file") {
  auto out = std::filesystem::temp_directory_path() / "a4f-mine-report.csv";
  Run r = run("stats --format csv --out " + out.string() + golden_trees());
  CHECK(r.status == 0);
  CHECK(r.out.empty());
  CHECK(slurp(out.string()) == slurp(kData + "expected.csv"));
  std::filesystem::remove(out);
}

TEST_CASE("a4f-mine exits with 2 on malformed trees") {
  for (const char* bad : {"orphan.json", "cycle.json", "truncated.json"}) {
    CAPTURE(bad);
    CHECK(run("stats --tree " + kData + bad).status == 2);
  }
  CHECK(run("stats").status == 2);
  CHECK(run("stats --challenge Nope --tree " + kData + "synthetic-3.json").status == 2);
  CHECK(run("stats --url https://example.invalid/api/models/x/tree").status == 1);
}
