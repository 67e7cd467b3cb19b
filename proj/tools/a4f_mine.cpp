// Offline statistics over exported derivation trees.

#include <CLI11.hpp>
#include <httplib.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "a4f/mining/mining.hpp"

namespace {

constexpr int kMalformedInput = 2;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Fetches `http://host[:port]/path`.
std::string fetch(const std::string& url) {
  const std::string scheme = "http://";
  if (url.rfind(scheme, 0) != 0) throw InputError("only http:// URLs are supported: " + url);
  auto slash = url.find('/', scheme.size());
  std::string origin = url.substr(0, slash);
  std::string path = slash == std::string::npos ? "/" : url.substr(slash);
  httplib::Client client(origin);
  client.set_read_timeout(60);
  auto res = client.Get(path);
  if (!res) throw InputError("request to " + url + " failed: " + httplib::to_string(res.error()));
  if (res->status != 200) throw InputError("request to " + url + " returned HTTP " + std::to_string(res->status));
  return res->body;
}

// Link token from `.../api/models/<token>/tree`, else the URL itself.
std::string url_label(const std::string& url) {
  const std::string marker = "/api/models/";
  auto at = url.find(marker);
  if (at == std::string::npos) return url;
  auto start = at + marker.size();
  return url.substr(start, url.find('/', start) - start);
}

a4f::LinkStats stats_of(const std::string& text, const std::string& label,
                        const std::vector<std::string>& challenges) {
  auto doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw a4f::MiningError(a4f::MiningErrorCode::Malformed, label + ": not valid JSON");
  auto tree = a4f::parse_tree(doc);
  return challenges.empty() ? a4f::compute_stats(tree, label) : a4f::compute_stats(tree, challenges, label);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mine exported derivation trees"};
  app.require_subcommand(1);

  auto* stats = app.add_subcommand("stats", "Count sessions that solved all, some or none of the challenges");
  std::vector<std::string> trees;
  std::vector<std::string> urls;
  std::vector<std::string> challenges;
  std::string format = "text";
  std::string out_path;
  auto* tree_opt = stats->add_option("--tree", trees, "Exported tree file, repeatable")->check(CLI::ExistingFile);
  auto* url_opt = stats->add_option("--url", urls, "<service>/api/models/<private token>/tree, repeatable");
  stats->add_option("--challenge", challenges, "Restrict to these challenges, repeatable");
  stats->add_option("--format", format, "json, csv or text")
      ->check(CLI::IsMember({"json", "csv", "text", "text-bars"}))
      ->capture_default_str();
  stats->add_option("--out", out_path, "Write the report here instead of stdout");
  tree_opt->excludes(url_opt);
  url_opt->excludes(tree_opt);

  CLI11_PARSE(app, argc, argv);

  if (trees.empty() && urls.empty()) {
    std::cerr << "a4f-mine: give --tree or --url\n";
    return kMalformedInput;
  }

  std::vector<a4f::LinkStats> rows;
  try {
    for (const auto& t : trees) rows.push_back(stats_of(read_file(t), std::filesystem::path(t).stem().string(), challenges));
    for (const auto& u : urls) rows.push_back(stats_of(fetch(u), url_label(u), challenges));
  } catch (const a4f::MiningError& e) {
    std::cerr << "a4f-mine: " << a4f::to_string(e.code()) << ": " << e.what() << "\n";
    return kMalformedInput;
  } catch (const InputError& e) {
    std::cerr << "a4f-mine: " << e.what() << "\n";
    return 1;
  }

  std::string text = a4f::report(rows, a4f::report_format(format));
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!(out << text)) {
      std::cerr << "a4f-mine: cannot write " << out_path << "\n";
      return 1;
    }
  }
  return 0;
}
