#include "a4f/mining/mining.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "a4f/challenge/challenge.hpp"

namespace a4f {

using nlohmann::json;

namespace {

[[noreturn]] void fail(MiningErrorCode code, const std::string& message) { throw MiningError(code, message); }

std::optional<std::string> nullable_string(const json& node, const char* key, std::size_t i) {
  if (!node.contains(key) || node[key].is_null()) return std::nullopt;
  if (!node[key].is_string()) fail(MiningErrorCode::Malformed, "node " + std::to_string(i) + ": '" + key + "' must be a string or null");
  return node[key].get<std::string>();
}

std::string required_string(const json& node, const char* key, std::size_t i) {
  auto v = nullable_string(node, key, i);
  if (!v) fail(MiningErrorCode::Malformed, "node " + std::to_string(i) + ": '" + key + "' is required");
  return *v;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string_view to_string(MiningErrorCode code) {
  switch (code) {
    case MiningErrorCode::Malformed: return "Malformed";
    case MiningErrorCode::Empty: return "Empty";
    case MiningErrorCode::Orphan: return "Orphan";
    case MiningErrorCode::Cycle: return "Cycle";
    case MiningErrorCode::UnknownChallenge: return "UnknownChallenge";
  }
  return "MiningError";
}

DerivationTree parse_tree(const json& document) {
  if (!document.is_object()) fail(MiningErrorCode::Malformed, "tree document must be an object");
  if (!document.contains("nodes") || !document["nodes"].is_array()) {
    fail(MiningErrorCode::Malformed, "tree document needs a 'nodes' array");
  }
  if (!document.contains("root") || !document["root"].is_string()) {
    fail(MiningErrorCode::Malformed, "tree document needs a string 'root'");
  }
  const json& nodes = document["nodes"];
  if (nodes.empty()) fail(MiningErrorCode::Empty, "tree has no nodes; a root is required");

  DerivationTree tree;
  tree.root = document["root"].get<std::string>();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const json& n = nodes[i];
    if (!n.is_object()) fail(MiningErrorCode::Malformed, "node " + std::to_string(i) + " must be an object");
    TreeNode t;
    t.id = required_string(n, "id", i);
    t.parent = nullable_string(n, "parent", i);
    t.time = nullable_string(n, "time", i).value_or("");
    t.code = nullable_string(n, "code", i).value_or("");
    t.command = nullable_string(n, "command", i);
    t.result = nullable_string(n, "result", i);
    if (!tree.index.emplace(t.id, tree.nodes.size()).second) {
      fail(MiningErrorCode::Malformed, "duplicate node id '" + t.id + "'");
    }
    tree.nodes.push_back(std::move(t));
  }

  auto root = tree.index.find(tree.root);
  if (root == tree.index.end()) fail(MiningErrorCode::Malformed, "root '" + tree.root + "' is not among the nodes");
  if (tree.nodes[root->second].parent) fail(MiningErrorCode::Malformed, "the root has a parent");
  for (const auto& n : tree.nodes) {
    if (!n.parent) {
      if (n.id != tree.root) fail(MiningErrorCode::Malformed, "node '" + n.id + "' has no parent but is not the root");
      continue;
    }
    if (!tree.index.count(*n.parent)) {
      fail(MiningErrorCode::Orphan, "node '" + n.id + "' has unknown parent '" + *n.parent + "'");
    }
    tree.children[*n.parent].push_back(n.id);
  }

  // Every node reachable from the root means no cycles and one component.
  std::size_t reached = 0;
  std::vector<std::string> stack{tree.root};
  while (!stack.empty()) {
    std::string id = std::move(stack.back());
    stack.pop_back();
    ++reached;
    if (auto it = tree.children.find(id); it != tree.children.end()) {
      stack.insert(stack.end(), it->second.begin(), it->second.end());
    }
  }
  if (reached != tree.nodes.size()) {
    fail(MiningErrorCode::Cycle, std::to_string(tree.nodes.size() - reached) + " nodes lie on a parent cycle");
  }
  return tree;
}

std::vector<std::string> challenge_names(const DerivationTree& tree) {
  const std::string& code = tree.root_node().code;
  std::vector<std::string> out;
  try {
    SplitModel s = split(code, ParseOptions{code.size() + 1});
    for (const auto& c : s.command_index) {
      if (c.secret && c.kind == CommandKind::Check) out.push_back(c.name);
    }
  } catch (const LangError&) {
    return {};
  }
  return out;
}

std::size_t Session::solved_count() const {
  return static_cast<std::size_t>(std::count_if(per_challenge.begin(), per_challenge.end(),
                                                [](const auto& kv) { return kv.second.solved; }));
}

std::vector<Session> extract_sessions(const DerivationTree& tree, const std::vector<std::string>& challenges) {
  std::vector<Session> sessions;
  // Depth-first with an explicit path; children are pushed in reverse so
  // leaves come out in document order.
  struct Frame {
    std::string id;
    std::size_t depth;
  };
  std::vector<Frame> stack{{tree.root, 0}};
  std::vector<std::string> path;
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    path.resize(f.depth);
    if (f.id != tree.root) path.push_back(f.id);
    auto it = tree.children.find(f.id);
    if (it == tree.children.end() || it->second.empty()) {
      if (f.id == tree.root) continue;
      Session s;
      s.node_ids = path;
      for (const auto& c : challenges) s.per_challenge[c];
      for (const auto& id : path) {
        const TreeNode& n = tree.node(id);
        if (!n.command) continue;
        auto p = s.per_challenge.find(*n.command);
        if (p == s.per_challenge.end()) continue;
        ++p->second.attempts;
        if (!p->second.solved && n.result == "unsat") {
          p->second.solved = true;
          p->second.attempts_to_first_solve = p->second.attempts;
        }
      }
      sessions.push_back(std::move(s));
      continue;
    }
    const std::size_t depth = f.id == tree.root ? 0 : f.depth + 1;
    for (auto c = it->second.rbegin(); c != it->second.rend(); ++c) stack.push_back({*c, depth});
  }
  return sessions;
}

SessionClass classify(const Session& session, std::size_t challenge_count) {
  std::size_t solved = session.solved_count();
  if (solved == 0) return SessionClass::None;
  return solved == challenge_count ? SessionClass::All : SessionClass::Some;
}

LinkStats compute_stats(const DerivationTree& tree, const std::vector<std::string>& challenges, std::string link) {
  const auto known = challenge_names(tree);
  std::set<std::string> unique;
  for (const auto& c : challenges) {
    if (std::find(known.begin(), known.end(), c) == known.end()) {
      fail(MiningErrorCode::UnknownChallenge, "'" + c + "' is not a secret check of the shared model");
    }
    unique.insert(c);
  }
  LinkStats out;
  out.link = std::move(link);
  out.challenge_count = unique.size();
  std::vector<std::string> names(unique.begin(), unique.end());
  for (const auto& s : extract_sessions(tree, names)) {
    ++out.session_count;
    switch (classify(s, out.challenge_count)) {
      case SessionClass::All: ++out.all_solved; break;
      case SessionClass::Some: ++out.some_solved; break;
      case SessionClass::None: ++out.none_solved; break;
    }
  }
  return out;
}

LinkStats compute_stats(const DerivationTree& tree, std::string link) {
  return compute_stats(tree, challenge_names(tree), std::move(link));
}

ReportFormat report_format(std::string_view name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  if (name == "text" || name == "text-bars") return ReportFormat::TextBars;
  throw std::invalid_argument("unknown report format '" + std::string(name) + "'");
}

std::string report(const std::vector<LinkStats>& stats, ReportFormat format, std::size_t bar_width) {
  std::ostringstream out;
  switch (format) {
    case ReportFormat::Json: {
      json rows = json::array();
      for (const auto& s : stats) {
        rows.push_back({{"link", s.link},
                        {"challenges", s.challenge_count},
                        {"sessions", s.session_count},
                        {"all", s.all_solved},
                        {"some", s.some_solved},
                        {"none", s.none_solved}});
      }
      out << rows.dump(2) << "\n";
      break;
    }
    case ReportFormat::Csv:
      out << "link,challenges,sessions,all,some,none\n";
      for (const auto& s : stats) {
        out << csv_field(s.link) << ',' << s.challenge_count << ',' << s.session_count << ',' << s.all_solved << ','
            << s.some_solved << ',' << s.none_solved << "\n";
      }
      break;
    case ReportFormat::TextBars: {
      std::size_t label = 4;
      std::size_t most = 0;
      for (const auto& s : stats) {
        label = std::max(label, s.link.size());
        most = std::max(most, s.session_count);
      }
      // Scale the cumulative ends so rounding never shifts the total.
      auto scaled = [&](std::size_t n) { return most == 0 ? 0 : (n * bar_width + most / 2) / most; };
      for (const auto& s : stats) {
        std::size_t a = scaled(s.all_solved);
        std::size_t as = scaled(s.all_solved + s.some_solved);
        std::size_t total = scaled(s.session_count);
        out << s.link << std::string(label - s.link.size(), ' ') << " |" << std::string(a, '#')
            << std::string(as - a, '+') << std::string(total - as, '.') << std::string(bar_width - total, ' ')
            << "| all " << s.all_solved << " some " << s.some_solved << " none " << s.none_solved << " of "
            << s.session_count << "\n";
      }
      out << "legend: # all solved, + some solved, . none solved\n";
      break;
    }
  }
  return out.str();
}

}  // namespace a4f
