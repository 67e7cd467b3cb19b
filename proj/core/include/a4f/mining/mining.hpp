#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace a4f {

/// One node of an exported derivation tree.
struct TreeNode {
  std::string id;
  std::optional<std::string> parent;
  std::string time;
  std::string code;
  std::optional<std::string> command;
  std::optional<std::string> result;
};

/// A validated derivation tree. Nodes keep the document's order.
struct DerivationTree {
  std::string root;
  std::vector<TreeNode> nodes;
  std::map<std::string, std::size_t> index;               // id -> position in nodes
  std::map<std::string, std::vector<std::string>> children;  // id -> child ids in document order

  [[nodiscard]] const TreeNode& node(const std::string& id) const { return nodes.at(index.at(id)); }
  [[nodiscard]] const TreeNode& root_node() const { return node(root); }
};

enum class MiningErrorCode { Malformed, Empty, Orphan, Cycle, UnknownChallenge };

std::string_view to_string(MiningErrorCode code);

class MiningError : public std::runtime_error {
 public:
  MiningError(MiningErrorCode code, std::string message) : std::runtime_error(std::move(message)), code_(code) {}
  [[nodiscard]] MiningErrorCode code() const { return code_; }

 private:
  MiningErrorCode code_;
};

/// Validates an exported tree document (`{"root", "nodes": [...]}`).
///
/// Throws MiningError: Malformed for a wrong shape, duplicate ids or a root
/// that is missing or not unique; Empty for no nodes; Orphan for a parent
/// that is not in the document; Cycle for nodes that never reach the root.
DerivationTree parse_tree(const nlohmann::json& document);

/// Secret check commands of the shared model at the root, in source order.
/// A root that does not parse has no challenges.
std::vector<std::string> challenge_names(const DerivationTree& tree);

struct ChallengeProgress {
  std::uint32_t attempts = 0;
  bool solved = false;
  /// Attempts of this challenge up to and including the first unsat.
  std::optional<std::uint32_t> attempts_to_first_solve;

  friend bool operator==(const ChallengeProgress&, const ChallengeProgress&) = default;
};

/// Path from a child of the root down to a leaf.
struct Session {
  std::vector<std::string> node_ids;
  std::map<std::string, ChallengeProgress> per_challenge;

  [[nodiscard]] std::size_t solved_count() const;

  friend bool operator==(const Session&, const Session&) = default;
};

/// One session per leaf other than the root, leaves in depth-first document
/// order. A challenge counts as solved when some node on the path ran that
/// command with result unsat.
std::vector<Session> extract_sessions(const DerivationTree& tree, const std::vector<std::string>& challenges);

enum class SessionClass { All, Some, None };

/// None when no challenge was solved, including when there are no challenges.
SessionClass classify(const Session& session, std::size_t challenge_count);

struct LinkStats {
  std::string link;
  std::size_t challenge_count = 0;
  std::size_t session_count = 0;
  std::size_t all_solved = 0;
  std::size_t some_solved = 0;
  std::size_t none_solved = 0;

  friend bool operator==(const LinkStats&, const LinkStats&) = default;
};

/// Statistics over the given challenges, which must all be secret checks of
/// the root model (MiningError(UnknownChallenge) otherwise).
LinkStats compute_stats(const DerivationTree& tree, const std::vector<std::string>& challenges,
                        std::string link = {});
/// Statistics over every challenge of the root model.
LinkStats compute_stats(const DerivationTree& tree, std::string link = {});

enum class ReportFormat { Json, Csv, TextBars };

/// Throws std::invalid_argument for an unknown name.
ReportFormat report_format(std::string_view name);

/// Renders one row per link. Text bars stack all, some and none solved
/// sessions left to right, scaled to the link with the most sessions.
std::string report(const std::vector<LinkStats>& stats, ReportFormat format, std::size_t bar_width = 40);

}  // namespace a4f
