#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

namespace a4f {

class BudgetMeter;

/// Reference to a circuit node with an optional negation: `(node << 1) | neg`.
struct BoolRef {
  std::uint32_t raw = 0;

  [[nodiscard]] std::uint32_t node() const { return raw >> 1; }
  [[nodiscard]] bool negated() const { return raw & 1U; }
  [[nodiscard]] BoolRef operator!() const { return BoolRef{raw ^ 1U}; }
  [[nodiscard]] bool is_true() const { return raw == 0; }
  [[nodiscard]] bool is_false() const { return raw == 1; }
  [[nodiscard]] bool is_const() const { return raw <= 1; }

  friend bool operator==(BoolRef, BoolRef) = default;
  friend auto operator<=>(BoolRef, BoolRef) = default;
};

/// Hash-consed and-inverter DAG over bounds variables.
///
/// Node 0 is the constant TRUE. Conjunctions are flattened, deduplicated and
/// sorted, so structurally equal subcircuits share one node.
class Circuit {
 public:
  enum class Kind : std::uint8_t { True, Var, And };

  static constexpr BoolRef kTrue{0};
  static constexpr BoolRef kFalse{1};

  explicit Circuit(BudgetMeter* meter = nullptr, std::size_t max_nodes = 0);

  BoolRef var(int v);
  BoolRef constant(bool value) const { return value ? kTrue : kFalse; }
  BoolRef and_(std::vector<BoolRef> xs);
  BoolRef or_(std::vector<BoolRef> xs);
  BoolRef and_(BoolRef a, BoolRef b) { return and_(std::vector<BoolRef>{a, b}); }
  BoolRef or_(BoolRef a, BoolRef b) { return or_(std::vector<BoolRef>{a, b}); }
  BoolRef implies(BoolRef a, BoolRef b) { return or_(!a, b); }
  BoolRef iff(BoolRef a, BoolRef b);
  BoolRef ite(BoolRef c, BoolRef t, BoolRef e);
  /// True when at most one of `xs` holds (linear ladder encoding).
  BoolRef at_most_one(const std::vector<BoolRef>& xs);
  BoolRef exactly_one(const std::vector<BoolRef>& xs);

  [[nodiscard]] Kind kind(std::uint32_t node) const { return nodes_[node].kind; }
  [[nodiscard]] int var_of(std::uint32_t node) const { return nodes_[node].var; }
  [[nodiscard]] const std::vector<BoolRef>& children(std::uint32_t node) const {
    return nodes_[node].children;
  }
  [[nodiscard]] std::size_t size() const { return nodes_.size(); }

  /// Evaluates `root` under an assignment indexed by variable (1-based).
  [[nodiscard]] bool evaluate(BoolRef root, const std::vector<bool>& assignment) const;

 private:
  struct Node {
    Kind kind = Kind::True;
    int var = 0;
    std::vector<BoolRef> children;
  };
  struct ChildrenHash {
    std::size_t operator()(const std::vector<BoolRef>& v) const noexcept;
  };

  BoolRef add(Node node);

  std::vector<Node> nodes_;
  std::unordered_map<int, std::uint32_t> var_nodes_;
  std::unordered_map<std::vector<BoolRef>, std::uint32_t, ChildrenHash> and_nodes_;
  BudgetMeter* meter_;
  std::size_t max_nodes_;
};

}  // namespace a4f
