#include "a4f/finder/circuit.hpp"

#include <algorithm>

#include "a4f/finder/budget.hpp"

namespace a4f {

Circuit::Circuit(BudgetMeter* meter, std::size_t max_nodes) : meter_(meter), max_nodes_(max_nodes) {
  nodes_.push_back(Node{Kind::True, 0, {}});
}

std::size_t Circuit::ChildrenHash::operator()(const std::vector<BoolRef>& v) const noexcept {
  std::size_t h = v.size();
  for (BoolRef r : v) h = h * 0x9e3779b97f4a7c15ULL + r.raw + (h >> 29);
  return h;
}

BoolRef Circuit::add(Node node) {
  if (max_nodes_ && nodes_.size() >= max_nodes_) {
    throw ResourceLimitExceeded("circuit too large");
  }
  if (meter_ && (nodes_.size() & 0xfff) == 0) meter_->poll();
  nodes_.push_back(std::move(node));
  return BoolRef{static_cast<std::uint32_t>(nodes_.size() - 1) << 1};
}

BoolRef Circuit::var(int v) {
  auto it = var_nodes_.find(v);
  if (it != var_nodes_.end()) return BoolRef{it->second << 1};
  BoolRef r = add(Node{Kind::Var, v, {}});
  var_nodes_.emplace(v, r.node());
  return r;
}

BoolRef Circuit::and_(std::vector<BoolRef> xs) {
  std::vector<BoolRef> flat;
  flat.reserve(xs.size());
  for (BoolRef x : xs) {
    if (x.is_true()) continue;
    if (x.is_false()) return kFalse;
    flat.push_back(x);
  }
  std::sort(flat.begin(), flat.end());
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
  for (std::size_t i = 1; i < flat.size(); ++i) {
    if (flat[i].node() == flat[i - 1].node()) return kFalse;  // x and !x
  }
  if (flat.empty()) return kTrue;
  if (flat.size() == 1) return flat.front();
  auto it = and_nodes_.find(flat);
  if (it != and_nodes_.end()) return BoolRef{it->second << 1};
  BoolRef r = add(Node{Kind::And, 0, flat});
  and_nodes_.emplace(std::move(flat), r.node());
  return r;
}

BoolRef Circuit::or_(std::vector<BoolRef> xs) {
  for (BoolRef& x : xs) x = !x;
  return !and_(std::move(xs));
}

BoolRef Circuit::iff(BoolRef a, BoolRef b) {
  if (a == b) return kTrue;
  if (a == !b) return kFalse;
  return and_(implies(a, b), implies(b, a));
}

BoolRef Circuit::ite(BoolRef c, BoolRef t, BoolRef e) {
  if (c.is_true()) return t;
  if (c.is_false()) return e;
  if (t == e) return t;
  return or_(and_(c, t), and_(!c, e));
}

BoolRef Circuit::at_most_one(const std::vector<BoolRef>& xs) {
  std::vector<BoolRef> conj;
  BoolRef seen = kFalse;
  for (BoolRef x : xs) {
    if (x.is_false()) continue;
    conj.push_back(!and_(seen, x));
    seen = or_(seen, x);
  }
  return and_(std::move(conj));
}

BoolRef Circuit::exactly_one(const std::vector<BoolRef>& xs) {
  return and_(or_(xs), at_most_one(xs));
}

bool Circuit::evaluate(BoolRef root, const std::vector<bool>& assignment) const {
  // Children always precede their parents, so one forward pass suffices.
  std::vector<bool> value(root.node() + 1, true);
  for (std::uint32_t id = 1; id <= root.node(); ++id) {
    const Node& n = nodes_[id];
    if (n.kind == Kind::Var) {
      value[id] = assignment.at(static_cast<std::size_t>(n.var));
    } else {
      value[id] = std::all_of(n.children.begin(), n.children.end(),
                              [&](BoolRef c) { return value[c.node()] != c.negated(); });
    }
  }
  return value[root.node()] != root.negated();
}

}  // namespace a4f
