#include "a4f/finder/sat_solver.hpp"

#include <algorithm>
#include <utility>

#include "a4f/finder/budget.hpp"

namespace a4f {

SatSolver::SatSolver(int num_vars) {
  assigns_.push_back(kUndef);
  levels_.push_back(0);
  reasons_.push_back(-1);
  seen_.push_back(0);
  watches_.resize(2);
  for (int i = 0; i < num_vars; ++i) new_var();
}

int SatSolver::new_var() {
  ++num_vars_;
  assigns_.push_back(kUndef);
  levels_.push_back(0);
  reasons_.push_back(-1);
  seen_.push_back(0);
  watches_.resize(watches_.size() + 2);
  return num_vars_;
}

void SatSolver::enqueue(Lit l, int reason) {
  auto v = static_cast<std::size_t>(lit_var(l));
  assigns_[v] = lit_negative(l) ? kFalse : kTrue;
  levels_[v] = level();
  reasons_[v] = reason;
  trail_.push_back(l);
}

void SatSolver::attach(int ci) {
  const auto& lits = clauses_[static_cast<std::size_t>(ci)].lits;
  watches_[static_cast<std::size_t>(lits[0])].push_back(ci);
  watches_[static_cast<std::size_t>(lits[1])].push_back(ci);
}

bool SatSolver::add_clause(std::vector<Lit> lits) {
  if (unsat_) return false;
  backtrack(0);
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  std::vector<Lit> kept;
  for (std::size_t i = 0; i < lits.size(); ++i) {
    if (i + 1 < lits.size() && lits[i + 1] == (lits[i] ^ 1)) return true;  // tautology
    signed char v = value(lits[i]);
    if (v == kTrue) return true;
    if (v == kUndef) kept.push_back(lits[i]);
  }
  if (kept.empty()) {
    unsat_ = true;
    return false;
  }
  if (kept.size() == 1) {
    enqueue(kept[0], -1);
    return true;
  }
  clauses_.push_back(Clause{std::move(kept)});
  attach(static_cast<int>(clauses_.size() - 1));
  return true;
}

bool SatSolver::add_blocking_clause(std::vector<Lit> lits) {
  if (unsat_) return false;
  auto lv = [&](Lit l) { return levels_[static_cast<std::size_t>(lit_var(l))]; };
  for (Lit l : lits) {
    if (value(l) != kFalse) return add_clause(std::move(lits));
  }
  if (lits.size() < 2) return add_clause(std::move(lits));
  std::sort(lits.begin(), lits.end(), [&](Lit a, Lit b) { return lv(a) > lv(b); });
  int top = lv(lits[0]);
  if (top == 0) {
    unsat_ = true;
    return false;
  }
  int second = lv(lits[1]);
  // Past the two watches, keep variable order so replacement watches land on
  // early literals, which stay assigned longest under the fixed branching.
  std::sort(lits.begin() + 2, lits.end());
  clauses_.push_back(Clause{std::move(lits)});
  int ci = static_cast<int>(clauses_.size() - 1);
  attach(ci);
  if (second == top) {
    // At least two literals on the deepest level: resolve as a conflict there.
    backtrack(top);
    pending_conflict_ = ci;
  } else {
    // Unit below the deepest level: assert its literal where it becomes unit.
    backtrack(second);
    enqueue(clauses_.back().lits[0], ci);
  }
  return true;
}

int SatSolver::propagate(BudgetMeter& meter) {
  while (qhead_ < trail_.size()) {
    Lit p = trail_[qhead_++];
    meter.charge();
    Lit false_lit = p ^ 1;
    auto& ws = watches_[static_cast<std::size_t>(false_lit)];
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < ws.size()) {
      int ci = ws[i++];
      auto& lits = clauses_[static_cast<std::size_t>(ci)].lits;
      if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
      if (value(lits[0]) == kTrue) {
        ws[j++] = ci;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < lits.size(); ++k) {
        if (value(lits[k]) != kFalse) {
          std::swap(lits[1], lits[k]);
          watches_[static_cast<std::size_t>(lits[1])].push_back(ci);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = ci;
      if (value(lits[0]) == kFalse) {
        while (i < ws.size()) ws[j++] = ws[i++];
        ws.resize(j);
        qhead_ = trail_.size();
        return ci;
      }
      enqueue(lits[0], ci);
    }
    ws.resize(j);
  }
  return -1;
}

void SatSolver::analyze(int conflict, std::vector<Lit>& learnt, int& backtrack_level) {
  learnt.assign(1, 0);
  int path = 0;
  Lit p = -1;
  std::size_t index = trail_.size();
  int ci = conflict;
  do {
    const auto& lits = clauses_[static_cast<std::size_t>(ci)].lits;
    for (std::size_t k = (p == -1 ? 0 : 1); k < lits.size(); ++k) {
      Lit q = lits[k];
      auto v = static_cast<std::size_t>(lit_var(q));
      if (seen_[v] || levels_[v] == 0) continue;
      seen_[v] = 1;
      if (levels_[v] >= level()) {
        ++path;
      } else {
        learnt.push_back(q);
      }
    }
    while (!seen_[static_cast<std::size_t>(lit_var(trail_[--index]))]) {
    }
    p = trail_[index];
    ci = reasons_[static_cast<std::size_t>(lit_var(p))];
    seen_[static_cast<std::size_t>(lit_var(p))] = 0;
    --path;
  } while (path > 0);
  learnt[0] = p ^ 1;

  backtrack_level = 0;
  std::size_t max_i = 1;
  for (std::size_t k = 1; k < learnt.size(); ++k) {
    int lv = levels_[static_cast<std::size_t>(lit_var(learnt[k]))];
    if (lv > backtrack_level) {
      backtrack_level = lv;
      max_i = k;
    }
  }
  if (learnt.size() > 1) std::swap(learnt[1], learnt[max_i]);
  for (Lit l : learnt) seen_[static_cast<std::size_t>(lit_var(l))] = 0;
}

void SatSolver::backtrack(int to_level) {
  if (level() <= to_level) return;
  auto stop = static_cast<std::size_t>(trail_lim_[static_cast<std::size_t>(to_level)]);
  for (std::size_t i = trail_.size(); i-- > stop;) {
    int v = lit_var(trail_[i]);
    assigns_[static_cast<std::size_t>(v)] = kUndef;
    reasons_[static_cast<std::size_t>(v)] = -1;
    next_decision_ = std::min(next_decision_, v);
  }
  trail_.resize(stop);
  trail_lim_.resize(static_cast<std::size_t>(to_level));
  level_lits_.resize(static_cast<std::size_t>(to_level));
  qhead_ = std::min(qhead_, trail_.size());
}

SatSolver::Result SatSolver::solve(BudgetMeter& meter, const std::vector<Lit>& assumptions) {
  if (unsat_) return Result::Unsat;
  if (!assumptions.empty() || had_assumptions_) {
    int shared = 0;
    while (shared < level() && static_cast<std::size_t>(shared) < assumptions.size() &&
           level_lits_[static_cast<std::size_t>(shared)] == assumptions[static_cast<std::size_t>(shared)]) {
      ++shared;
    }
    backtrack(shared);
  }
  had_assumptions_ = !assumptions.empty();
  std::vector<Lit> learnt;
  for (;;) {
    int conflict = pending_conflict_ >= 0 ? std::exchange(pending_conflict_, -1) : propagate(meter);
    if (conflict >= 0) {
      ++conflicts_;
      if (level() == 0) {
        unsat_ = true;
        return Result::Unsat;
      }
      int bt = 0;
      analyze(conflict, learnt, bt);
      backtrack(bt);
      if (learnt.size() == 1) {
        enqueue(learnt[0], -1);
      } else {
        clauses_.push_back(Clause{learnt});
        int ci = static_cast<int>(clauses_.size() - 1);
        attach(ci);
        enqueue(learnt[0], ci);
      }
      continue;
    }
    if (static_cast<std::size_t>(level()) < assumptions.size()) {
      Lit a = assumptions[static_cast<std::size_t>(level())];
      if (value(a) == kFalse) return Result::Unsat;
      trail_lim_.push_back(static_cast<int>(trail_.size()));
      level_lits_.push_back(a);
      if (value(a) == kUndef) enqueue(a, -1);
      continue;
    }
    while (next_decision_ <= num_vars_ && assigns_[static_cast<std::size_t>(next_decision_)] != kUndef) {
      ++next_decision_;
    }
    if (next_decision_ > num_vars_) {
      model_.assign(static_cast<std::size_t>(num_vars_) + 1, false);
      for (int v = 1; v <= num_vars_; ++v) model_[static_cast<std::size_t>(v)] = assigns_[static_cast<std::size_t>(v)] == kTrue;
      return Result::Sat;
    }
    ++decisions_;
    trail_lim_.push_back(static_cast<int>(trail_.size()));
    level_lits_.push_back(make_lit(next_decision_, true));
    enqueue(level_lits_.back(), -1);
  }
}

void add_circuit(SatSolver& solver, const Circuit& circuit, BoolRef root) {
  if (root.is_true()) return;
  if (root.is_false()) {
    solver.add_clause({});
    return;
  }
  // Mark the nodes reachable from the root; children precede parents.
  std::vector<char> live(root.node() + 1, 0);
  live[root.node()] = 1;
  for (std::uint32_t id = root.node(); id > 0; --id) {
    if (!live[id] || circuit.kind(id) != Circuit::Kind::And) continue;
    for (BoolRef ch : circuit.children(id)) live[ch.node()] = 1;
  }
  std::vector<int> var_of(root.node() + 1, 0);
  for (std::uint32_t id = 1; id <= root.node(); ++id) {
    if (!live[id]) continue;
    var_of[id] = circuit.kind(id) == Circuit::Kind::Var ? circuit.var_of(id) : solver.new_var();
  }
  auto lit = [&](BoolRef r) { return make_lit(var_of[r.node()], r.negated()); };
  for (std::uint32_t id = 1; id <= root.node(); ++id) {
    if (!live[id] || circuit.kind(id) != Circuit::Kind::And) continue;
    Lit g = make_lit(var_of[id]);
    std::vector<Lit> big{g};
    for (BoolRef ch : circuit.children(id)) {
      solver.add_clause({g ^ 1, lit(ch)});
      big.push_back(lit(ch) ^ 1);
    }
    solver.add_clause(std::move(big));
  }
  solver.add_clause({lit(root)});
}

}  // namespace a4f
