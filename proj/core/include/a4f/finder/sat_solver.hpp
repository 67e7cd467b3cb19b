#pragma once

#include <cstdint>
#include <vector>

#include "a4f/finder/circuit.hpp"

namespace a4f {

class BudgetMeter;

/// Literal encoding: `2 * var + (negative ? 1 : 0)`, variables from 1.
using Lit = int;

inline constexpr Lit make_lit(int var, bool negative = false) { return 2 * var + (negative ? 1 : 0); }
inline constexpr int lit_var(Lit l) { return l >> 1; }
inline constexpr bool lit_negative(Lit l) { return (l & 1) != 0; }

/// Conflict-driven clause-learning solver with a fixed branching order.
///
/// Decisions always take the lowest-numbered unassigned variable and try
/// false first; there are no restarts and learned clauses are kept. Under
/// this discipline the first model found is the lexicographically smallest
/// one (variable 1 most significant, false < true). Every literal on the
/// trail is either a decision on a variable below all later ones or implied
/// by the clauses and earlier decisions, so a model that differs from the
/// smallest one would have to disagree first on a forced literal.
class SatSolver {
 public:
  enum class Result { Sat, Unsat };

  explicit SatSolver(int num_vars = 0);

  int new_var();
  [[nodiscard]] int num_vars() const { return num_vars_; }

  /// Adds a clause; may be called between solves. Returns false once the
  /// clause set is known to be unsatisfiable.
  bool add_clause(std::vector<Lit> lits);

  /// Adds a clause that the last model falsifies and resumes the search from
  /// the deepest point where it is still consistent, instead of restarting.
  /// Returns false once the clause set is known to be unsatisfiable.
  bool add_blocking_clause(std::vector<Lit> lits);

  /// Solves under `assumptions`, which are taken as the first decisions in
  /// order. Unsat means no model extends the assumptions; `known_unsat`
  /// tells whether the clause set itself is unsatisfiable. Search resumes
  /// from the longest decision prefix shared with the previous call.
  /// Throws ResourceLimitExceeded via the meter.
  Result solve(BudgetMeter& meter, const std::vector<Lit>& assumptions = {});

  /// Decision literal of each level of the last model, assumptions included.
  [[nodiscard]] const std::vector<Lit>& decision_literals() const { return level_lits_; }
  [[nodiscard]] bool known_unsat() const { return unsat_; }

  /// Value of `var` in the last model.
  [[nodiscard]] bool model_value(int var) const { return model_.at(static_cast<std::size_t>(var)); }
  [[nodiscard]] const std::vector<bool>& model() const { return model_; }

  [[nodiscard]] std::uint64_t conflicts() const { return conflicts_; }
  [[nodiscard]] std::uint64_t decisions() const { return decisions_; }

 private:
  static constexpr signed char kFalse = 0;
  static constexpr signed char kTrue = 1;
  static constexpr signed char kUndef = 2;
  struct Clause {
    std::vector<Lit> lits;
  };

  signed char value(Lit l) const {
    signed char v = assigns_[static_cast<std::size_t>(lit_var(l))];
    return v == kUndef ? kUndef : static_cast<signed char>(v ^ (l & 1));
  }
  int level() const { return static_cast<int>(trail_lim_.size()); }
  void enqueue(Lit l, int reason);
  int propagate(BudgetMeter& meter);
  void analyze(int conflict, std::vector<Lit>& learnt, int& backtrack_level);
  void backtrack(int to_level);
  void attach(int clause);

  int num_vars_ = 0;
  bool unsat_ = false;
  int pending_conflict_ = -1;
  std::vector<Clause> clauses_;
  std::vector<std::vector<int>> watches_;
  std::vector<signed char> assigns_;
  std::vector<int> levels_;
  std::vector<int> reasons_;
  std::vector<char> seen_;
  std::vector<Lit> trail_;
  std::vector<int> trail_lim_;
  std::vector<Lit> level_lits_;
  bool had_assumptions_ = false;
  std::size_t qhead_ = 0;
  int next_decision_ = 1;
  std::vector<bool> model_;
  std::uint64_t conflicts_ = 0;
  std::uint64_t decisions_ = 0;
};

/// Tseitin encoding of `root` into `solver`. Circuit variables map to solver
/// variables 1..num_bounds_vars, which the solver must already contain;
/// auxiliary variables are appended in node order.
void add_circuit(SatSolver& solver, const Circuit& circuit, BoolRef root);

}  // namespace a4f
