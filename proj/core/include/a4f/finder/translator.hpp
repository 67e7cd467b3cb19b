#pragma once

#include <cstdint>
#include <map>

#include "a4f/finder/bounds.hpp"
#include "a4f/finder/circuit.hpp"
#include "a4f/lang/resolver.hpp"

namespace a4f {

class BudgetMeter;

/// Sparse boolean matrix: flat tuple index to the condition of membership.
/// Absent cells are false.
struct BoolMatrix {
  int arity = 1;
  std::map<std::uint64_t, BoolRef> cells;
};

/// A command compiled to a single circuit over its bounds variables.
struct Translation {
  Bounds bounds;
  Circuit circuit;
  BoolRef root = Circuit::kTrue;
};

/// Hierarchy, sig multiplicity and field declaration constraints.
BoolRef structural_constraints(Circuit& circuit, const ResolvedModel& model, const Bounds& bounds);

/// Conjunction of the structural constraints, every fact, and the run body
/// or the negated check body. Throws ResourceLimitExceeded when the meter
/// runs out or the circuit outgrows the budget.
Translation translate(const ResolvedModel& model, const ResolvedCommand& command, Bounds bounds,
                      BudgetMeter* meter = nullptr);

/// Translates a closed formula (facts are not included).
BoolRef translate_formula(Circuit& circuit, const ResolvedModel& model, const Bounds& bounds,
                          const Formula& formula, BudgetMeter* meter = nullptr);

/// Translates a closed expression.
BoolMatrix translate_expr(Circuit& circuit, const ResolvedModel& model, const Bounds& bounds,
                          const Expr& expr, BudgetMeter* meter = nullptr);

}  // namespace a4f
