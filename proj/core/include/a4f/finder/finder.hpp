#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "a4f/finder/bounds.hpp"
#include "a4f/finder/budget.hpp"
#include "a4f/finder/instance.hpp"
#include "a4f/finder/sat_solver.hpp"
#include "a4f/finder/translator.hpp"
#include "a4f/lang/resolver.hpp"

namespace a4f {

enum class OutcomeKind { Sat, Unsat, Error, ResourceLimit };

std::string_view to_string(OutcomeKind kind);

struct SolveOutcome {
  OutcomeKind kind = OutcomeKind::Unsat;
  std::optional<Instance> instance;  // set iff Sat
  std::string message;               // Error and ResourceLimit

  static SolveOutcome sat(Instance i) { return {OutcomeKind::Sat, std::move(i), {}}; }
  static SolveOutcome unsat() { return {OutcomeKind::Unsat, std::nullopt, {}}; }
  static SolveOutcome error(std::string m) { return {OutcomeKind::Error, std::nullopt, std::move(m)}; }
  static SolveOutcome limit(std::string m) { return {OutcomeKind::ResourceLimit, std::nullopt, std::move(m)}; }
};

/// How successive instances are obtained. Both yield the same sequence.
enum class EnumerationStrategy {
  /// Re-solve for the smallest model above the last one, flipping one of its
  /// decisions under assumptions. Linear in the number of instances.
  LexSuccessor,
  /// Add a clause excluding each model and re-solve. Every clause stays
  /// watched, so cost grows quadratically with the number of instances.
  BlockingClauses,
};

struct FinderOptions {
  ResourceBudget budget;
  EnumerationStrategy strategy = EnumerationStrategy::LexSuccessor;
  int max_scope = kDefaultMaxScope;
  /// Skip instances isomorphic to an earlier one (bounds of at most 4).
  bool isomorphism_filter = false;
};

inline constexpr int kMaxIsomorphismBound = 4;

/// Lazily enumerates the instances of one command in the solver's order.
///
/// Construction computes bounds and translates; both may throw LangError
/// (ScopeTooLarge) or ResourceLimitExceeded. Successive instances differ in
/// at least one bounds variable and come in increasing lexicographic order
/// of the bounds assignment.
class Enumerator {
 public:
  Enumerator(const ResolvedModel& model, const ResolvedCommand& command, const FinderOptions& options);

  /// The next instance, or nullopt once exhausted. Throws ResourceLimitExceeded.
  std::optional<Instance> next();

  [[nodiscard]] const Bounds& bounds() const { return translation_.bounds; }
  [[nodiscard]] const Translation& translation() const { return translation_; }

 private:
  std::optional<Instance> next_labeled();
  bool advance();

  const ResolvedModel& model_;
  FinderOptions options_;
  BudgetMeter meter_;
  Translation translation_;
  SatSolver solver_;
  bool started_ = false;
  bool exhausted_ = false;
  std::set<std::string> seen_forms_;
};

/// The (skip+1)-th instance of the command, or Unsat when there are fewer.
/// Never throws: scope problems become Error and exhausted budgets become
/// ResourceLimit.
SolveOutcome enumerate(const ResolvedModel& model, const ResolvedCommand& command, std::uint64_t skip,
                       const FinderOptions& options = {});

/// First instance of a translated command.
SolveOutcome solve(const Translation& translation, const ResolvedModel& model, const ResourceBudget& budget = {});

/// Canonical text of an instance up to renaming atoms within each top-level
/// sig. Throws std::invalid_argument when a sig has more than
/// kMaxIsomorphismBound atoms.
std::string canonical_form(const ResolvedModel& model, const Instance& instance);

}  // namespace a4f
