#include "a4f/finder/finder.hpp"

#include <algorithm>
#include <map>

namespace a4f {

std::string_view to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::Sat: return "sat";
    case OutcomeKind::Unsat: return "unsat";
    case OutcomeKind::Error: return "error";
    case OutcomeKind::ResourceLimit: return "limit";
  }
  return "error";
}

Enumerator::Enumerator(const ResolvedModel& model, const ResolvedCommand& command, const FinderOptions& options)
    : model_(model),
      options_(options),
      meter_(options.budget),
      translation_(translate(model, command, compute_bounds(model, command.scope, options.max_scope), &meter_)),
      solver_(translation_.bounds.num_vars) {
  if (options_.isomorphism_filter) {
    for (const auto& top : translation_.bounds.tops) {
      if (top.bound > kMaxIsomorphismBound) {
        throw LangError(LangErrorCode::ScopeTooLarge, {},
                        "the isomorphism filter supports bounds of at most " +
                            std::to_string(kMaxIsomorphismBound));
      }
    }
  }
  add_circuit(solver_, translation_.circuit, translation_.root);
}

bool Enumerator::advance() {
  const int n = translation_.bounds.num_vars;
  if (!started_ || options_.strategy == EnumerationStrategy::BlockingClauses) {
    started_ = true;
    return solver_.solve(meter_) == SatSolver::Result::Sat;
  }
  // The next model agrees with the last one up to some decision that was
  // false and is now true; the deepest such decision gives the smallest.
  std::vector<Lit> decisions = solver_.decision_literals();
  for (std::size_t k = decisions.size(); k-- > 0;) {
    Lit d = decisions[k];
    if (!lit_negative(d) || lit_var(d) > n) continue;
    std::vector<Lit> assumptions(decisions.begin(), decisions.begin() + static_cast<std::ptrdiff_t>(k));
    assumptions.push_back(d ^ 1);
    if (solver_.solve(meter_, assumptions) == SatSolver::Result::Sat) return true;
    if (solver_.known_unsat()) return false;
  }
  return false;
}

std::optional<Instance> Enumerator::next_labeled() {
  if (exhausted_ || !advance()) {
    exhausted_ = true;
    return std::nullopt;
  }
  const int n = translation_.bounds.num_vars;
  std::vector<bool> assignment(solver_.model().begin(), solver_.model().begin() + n + 1);
  if (options_.strategy == EnumerationStrategy::BlockingClauses) {
    std::vector<Lit> block;
    for (int v = 1; v <= n; ++v) block.push_back(make_lit(v, assignment[static_cast<std::size_t>(v)]));
    if (!solver_.add_blocking_clause(std::move(block))) exhausted_ = true;
  }
  return translation_.bounds.decode(model_, assignment);
}

std::optional<Instance> Enumerator::next() {
  for (;;) {
    auto inst = next_labeled();
    if (!inst || !options_.isomorphism_filter) return inst;
    if (seen_forms_.insert(canonical_form(model_, *inst)).second) return inst;
  }
}

SolveOutcome enumerate(const ResolvedModel& model, const ResolvedCommand& command, std::uint64_t skip,
                       const FinderOptions& options) {
  try {
    Enumerator en(model, command, options);
    for (std::uint64_t i = 0;; ++i) {
      auto inst = en.next();
      if (!inst) return SolveOutcome::unsat();
      if (i == skip) return SolveOutcome::sat(std::move(*inst));
    }
  } catch (const ResourceLimitExceeded& e) {
    return SolveOutcome::limit(e.what());
  } catch (const LangError& e) {
    return SolveOutcome::error(e.what());
  } catch (const std::bad_alloc&) {
    return SolveOutcome::limit("out of memory");
  }
}

SolveOutcome solve(const Translation& translation, const ResolvedModel& model, const ResourceBudget& budget) {
  try {
    BudgetMeter meter(budget);
    SatSolver solver(translation.bounds.num_vars);
    add_circuit(solver, translation.circuit, translation.root);
    if (solver.solve(meter) == SatSolver::Result::Unsat) return SolveOutcome::unsat();
    return SolveOutcome::sat(translation.bounds.decode(model, solver.model()));
  } catch (const ResourceLimitExceeded& e) {
    return SolveOutcome::limit(e.what());
  }
}

namespace {

std::string render(const Instance& inst) {
  std::string out;
  for (const auto& [name, atoms] : inst.sigs) {
    out += name + ":";
    for (const auto& a : atoms) out += a + ",";
    out += ";";
  }
  for (const auto& [name, tuples] : inst.fields) {
    out += name + ":";
    for (const auto& t : tuples) {
      for (const auto& a : t) out += a + " ";
      out += ",";
    }
    out += ";";
  }
  return out;
}

Instance renamed(const Instance& inst, const std::map<std::string, std::string>& to) {
  auto r = [&](const std::string& a) {
    auto it = to.find(a);
    return it == to.end() ? a : it->second;
  };
  Instance out;
  out.universe = inst.universe;
  for (const auto& [name, atoms] : inst.sigs) {
    auto& dst = out.sigs[name];
    for (const auto& a : atoms) dst.push_back(r(a));
    std::sort(dst.begin(), dst.end());
  }
  for (const auto& [name, tuples] : inst.fields) {
    auto& dst = out.fields[name];
    for (const auto& t : tuples) {
      Tuple nt;
      for (const auto& a : t) nt.push_back(r(a));
      dst.push_back(std::move(nt));
    }
    std::sort(dst.begin(), dst.end());
  }
  return out;
}

}  // namespace

std::string canonical_form(const ResolvedModel& model, const Instance& instance) {
  // Present atoms grouped by top-level sig; each group is permuted freely.
  std::vector<std::vector<std::string>> groups;
  for (int top : model.top_level_sigs()) {
    auto it = instance.sigs.find(model.sigs[static_cast<std::size_t>(top)].name);
    if (it == instance.sigs.end() || it->second.empty()) continue;
    if (it->second.size() > static_cast<std::size_t>(kMaxIsomorphismBound)) {
      throw std::invalid_argument("too many atoms for canonical form");
    }
    groups.push_back(it->second);
  }
  std::vector<std::vector<std::string>> perms = groups;
  for (auto& p : perms) std::sort(p.begin(), p.end());
  std::string best;
  bool first = true;
  for (;;) {
    std::map<std::string, std::string> to;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      for (std::size_t i = 0; i < groups[g].size(); ++i) to[perms[g][i]] = groups[g][i];
    }
    std::string form = render(renamed(instance, to));
    if (first || form < best) best = std::move(form);
    first = false;
    // Advance the mixed-radix permutation counter.
    std::size_t g = 0;
    while (g < perms.size() && !std::next_permutation(perms[g].begin(), perms[g].end())) ++g;
    if (g == perms.size()) break;
  }
  return best;
}

}  // namespace a4f
