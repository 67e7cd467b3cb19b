#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "a4f/finder/instance.hpp"
#include "a4f/lang/resolver.hpp"

namespace a4f {

using TupleSet = std::set<Tuple>;
/// Quantifier variable id to bound atom.
using Env = std::map<int, std::string>;

/// Tuple of atom ids packed one per byte, first column most significant, so
/// numeric order is lexicographic order of the ids.
using PackedTuple = std::uint64_t;
/// Sorted, duplicate-free packed tuples of one arity.
using Relation = std::vector<PackedTuple>;

/// An Instance with atoms replaced by small integers.
struct IndexedInstance {
  static constexpr int kMaxAtoms = 256;
  static constexpr int kMaxArity = 8;

  std::vector<std::string> atoms;
  /// Per atom: top-level sig named by its `Sig$i` prefix (or -1) and `i`.
  std::vector<int> atom_top;
  std::vector<int> atom_index;
  Relation universe;
  std::vector<Relation> sigs;    // parallel to ResolvedModel::sigs
  std::vector<Relation> fields;  // parallel to ResolvedModel::fields
  /// Names present in the source instance.
  std::vector<bool> has_sig;
  std::vector<bool> has_field;
  /// Duplicates and arity errors found while indexing.
  std::vector<std::string> problems;

  /// Installs the atom table and parses each name.
  void set_atoms(const ResolvedModel& model, std::vector<std::string> names);
};

IndexedInstance index_instance(const ResolvedModel& model, const Instance& instance);

/// Direct set-theoretic semantics over an instance.
///
/// Shares no code with the translator so it can serve as an oracle for it.
class Evaluator {
 public:
  Evaluator(const ResolvedModel& model, const Instance& instance);
  Evaluator(const ResolvedModel& model, const IndexedInstance& instance);
  ~Evaluator();
  Evaluator(const Evaluator&) = delete;
  Evaluator& operator=(const Evaluator&) = delete;

  [[nodiscard]] TupleSet eval(const Expr& e, const Env& env = {}) const;
  [[nodiscard]] bool holds(const Formula& f, const Env& env = {}) const;

  /// True when every fact holds.
  [[nodiscard]] bool facts_hold() const;
  /// Facts hold and the run body holds, or the check body fails.
  [[nodiscard]] bool matches(const ResolvedCommand& command) const;

 private:
  struct Impl;
  Impl* impl_;
};

/// Declaration problems of `instance` under `scope`; empty when it is a
/// well-formed, canonically numbered instance of the model's signatures.
std::vector<std::string> validate_instance(const ResolvedModel& model, const Scope& scope,
                                           const Instance& instance);
/// Same check on an indexed instance, stopping at the first problem.
bool instance_valid(const ResolvedModel& model, const Scope& scope, const IndexedInstance& instance);

/// True when the instance satisfies the facts and the command: the run body
/// holds, or the check body fails.
bool instance_matches(const ResolvedModel& model, const ResolvedCommand& command, const Instance& instance);

}  // namespace a4f
