#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "a4f/finder/instance.hpp"
#include "a4f/lang/resolver.hpp"

namespace a4f {

/// Hard ceiling on any per-sig bound, whatever the configuration says.
inline constexpr int kHardMaxScope = 12;
inline constexpr int kDefaultMaxScope = 8;

/// Candidate atoms and the boolean variables describing an instance.
///
/// Variables are numbered from 1 in a fixed order: presence (top-level sigs
/// by name, then atom index), membership (sub-sigs by name, then atom),
/// tuples (fields by name, then tuple in universe order). Variable 0 stands
/// for the constant true.
struct Bounds {
  struct TopSig {
    int sig = -1;
    int bound = 0;
    bool exactly = false;
    int first_atom = 0;  // index into `atoms`
  };
  struct FieldBounds {
    int field = -1;
    std::vector<std::vector<int>> tuples;  // candidate tuples as atom indices
    std::vector<int> vars;                 // one per candidate tuple
  };

  std::vector<std::string> atoms;
  std::vector<int> atom_top;  // top-level sig of each atom
  std::vector<int> presence;  // per atom; 0 when fixed present
  /// membership[sig][atom]: variable for a sub-sig, presence for a top sig,
  /// -1 when the atom cannot belong to the sig.
  std::vector<std::vector<int>> membership;
  std::vector<TopSig> tops;
  std::vector<FieldBounds> fields;  // parallel to ResolvedModel::fields
  int num_vars = 0;

  /// Candidate atoms of `sig` (those of its top-level ancestor).
  [[nodiscard]] std::vector<int> candidates(const ResolvedModel& model, int sig) const;
  /// Flat index of a tuple of atom indices.
  [[nodiscard]] std::uint64_t tuple_index(const std::vector<int>& tuple) const;

  /// Instance described by a full assignment (1-based, index 0 ignored).
  [[nodiscard]] Instance decode(const ResolvedModel& model, const std::vector<bool>& assignment) const;
};

/// Per-sig bound after applying overrides; throws LangError(ScopeTooLarge).
Bounds compute_bounds(const ResolvedModel& model, const Scope& scope, int max_scope = kDefaultMaxScope);

}  // namespace a4f
