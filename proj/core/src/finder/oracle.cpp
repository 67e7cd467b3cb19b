#include "a4f/finder/oracle.hpp"

#include <algorithm>
#include <utility>

#include "a4f/finder/bounds.hpp"
#include "a4f/finder/evaluator.hpp"

namespace a4f {

OracleResult brute_force_oracle(const ResolvedModel& model, const ResolvedCommand& command,
                                std::size_t keep_instances) {
  Bounds b = compute_bounds(model, command.scope, kHardMaxScope);
  const int n = b.num_vars;
  if (n > kOracleMaxVars) {
    throw OracleTooLarge("oracle needs " + std::to_string(n) + " variables; the cap is " +
                         std::to_string(kOracleMaxVars));
  }

  // Implications x => y, attached to the later of the two variables.
  std::vector<std::vector<std::pair<int, int>>> checks(static_cast<std::size_t>(n) + 1);
  auto imply = [&](int x, int y) {
    if (x <= 0 || y < 0 || y == 0) return;
    checks[static_cast<std::size_t>(std::max(x, y))].emplace_back(x, y);
  };
  for (std::size_t a = 1; a < b.atoms.size(); ++a) {
    if (b.atom_top[a] == b.atom_top[a - 1]) imply(b.presence[a], b.presence[a - 1]);
  }
  for (std::size_t s = 0; s < model.sigs.size(); ++s) {
    if (model.sigs[s].is_top_level()) continue;
    auto parent = static_cast<std::size_t>(model.sigs[s].parent);
    for (std::size_t a = 0; a < b.atoms.size(); ++a) imply(b.membership[s][a], b.membership[parent][a]);
  }
  for (const auto& fb : b.fields) {
    const auto& cols = model.fields[static_cast<std::size_t>(fb.field)].columns;
    for (std::size_t t = 0; t < fb.tuples.size(); ++t) {
      for (std::size_t c = 0; c < cols.size(); ++c) {
        imply(fb.vars[t], b.membership[static_cast<std::size_t>(cols[c])][static_cast<std::size_t>(fb.tuples[t][c])]);
      }
    }
  }

  // Leaves are checked on an indexed instance whose atom ids are the
  // candidate atom positions; only accepted leaves are decoded to names.
  IndexedInstance leaf;
  leaf.set_atoms(model, b.atoms);
  leaf.sigs.resize(model.sigs.size());
  leaf.fields.resize(model.fields.size());
  leaf.has_sig.assign(model.sigs.size(), true);
  leaf.has_field.assign(model.fields.size(), true);
  auto holds = [](const std::vector<bool>& a, int var) { return var == 0 || (var > 0 && a[static_cast<std::size_t>(var)]); };

  OracleResult result;
  std::vector<bool> assignment(static_cast<std::size_t>(n) + 1, false);
  auto accept = [&] {
    leaf.universe.clear();
    for (std::size_t a = 0; a < b.atoms.size(); ++a) {
      if (holds(assignment, b.presence[a])) leaf.universe.push_back(a);
    }
    for (std::size_t s = 0; s < model.sigs.size(); ++s) {
      leaf.sigs[s].clear();
      for (std::size_t a = 0; a < b.atoms.size(); ++a) {
        if (holds(assignment, b.membership[s][a])) leaf.sigs[s].push_back(a);
      }
    }
    for (std::size_t f = 0; f < b.fields.size(); ++f) {
      const auto& fb = b.fields[f];
      leaf.fields[f].clear();
      for (std::size_t t = 0; t < fb.tuples.size(); ++t) {
        if (!holds(assignment, fb.vars[t])) continue;
        PackedTuple packed = 0;
        for (int atom : fb.tuples[t]) packed = (packed << 8) | static_cast<PackedTuple>(atom);
        leaf.fields[f].push_back(packed);
      }
      std::sort(leaf.fields[f].begin(), leaf.fields[f].end());
    }
    return instance_valid(model, command.scope, leaf) && Evaluator(model, leaf).matches(command);
  };
  auto visit = [&](auto&& self, int v) -> void {
    if (v > n) {
      if (!accept()) return;
      ++result.count;
      if (result.instances.size() < keep_instances) result.instances.push_back(b.decode(model, assignment));
      return;
    }
    for (bool value : {false, true}) {
      assignment[static_cast<std::size_t>(v)] = value;
      bool ok = std::all_of(checks[static_cast<std::size_t>(v)].begin(), checks[static_cast<std::size_t>(v)].end(),
                            [&](const auto& xy) {
                              return !assignment[static_cast<std::size_t>(xy.first)] ||
                                     assignment[static_cast<std::size_t>(xy.second)];
                            });
      if (ok) self(self, v + 1);
    }
    assignment[static_cast<std::size_t>(v)] = false;
  };
  visit(visit, 1);
  result.sat = result.count > 0;
  return result;
}

}  // namespace a4f
