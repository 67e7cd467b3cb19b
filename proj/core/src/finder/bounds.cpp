#include "a4f/finder/bounds.hpp"

#include <algorithm>

namespace a4f {

std::vector<int> Bounds::candidates(const ResolvedModel& model, int sig) const {
  std::vector<int> out;
  const auto& row = membership[static_cast<std::size_t>(sig)];
  for (std::size_t a = 0; a < row.size(); ++a) {
    if (row[a] >= 0) out.push_back(static_cast<int>(a));
  }
  (void)model;
  return out;
}

std::uint64_t Bounds::tuple_index(const std::vector<int>& tuple) const {
  std::uint64_t idx = 0;
  for (int a : tuple) idx = idx * atoms.size() + static_cast<std::uint64_t>(a);
  return idx;
}

Instance Bounds::decode(const ResolvedModel& model, const std::vector<bool>& assignment) const {
  auto holds = [&](int v) { return v == 0 || (v > 0 && assignment.at(static_cast<std::size_t>(v))); };
  Instance out;
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    if (holds(presence[a])) out.universe.push_back(atoms[a]);
  }
  for (std::size_t s = 0; s < model.sigs.size(); ++s) {
    auto& list = out.sigs[model.sigs[s].name];
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      int v = membership[s][a];
      if (v >= 0 && holds(v)) list.push_back(atoms[a]);
    }
  }
  for (const auto& fb : fields) {
    auto& list = out.fields[model.fields[static_cast<std::size_t>(fb.field)].name];
    for (std::size_t t = 0; t < fb.tuples.size(); ++t) {
      if (!holds(fb.vars[t])) continue;
      Tuple tuple;
      for (int a : fb.tuples[t]) tuple.push_back(atoms[static_cast<std::size_t>(a)]);
      list.push_back(std::move(tuple));
    }
  }
  return out;
}

namespace {

void product(const std::vector<std::vector<int>>& columns, std::size_t col, std::vector<int>& cur,
             std::vector<std::vector<int>>& out) {
  if (col == columns.size()) {
    out.push_back(cur);
    return;
  }
  for (int a : columns[col]) {
    cur.push_back(a);
    product(columns, col + 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace

Bounds compute_bounds(const ResolvedModel& model, const Scope& scope, int max_scope) {
  max_scope = std::clamp(max_scope, 1, kHardMaxScope);
  Bounds b;
  int next_var = 1;

  for (int top : model.top_level_sigs()) {
    const SigInfo& sig = model.sigs[static_cast<std::size_t>(top)];
    Bounds::TopSig ts;
    ts.sig = top;
    ts.bound = scope.default_bound;
    ts.exactly = scope.default_exactly && sig.mult == Mult::Set;
    Span span{};
    for (const auto& o : scope.overrides) {
      if (o.sig == sig.name) {
        ts.bound = o.bound;
        ts.exactly = o.exactly;
        span = o.span;
      }
    }
    if (ts.bound > max_scope) {
      throw LangError(LangErrorCode::ScopeTooLarge, span,
                      "scope " + std::to_string(ts.bound) + " for '" + sig.name +
                          "' exceeds the maximum of " + std::to_string(max_scope));
    }
    ts.first_atom = static_cast<int>(b.atoms.size());
    for (int i = 0; i < ts.bound; ++i) {
      b.atoms.push_back(sig.name + "$" + std::to_string(i));
      b.atom_top.push_back(top);
      b.presence.push_back(ts.exactly ? 0 : next_var++);
    }
    b.tops.push_back(ts);
  }

  const std::size_t n = b.atoms.size();
  b.membership.assign(model.sigs.size(), std::vector<int>(n, -1));
  for (std::size_t s = 0; s < model.sigs.size(); ++s) {
    const SigInfo& sig = model.sigs[s];
    for (std::size_t a = 0; a < n; ++a) {
      if (b.atom_top[a] != sig.top) continue;
      b.membership[s][a] = sig.is_top_level() ? b.presence[a] : next_var++;
    }
  }

  for (std::size_t f = 0; f < model.fields.size(); ++f) {
    Bounds::FieldBounds fb;
    fb.field = static_cast<int>(f);
    std::vector<std::vector<int>> columns;
    for (int col : model.fields[f].columns) columns.push_back(b.candidates(model, col));
    std::vector<int> cur;
    product(columns, 0, cur, fb.tuples);
    for (std::size_t t = 0; t < fb.tuples.size(); ++t) fb.vars.push_back(next_var++);
    b.fields.push_back(std::move(fb));
  }
  b.num_vars = next_var - 1;
  return b;
}

}  // namespace a4f
