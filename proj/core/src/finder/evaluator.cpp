#include "a4f/finder/evaluator.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <unordered_map>

namespace a4f {

namespace {

constexpr PackedTuple mask(int columns) {
  return columns >= 8 ? ~PackedTuple{0} : (PackedTuple{1} << (8 * columns)) - 1;
}

int column(PackedTuple t, int arity, int i) {
  return static_cast<int>((t >> (8 * (arity - 1 - i))) & 0xffU);
}

void normalize(Relation& r) {
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
}

Relation unite(const Relation& a, const Relation& b) {
  Relation out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// `r` is sorted by its first column, so matches form a contiguous range.
Relation join(const Relation& l, const Relation& r, int ra) {
  Relation out;
  const int shift = 8 * (ra - 1);
  for (PackedTuple x : l) {
    PackedTuple key = x & 0xffU;
    auto lo = std::lower_bound(r.begin(), r.end(), key << shift);
    for (auto it = lo; it != r.end() && (*it >> shift) == key; ++it) {
      out.push_back(((x >> 8) << shift) | (*it & mask(ra - 1)));
    }
  }
  normalize(out);
  return out;
}

bool mult_ok(Mult m, std::size_t n) {
  switch (m) {
    case Mult::One: return n == 1;
    case Mult::Lone: return n <= 1;
    case Mult::Some: return n >= 1;
    case Mult::Set: return true;
  }
  return true;
}

bool contains(const Relation& r, PackedTuple t) { return std::binary_search(r.begin(), r.end(), t); }

bool subset(const Relation& a, const Relation& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

}  // namespace

void IndexedInstance::set_atoms(const ResolvedModel& model, std::vector<std::string> names) {
  if (names.size() > static_cast<std::size_t>(kMaxAtoms)) throw std::invalid_argument("too many atoms");
  atoms = std::move(names);
  atom_top.assign(atoms.size(), -1);
  atom_index.assign(atoms.size(), -1);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const std::string& a = atoms[i];
    auto dollar = a.rfind('$');
    if (dollar == std::string::npos || dollar + 1 == a.size() || a.size() - dollar > 4) continue;
    if (!std::all_of(a.begin() + static_cast<std::ptrdiff_t>(dollar) + 1, a.end(),
                     [](char c) { return c >= '0' && c <= '9'; })) {
      continue;
    }
    int top = model.find_sig(std::string_view(a).substr(0, dollar));
    if (top < 0 || !model.sigs[static_cast<std::size_t>(top)].is_top_level()) continue;
    atom_top[i] = top;
    atom_index[i] = std::stoi(a.substr(dollar + 1));
  }
}

IndexedInstance index_instance(const ResolvedModel& model, const Instance& instance) {
  IndexedInstance out;
  std::vector<std::string> names;
  std::unordered_map<std::string, int> ids;
  auto intern = [&](const std::string& a) {
    auto [it, fresh] = ids.emplace(a, static_cast<int>(names.size()));
    if (fresh) names.push_back(a);
    return static_cast<PackedTuple>(it->second);
  };
  for (const auto& a : instance.universe) {
    if (ids.count(a)) out.problems.push_back("duplicate atoms in universe");
    out.universe.push_back(intern(a));
  }
  for (const auto& [name, atoms] : instance.sigs) {
    for (const auto& a : atoms) intern(a);
  }
  for (const auto& [name, tuples] : instance.fields) {
    for (const auto& t : tuples) {
      for (const auto& a : t) intern(a);
    }
  }
  out.set_atoms(model, std::move(names));
  normalize(out.universe);

  out.sigs.resize(model.sigs.size());
  out.has_sig.assign(model.sigs.size(), false);
  for (std::size_t s = 0; s < model.sigs.size(); ++s) {
    auto it = instance.sigs.find(model.sigs[s].name);
    if (it == instance.sigs.end()) continue;
    out.has_sig[s] = true;
    for (const auto& a : it->second) out.sigs[s].push_back(static_cast<PackedTuple>(ids.at(a)));
    std::size_t n = out.sigs[s].size();
    normalize(out.sigs[s]);
    if (out.sigs[s].size() != n) out.problems.push_back("duplicate atoms in " + model.sigs[s].name);
  }
  out.fields.resize(model.fields.size());
  out.has_field.assign(model.fields.size(), false);
  for (std::size_t f = 0; f < model.fields.size(); ++f) {
    const FieldInfo& field = model.fields[f];
    auto it = instance.fields.find(field.name);
    if (it == instance.fields.end()) continue;
    out.has_field[f] = true;
    for (const auto& t : it->second) {
      if (t.size() != field.columns.size()) {
        out.problems.push_back("wrong arity in " + field.name);
        continue;
      }
      PackedTuple packed = 0;
      for (const auto& a : t) packed = (packed << 8) | static_cast<PackedTuple>(ids.at(a));
      out.fields[f].push_back(packed);
    }
    std::size_t n = out.fields[f].size();
    normalize(out.fields[f]);
    if (out.fields[f].size() != n) out.problems.push_back("duplicate tuple in " + field.name);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

struct Evaluator::Impl {
  const ResolvedModel& model;
  std::optional<IndexedInstance> owned;
  const IndexedInstance* inst = nullptr;
  std::unordered_map<std::string, int> ids;

  using Bindings = std::vector<int>;

  Impl(const ResolvedModel& m, const IndexedInstance* i) : model(m), inst(i) {}

  Relation eval(const Expr& e, Bindings& env) const;
  bool holds(const Formula& f, Bindings& env) const;
  void quantified(const Formula& f, std::size_t d, Bindings& env, int& count, bool& decided) const;

  Bindings bindings(const Env& env) {
    if (ids.empty()) {
      for (std::size_t i = 0; i < inst->atoms.size(); ++i) ids.emplace(inst->atoms[i], static_cast<int>(i));
    }
    Bindings out(static_cast<std::size_t>(model.var_count), -1);
    for (const auto& [var, atom] : env) {
      if (var < 0) continue;
      auto it = ids.find(atom);
      if (it == ids.end()) throw std::invalid_argument("atom " + atom + " is not in the instance");
      if (static_cast<std::size_t>(var) >= out.size()) out.resize(static_cast<std::size_t>(var) + 1, -1);
      out[static_cast<std::size_t>(var)] = it->second;
    }
    return out;
  }
};

Relation Evaluator::Impl::eval(const Expr& e, Bindings& env) const {
  if (e.arity < 1) throw std::logic_error("expression without an arity reached the evaluator");
  if (e.arity > IndexedInstance::kMaxArity) throw std::length_error("relation arity too large to evaluate");
  switch (e.kind) {
    case ExprKind::SigRef: return inst->sigs[static_cast<std::size_t>(e.index)];
    case ExprKind::FieldRef: return inst->fields[static_cast<std::size_t>(e.index)];
    case ExprKind::Var: {
      auto v = static_cast<std::size_t>(e.index);
      if (v >= env.size() || env[v] < 0) throw std::out_of_range("unbound variable " + e.name);
      return {static_cast<PackedTuple>(env[v])};
    }
    case ExprKind::Univ: return inst->universe;
    case ExprKind::Iden: {
      Relation out;
      for (PackedTuple a : inst->universe) out.push_back((a << 8) | a);
      return out;
    }
    case ExprKind::None: return {};
    case ExprKind::Transpose: {
      Relation out = eval(*e.lhs, env);
      for (auto& t : out) t = ((t & 0xffU) << 8) | (t >> 8);
      normalize(out);
      return out;
    }
    case ExprKind::Closure:
    case ExprKind::ReflexiveClosure: {
      Relation r = eval(*e.lhs, env);
      Relation out = r;
      for (;;) {
        Relation next = unite(out, join(out, r, 2));
        if (next.size() == out.size()) break;
        out = std::move(next);
      }
      if (e.kind == ExprKind::ReflexiveClosure) {
        Relation id;
        for (PackedTuple a : inst->universe) id.push_back((a << 8) | a);
        out = unite(out, id);
      }
      return out;
    }
    case ExprKind::Union: return unite(eval(*e.lhs, env), eval(*e.rhs, env));
    case ExprKind::Intersect: {
      Relation l = eval(*e.lhs, env);
      Relation r = eval(*e.rhs, env);
      Relation out;
      std::set_intersection(l.begin(), l.end(), r.begin(), r.end(), std::back_inserter(out));
      return out;
    }
    case ExprKind::Diff: {
      Relation l = eval(*e.lhs, env);
      Relation r = eval(*e.rhs, env);
      Relation out;
      std::set_difference(l.begin(), l.end(), r.begin(), r.end(), std::back_inserter(out));
      return out;
    }
    case ExprKind::Product: {
      Relation l = eval(*e.lhs, env);
      Relation r = eval(*e.rhs, env);
      const int shift = 8 * e.rhs->arity;
      Relation out;
      out.reserve(l.size() * r.size());
      for (PackedTuple x : l) {
        for (PackedTuple y : r) out.push_back((x << shift) | y);
      }
      return out;
    }
    case ExprKind::Join:
      return join(eval(*e.lhs, env), eval(*e.rhs, env), e.rhs->arity);
    case ExprKind::Name:
    case ExprKind::BoxJoin:
      break;
  }
  throw std::logic_error("unresolved expression reached the evaluator");
}

void Evaluator::Impl::quantified(const Formula& f, std::size_t d, Bindings& env, int& count, bool& decided) const {
  if (d == f.decls.size()) {
    bool body = holds(*f.lhs, env);
    if (f.quant == QuantKind::All) {
      if (!body) decided = true;
      return;
    }
    if (body) ++count;
    if ((f.quant == QuantKind::Some || f.quant == QuantKind::No) && count > 0) decided = true;
    if ((f.quant == QuantKind::Lone || f.quant == QuantKind::One) && count > 1) decided = true;
    return;
  }
  const QuantDecl& decl = f.decls[d];
  auto v = static_cast<std::size_t>(decl.var_id);
  if (v >= env.size()) env.resize(v + 1, -1);
  const int saved = env[v];
  for (PackedTuple t : eval(*decl.bound, env)) {
    env[v] = static_cast<int>(t);
    quantified(f, d + 1, env, count, decided);
    if (decided) break;
  }
  env[v] = saved;
}

bool Evaluator::Impl::holds(const Formula& f, Bindings& env) const {
  switch (f.kind) {
    case FormulaKind::Block:
      return std::all_of(f.children.begin(), f.children.end(), [&](const auto& ch) { return holds(*ch, env); });
    case FormulaKind::Paren: return holds(*f.lhs, env);
    case FormulaKind::Not: return !holds(*f.lhs, env);
    case FormulaKind::Binary: {
      bool l = holds(*f.lhs, env);
      switch (f.op) {
        case BinaryOp::And: return l && holds(*f.rhs, env);
        case BinaryOp::Or: return l || holds(*f.rhs, env);
        case BinaryOp::Implies: return !l || holds(*f.rhs, env);
        case BinaryOp::Iff: return l == holds(*f.rhs, env);
      }
      break;
    }
    case FormulaKind::Compare: {
      Relation l = eval(*f.left, env);
      Relation r = eval(*f.right, env);
      switch (f.cmp) {
        case CompareOp::In: return subset(l, r);
        case CompareOp::NotIn: return !subset(l, r);
        case CompareOp::Eq: return l == r;
        case CompareOp::Neq: return l != r;
      }
      break;
    }
    case FormulaKind::Mult: {
      std::size_t n = eval(*f.left, env).size();
      switch (f.mult) {
        case MultKind::Some: return n > 0;
        case MultKind::No: return n == 0;
        case MultKind::Lone: return n <= 1;
        case MultKind::One: return n == 1;
      }
      break;
    }
    case FormulaKind::Quant: {
      int count = 0;
      bool decided = false;
      quantified(f, 0, env, count, decided);
      switch (f.quant) {
        case QuantKind::All: return !decided;
        case QuantKind::Some: return count > 0;
        case QuantKind::No: return count == 0;
        case QuantKind::Lone: return count <= 1;
        case QuantKind::One: return count == 1;
      }
      break;
    }
    case FormulaKind::PredCall: break;
  }
  throw std::logic_error("unresolved formula reached the evaluator");
}

Evaluator::Evaluator(const ResolvedModel& model, const Instance& instance) : impl_(new Impl(model, nullptr)) {
  impl_->owned = index_instance(model, instance);
  impl_->inst = &*impl_->owned;
}

Evaluator::Evaluator(const ResolvedModel& model, const IndexedInstance& instance)
    : impl_(new Impl(model, &instance)) {}

Evaluator::~Evaluator() { delete impl_; }

TupleSet Evaluator::eval(const Expr& e, const Env& env) const {
  auto bindings = impl_->bindings(env);
  TupleSet out;
  for (PackedTuple t : impl_->eval(e, bindings)) {
    Tuple tuple;
    for (int i = 0; i < e.arity; ++i) {
      tuple.push_back(impl_->inst->atoms[static_cast<std::size_t>(column(t, e.arity, i))]);
    }
    out.insert(std::move(tuple));
  }
  return out;
}

bool Evaluator::holds(const Formula& f, const Env& env) const {
  auto bindings = impl_->bindings(env);
  return impl_->holds(f, bindings);
}

bool Evaluator::facts_hold() const {
  Impl::Bindings env(static_cast<std::size_t>(impl_->model.var_count), -1);
  return std::all_of(impl_->model.facts.begin(), impl_->model.facts.end(),
                     [&](const auto& f) { return impl_->holds(*f.body, env); });
}

bool Evaluator::matches(const ResolvedCommand& command) const {
  if (!facts_hold()) return false;
  Impl::Bindings env(static_cast<std::size_t>(impl_->model.var_count), -1);
  bool body = impl_->holds(*command.body, env);
  return command.kind == CommandKind::Run ? body : !body;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

// Reports into `problems`, or returns false at the first one when it is null.
bool check_instance(const ResolvedModel& model, const Scope& scope, const IndexedInstance& inst,
                    std::vector<std::string>* problems) {
  bool ok = true;
  auto report = [&](std::string msg) {
    ok = false;
    if (problems) problems->push_back(std::move(msg));
    return problems != nullptr;  // keep going only when collecting
  };
  for (const auto& p : inst.problems) {
    if (!report(p)) return false;
  }

  // Universe: canonical names `Top$i` forming a prefix 0..k-1 per top sig.
  for (PackedTuple a : inst.universe) {
    if (inst.atom_top[a] < 0 && !report("atom " + inst.atoms[a] + " does not name a top-level sig")) return false;
  }
  for (int top : model.top_level_sigs()) {
    const SigInfo& sig = model.sigs[static_cast<std::size_t>(top)];
    int bound = scope.default_bound;
    bool exactly = scope.default_exactly && sig.mult == Mult::Set;
    for (const auto& o : scope.overrides) {
      if (o.sig == sig.name) {
        bound = o.bound;
        exactly = o.exactly;
      }
    }
    Relation mine;
    std::vector<int> idx;
    for (PackedTuple a : inst.universe) {
      if (inst.atom_top[a] != top) continue;
      mine.push_back(a);
      idx.push_back(inst.atom_index[a]);
    }
    std::sort(idx.begin(), idx.end());
    int k = static_cast<int>(idx.size());
    if (k > bound && !report(sig.name + " exceeds its bound")) return false;
    if (exactly && k != bound && !report(sig.name + " misses its exact bound")) return false;
    if (k > 0 && (idx.front() != 0 || idx.back() != k - 1 || std::adjacent_find(idx.begin(), idx.end()) != idx.end()) &&
        !report(sig.name + " atoms are not a canonical prefix")) {
      return false;
    }
    if (mine != inst.sigs[static_cast<std::size_t>(top)] && !report(sig.name + " differs from its universe atoms")) {
      return false;
    }
  }

  for (std::size_t s = 0; s < model.sigs.size(); ++s) {
    const SigInfo& sig = model.sigs[s];
    const Relation& mine = inst.sigs[s];
    if (!inst.has_sig[s] && !report("missing sig " + sig.name)) return false;
    if (!mult_ok(sig.mult, mine.size()) && !report(sig.name + " violates its multiplicity")) return false;
    if (!sig.is_top_level() && !subset(mine, inst.sigs[static_cast<std::size_t>(sig.parent)]) &&
        !report(sig.name + " is not within its parent")) {
      return false;
    }
    if (sig.children.empty()) continue;
    Relation covered;
    std::size_t total = 0;
    for (int ch : sig.children) {
      const Relation& c = inst.sigs[static_cast<std::size_t>(ch)];
      total += c.size();
      covered = unite(covered, c);
    }
    if (covered.size() != total && !report("sub-sigs of " + sig.name + " overlap")) return false;
    if (sig.is_abstract && !subset(mine, covered) &&
        !report("abstract " + sig.name + " has atoms outside its sub-sigs")) {
      return false;
    }
  }

  for (std::size_t f = 0; f < model.fields.size(); ++f) {
    const FieldInfo& field = model.fields[f];
    if (!inst.has_field[f]) {
      if (!report("missing field " + field.name)) return false;
      continue;
    }
    const int arity = field.arity();
    const Relation& tuples = inst.fields[f];
    std::vector<const Relation*> cols;
    for (int c : field.columns) cols.push_back(&inst.sigs[static_cast<std::size_t>(c)]);
    for (PackedTuple t : tuples) {
      for (int i = 0; i < arity; ++i) {
        if (!contains(*cols[static_cast<std::size_t>(i)], static_cast<PackedTuple>(column(t, arity, i))) &&
            !report(field.name + " tuple outside its column types")) {
          return false;
        }
      }
    }
    for (PackedTuple owner : *cols[0]) {
      if (arity == 2) {
        std::size_t n = 0;
        for (PackedTuple t : tuples) n += (t >> 8) == owner;
        if (!mult_ok(field.range_mult, n) && !report(field.name + " violates its multiplicity")) return false;
        continue;
      }
      if (arity != 3) continue;
      for (PackedTuple mid : *cols[1]) {
        std::size_t n = 0;
        for (PackedTuple t : tuples) n += (t >> 8) == ((owner << 8) | mid);
        if (!mult_ok(field.right_mult, n) && !report(field.name + " violates its right multiplicity")) return false;
      }
      for (PackedTuple last : *cols[2]) {
        std::size_t n = 0;
        for (PackedTuple t : tuples) n += (t >> 16) == owner && (t & 0xffU) == last;
        if (!mult_ok(field.left_mult, n) && !report(field.name + " violates its left multiplicity")) return false;
      }
    }
  }
  return ok;
}

}  // namespace

std::vector<std::string> validate_instance(const ResolvedModel& model, const Scope& scope,
                                           const Instance& instance) {
  std::vector<std::string> problems;
  IndexedInstance inst;
  try {
    inst = index_instance(model, instance);
  } catch (const std::exception& e) {
    return {e.what()};
  }
  check_instance(model, scope, inst, &problems);
  return problems;
}

bool instance_valid(const ResolvedModel& model, const Scope& scope, const IndexedInstance& instance) {
  return check_instance(model, scope, instance, nullptr);
}

bool instance_matches(const ResolvedModel& model, const ResolvedCommand& command, const Instance& instance) {
  return Evaluator(model, instance).matches(command);
}

}  // namespace a4f
