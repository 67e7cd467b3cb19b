#include "a4f/finder/translator.hpp"

#include <stdexcept>
#include <unordered_map>

#include "a4f/finder/budget.hpp"

namespace a4f {

namespace {

BoolRef lit(Circuit& c, int var) {
  if (var < 0) return Circuit::kFalse;
  return var == 0 ? Circuit::kTrue : c.var(var);
}

BoolRef multiplicity(Circuit& c, Mult m, const std::vector<BoolRef>& xs) {
  switch (m) {
    case Mult::One: return c.exactly_one(xs);
    case Mult::Lone: return c.at_most_one(xs);
    case Mult::Some: return c.or_(xs);
    case Mult::Set: break;
  }
  return Circuit::kTrue;
}

class Translator {
 public:
  Translator(Circuit& c, const ResolvedModel& m, const Bounds& b, BudgetMeter* meter)
      : c_(c), m_(m), b_(b), meter_(meter), n_(b.atoms.size()) {}

  BoolMatrix expr(const Expr& e) {
    switch (e.kind) {
      case ExprKind::SigRef: {
        BoolMatrix out;
        const auto& row = b_.membership[static_cast<std::size_t>(e.index)];
        for (std::size_t a = 0; a < n_; ++a) {
          if (row[a] >= 0) out.cells.emplace(a, lit(c_, row[a]));
        }
        return out;
      }
      case ExprKind::FieldRef: {
        const auto& fb = b_.fields[static_cast<std::size_t>(e.index)];
        BoolMatrix out{static_cast<int>(m_.fields[static_cast<std::size_t>(e.index)].columns.size()), {}};
        for (std::size_t t = 0; t < fb.tuples.size(); ++t) {
          out.cells.emplace(b_.tuple_index(fb.tuples[t]), c_.var(fb.vars[t]));
        }
        return out;
      }
      case ExprKind::Var: {
        auto it = env_.find(e.index);
        if (it == env_.end()) throw std::logic_error("unbound variable '" + e.name + "'");
        BoolMatrix out;
        out.cells.emplace(it->second, Circuit::kTrue);
        return out;
      }
      case ExprKind::Univ: {
        BoolMatrix out;
        for (std::size_t a = 0; a < n_; ++a) out.cells.emplace(a, lit(c_, b_.presence[a]));
        return out;
      }
      case ExprKind::Iden: return iden();
      case ExprKind::None: return BoolMatrix{};
      case ExprKind::Transpose: {
        BoolMatrix in = expr(*e.lhs);
        BoolMatrix out{2, {}};
        for (const auto& [idx, g] : in.cells) out.cells.emplace((idx % n_) * n_ + idx / n_, g);
        return out;
      }
      case ExprKind::Closure: return closure(expr(*e.lhs));
      case ExprKind::ReflexiveClosure: return unite(closure(expr(*e.lhs)), iden());
      case ExprKind::Union: return unite(expr(*e.lhs), expr(*e.rhs));
      case ExprKind::Intersect: {
        BoolMatrix l = expr(*e.lhs);
        BoolMatrix r = expr(*e.rhs);
        BoolMatrix out{l.arity, {}};
        for (const auto& [idx, g] : l.cells) {
          auto it = r.cells.find(idx);
          if (it != r.cells.end()) put(out, idx, c_.and_(g, it->second));
        }
        return out;
      }
      case ExprKind::Diff: {
        BoolMatrix l = expr(*e.lhs);
        BoolMatrix r = expr(*e.rhs);
        BoolMatrix out{l.arity, {}};
        for (const auto& [idx, g] : l.cells) {
          auto it = r.cells.find(idx);
          put(out, idx, it == r.cells.end() ? g : c_.and_(g, !it->second));
        }
        return out;
      }
      case ExprKind::Product: {
        BoolMatrix l = expr(*e.lhs);
        BoolMatrix r = expr(*e.rhs);
        BoolMatrix out{l.arity + r.arity, {}};
        std::uint64_t shift = power(r.arity);
        for (const auto& [li, lg] : l.cells) {
          for (const auto& [ri, rg] : r.cells) put(out, li * shift + ri, c_.and_(lg, rg));
        }
        return out;
      }
      case ExprKind::Join: return join(expr(*e.lhs), expr(*e.rhs));
      case ExprKind::Name:
      case ExprKind::BoxJoin:
        break;
    }
    throw std::logic_error("unresolved expression reached the translator");
  }

  BoolRef formula(const Formula& f) {
    switch (f.kind) {
      case FormulaKind::Block: {
        std::vector<BoolRef> xs;
        for (const auto& ch : f.children) xs.push_back(formula(*ch));
        return c_.and_(std::move(xs));
      }
      case FormulaKind::Paren: return formula(*f.lhs);
      case FormulaKind::Not: return !formula(*f.lhs);
      case FormulaKind::Binary: {
        BoolRef l = formula(*f.lhs);
        BoolRef r = formula(*f.rhs);
        switch (f.op) {
          case BinaryOp::And: return c_.and_(l, r);
          case BinaryOp::Or: return c_.or_(l, r);
          case BinaryOp::Implies: return c_.implies(l, r);
          case BinaryOp::Iff: return c_.iff(l, r);
        }
        break;
      }
      case FormulaKind::Compare: {
        BoolMatrix l = expr(*f.left);
        BoolMatrix r = expr(*f.right);
        switch (f.cmp) {
          case CompareOp::In: return subset(l, r);
          case CompareOp::NotIn: return !subset(l, r);
          case CompareOp::Eq: return c_.and_(subset(l, r), subset(r, l));
          case CompareOp::Neq: return !c_.and_(subset(l, r), subset(r, l));
        }
        break;
      }
      case FormulaKind::Mult: {
        BoolMatrix m = expr(*f.left);
        std::vector<BoolRef> xs;
        for (const auto& [idx, g] : m.cells) xs.push_back(g);
        switch (f.mult) {
          case MultKind::Some: return c_.or_(xs);
          case MultKind::No: return !c_.or_(xs);
          case MultKind::Lone: return c_.at_most_one(xs);
          case MultKind::One: return c_.exactly_one(xs);
        }
        break;
      }
      case FormulaKind::Quant: return quantifier(f);
      case FormulaKind::PredCall: break;
    }
    throw std::logic_error("unresolved formula reached the translator");
  }

 private:
  void put(BoolMatrix& m, std::uint64_t idx, BoolRef g) {
    if (!g.is_false()) m.cells.emplace(idx, g);
  }

  std::uint64_t power(int k) const {
    std::uint64_t p = 1;
    for (int i = 0; i < k; ++i) p *= n_;
    return p;
  }

  BoolMatrix iden() {
    BoolMatrix out{2, {}};
    for (std::size_t a = 0; a < n_; ++a) out.cells.emplace(a * n_ + a, lit(c_, b_.presence[a]));
    return out;
  }

  BoolMatrix unite(const BoolMatrix& l, const BoolMatrix& r) {
    BoolMatrix out{l.arity, l.cells};
    for (const auto& [idx, g] : r.cells) {
      auto [it, inserted] = out.cells.emplace(idx, g);
      if (!inserted) it->second = c_.or_(it->second, g);
    }
    return out;
  }

  BoolMatrix join(const BoolMatrix& l, const BoolMatrix& r) {
    BoolMatrix out{l.arity + r.arity - 2, {}};
    const std::uint64_t span = power(r.arity - 1);
    std::map<std::uint64_t, std::vector<BoolRef>> acc;
    for (const auto& [li, lg] : l.cells) {
      std::uint64_t mid = li % n_;
      std::uint64_t prefix = li / n_;
      auto it = r.cells.lower_bound(mid * span);
      auto end = r.cells.lower_bound((mid + 1) * span);
      for (; it != end; ++it) {
        acc[prefix * span + (it->first - mid * span)].push_back(c_.and_(lg, it->second));
      }
    }
    for (auto& [idx, xs] : acc) put(out, idx, c_.or_(std::move(xs)));
    return out;
  }

  BoolMatrix closure(BoolMatrix r) {
    std::size_t reach = 1;
    while (reach < n_) {
      r = unite(r, join(r, r));
      reach *= 2;
      if (meter_) meter_->poll();
    }
    return r;
  }

  BoolRef subset(const BoolMatrix& l, const BoolMatrix& r) {
    std::vector<BoolRef> xs;
    for (const auto& [idx, g] : l.cells) {
      auto it = r.cells.find(idx);
      xs.push_back(c_.implies(g, it == r.cells.end() ? Circuit::kFalse : it->second));
    }
    return c_.and_(std::move(xs));
  }

  // Collects (guard, body) for every binding of the declarations.
  void expand(const Formula& f, std::size_t d, BoolRef guard,
              std::vector<std::pair<BoolRef, BoolRef>>& out) {
    if (d == f.decls.size()) {
      out.emplace_back(guard, formula(*f.lhs));
      return;
    }
    const QuantDecl& decl = f.decls[d];
    BoolMatrix bound = expr(*decl.bound);
    for (const auto& [atom, g] : bound.cells) {
      if (meter_) meter_->poll();
      env_[decl.var_id] = atom;
      expand(f, d + 1, c_.and_(guard, g), out);
    }
    env_.erase(decl.var_id);
  }

  BoolRef quantifier(const Formula& f) {
    std::vector<std::pair<BoolRef, BoolRef>> cases;
    expand(f, 0, Circuit::kTrue, cases);
    std::vector<BoolRef> xs;
    if (f.quant == QuantKind::All) {
      for (auto [g, body] : cases) xs.push_back(c_.implies(g, body));
      return c_.and_(std::move(xs));
    }
    for (auto [g, body] : cases) xs.push_back(c_.and_(g, body));
    switch (f.quant) {
      case QuantKind::Some: return c_.or_(xs);
      case QuantKind::No: return !c_.or_(xs);
      case QuantKind::Lone: return c_.at_most_one(xs);
      case QuantKind::One: return c_.exactly_one(xs);
      case QuantKind::All: break;
    }
    return Circuit::kTrue;
  }

  Circuit& c_;
  const ResolvedModel& m_;
  const Bounds& b_;
  BudgetMeter* meter_;
  std::size_t n_;
  std::unordered_map<int, std::uint64_t> env_;
};

}  // namespace

BoolRef structural_constraints(Circuit& c, const ResolvedModel& model, const Bounds& b) {
  std::vector<BoolRef> xs;
  const std::size_t n = b.atoms.size();

  // Present atoms form a prefix of each top-level sig's candidates.
  for (std::size_t a = 1; a < n; ++a) {
    if (b.atom_top[a] == b.atom_top[a - 1]) {
      xs.push_back(c.implies(lit(c, b.presence[a]), lit(c, b.presence[a - 1])));
    }
  }

  for (std::size_t s = 0; s < model.sigs.size(); ++s) {
    const SigInfo& sig = model.sigs[s];
    std::vector<BoolRef> members;
    for (std::size_t a = 0; a < n; ++a) {
      if (b.membership[s][a] >= 0) members.push_back(lit(c, b.membership[s][a]));
    }
    xs.push_back(multiplicity(c, sig.mult, members));
    for (std::size_t a = 0; a < n; ++a) {
      int self = b.membership[s][a];
      if (self < 0) continue;
      if (!sig.is_top_level()) {
        xs.push_back(c.implies(lit(c, self), lit(c, b.membership[static_cast<std::size_t>(sig.parent)][a])));
      }
      if (sig.children.empty()) continue;
      std::vector<BoolRef> kids;
      for (int ch : sig.children) kids.push_back(lit(c, b.membership[static_cast<std::size_t>(ch)][a]));
      xs.push_back(c.at_most_one(kids));
      if (sig.is_abstract) xs.push_back(c.implies(lit(c, self), c.or_(kids)));
    }
  }

  for (const auto& fb : b.fields) {
    const FieldInfo& field = model.fields[static_cast<std::size_t>(fb.field)];
    auto member = [&](std::size_t col, int atom) {
      return lit(c, b.membership[static_cast<std::size_t>(field.columns[col])][static_cast<std::size_t>(atom)]);
    };
    for (std::size_t t = 0; t < fb.tuples.size(); ++t) {
      std::vector<BoolRef> typing;
      for (std::size_t col = 0; col < fb.tuples[t].size(); ++col) typing.push_back(member(col, fb.tuples[t][col]));
      xs.push_back(c.implies(c.var(fb.vars[t]), c.and_(std::move(typing))));
    }
    // Group tuple variables by owner atom, then by the remaining columns.
    std::map<int, std::map<int, std::vector<BoolRef>>> by_mid;   // owner -> col1 -> over col2
    std::map<int, std::map<int, std::vector<BoolRef>>> by_last;  // owner -> col2 -> over col1
    std::map<int, std::vector<BoolRef>> by_owner;
    for (std::size_t t = 0; t < fb.tuples.size(); ++t) {
      const auto& tup = fb.tuples[t];
      BoolRef v = c.var(fb.vars[t]);
      by_owner[tup[0]].push_back(v);
      if (tup.size() == 3) {
        by_mid[tup[0]][tup[1]].push_back(v);
        by_last[tup[0]][tup[2]].push_back(v);
      }
    }
    for (int owner : b.candidates(model, field.columns[0])) {
      BoolRef guard = member(0, owner);
      if (field.arity() == 2) {
        xs.push_back(c.implies(guard, multiplicity(c, field.range_mult, by_owner[owner])));
        continue;
      }
      for (int mid : b.candidates(model, field.columns[1])) {
        xs.push_back(c.implies(c.and_(guard, member(1, mid)),
                               multiplicity(c, field.right_mult, by_mid[owner][mid])));
      }
      for (int last : b.candidates(model, field.columns[2])) {
        xs.push_back(c.implies(c.and_(guard, member(2, last)),
                               multiplicity(c, field.left_mult, by_last[owner][last])));
      }
    }
  }
  return c.and_(std::move(xs));
}

Translation translate(const ResolvedModel& model, const ResolvedCommand& command, Bounds bounds,
                      BudgetMeter* meter) {
  std::size_t cap = meter ? meter->budget().max_circuit_nodes : 0;
  Translation out{std::move(bounds), Circuit(meter, cap), Circuit::kTrue};
  Translator tr(out.circuit, model, out.bounds, meter);
  std::vector<BoolRef> xs{structural_constraints(out.circuit, model, out.bounds)};
  for (const auto& fact : model.facts) xs.push_back(tr.formula(*fact.body));
  BoolRef body = tr.formula(*command.body);
  xs.push_back(command.kind == CommandKind::Run ? body : !body);
  out.root = out.circuit.and_(std::move(xs));
  return out;
}

BoolRef translate_formula(Circuit& circuit, const ResolvedModel& model, const Bounds& bounds,
                          const Formula& formula, BudgetMeter* meter) {
  return Translator(circuit, model, bounds, meter).formula(formula);
}

BoolMatrix translate_expr(Circuit& circuit, const ResolvedModel& model, const Bounds& bounds,
                          const Expr& expr, BudgetMeter* meter) {
  return Translator(circuit, model, bounds, meter).expr(expr);
}

}  // namespace a4f
