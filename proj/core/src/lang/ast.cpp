#include "a4f/lang/ast.hpp"

namespace a4f {

std::string_view to_string(Mult m) {
  switch (m) {
    case Mult::Set: return "set";
    case Mult::One: return "one";
    case Mult::Lone: return "lone";
    case Mult::Some: return "some";
  }
  return "set";
}

std::string_view to_string(ParagraphKind kind) {
  switch (kind) {
    case ParagraphKind::SigDecl: return "sig";
    case ParagraphKind::Fact: return "fact";
    case ParagraphKind::Pred: return "pred";
    case ParagraphKind::Assert: return "assert";
    case ParagraphKind::RunCmd: return "run";
    case ParagraphKind::CheckCmd: return "check";
  }
  return "?";
}

ExprPtr make_name(std::string name, Span span) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Name;
  e->name = std::move(name);
  e->span = span;
  return e;
}

ExprPtr make_unary(ExprKind kind, ExprPtr operand, Span span) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->lhs = std::move(operand);
  e->span = span;
  return e;
}

ExprPtr make_binary(ExprKind kind, ExprPtr l, ExprPtr r, Span span) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->lhs = std::move(l);
  e->rhs = std::move(r);
  e->span = span;
  return e;
}

FormulaPtr make_block(std::vector<FormulaPtr> children, Span span) {
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Block;
  f->children = std::move(children);
  f->span = span;
  return f;
}

FormulaPtr make_not(FormulaPtr inner, Span span) {
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Not;
  f->lhs = std::move(inner);
  f->span = span;
  return f;
}

FormulaPtr make_binary(BinaryOp op, FormulaPtr l, FormulaPtr r, Span span) {
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Binary;
  f->op = op;
  f->lhs = std::move(l);
  f->rhs = std::move(r);
  f->span = span;
  return f;
}

namespace {

bool same_ptr(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return same_structure(*a, *b);
}

bool same_ptr(const FormulaPtr& a, const FormulaPtr& b) {
  if (!a || !b) return !a && !b;
  return same_structure(*a, *b);
}

const Formula& strip_parens(const Formula& f) {
  const Formula* p = &f;
  while (p->kind == FormulaKind::Paren) p = p->lhs.get();
  return *p;
}

std::string_view expr_op(ExprKind k) {
  switch (k) {
    case ExprKind::Transpose: return "~";
    case ExprKind::Closure: return "^";
    case ExprKind::ReflexiveClosure: return "*";
    case ExprKind::Union: return "+";
    case ExprKind::Diff: return "-";
    case ExprKind::Intersect: return "&";
    case ExprKind::Product: return "->";
    case ExprKind::Join: return ".";
    default: return "?";
  }
}

std::string_view quant_name(QuantKind q) {
  switch (q) {
    case QuantKind::All: return "all";
    case QuantKind::Some: return "some";
    case QuantKind::No: return "no";
    case QuantKind::Lone: return "lone";
    case QuantKind::One: return "one";
  }
  return "?";
}

std::string_view mult_name(MultKind m) {
  switch (m) {
    case MultKind::Some: return "some";
    case MultKind::No: return "no";
    case MultKind::Lone: return "lone";
    case MultKind::One: return "one";
  }
  return "?";
}

std::string_view binary_name(BinaryOp op) {
  switch (op) {
    case BinaryOp::And: return "and";
    case BinaryOp::Or: return "or";
    case BinaryOp::Implies: return "implies";
    case BinaryOp::Iff: return "iff";
  }
  return "?";
}

std::string_view compare_name(CompareOp op) {
  switch (op) {
    case CompareOp::In: return "in";
    case CompareOp::Eq: return "=";
    case CompareOp::Neq: return "!=";
    case CompareOp::NotIn: return "!in";
  }
  return "?";
}

}  // namespace

bool same_structure(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprKind::Name:
    case ExprKind::SigRef:
    case ExprKind::FieldRef:
    case ExprKind::Var:
      return a.name == b.name;
    case ExprKind::Univ:
    case ExprKind::Iden:
    case ExprKind::None:
      return true;
    case ExprKind::BoxJoin:
      if (a.args.size() != b.args.size() || !same_ptr(a.lhs, b.lhs)) return false;
      for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (!same_ptr(a.args[i], b.args[i])) return false;
      }
      return true;
    default:
      return same_ptr(a.lhs, b.lhs) && same_ptr(a.rhs, b.rhs);
  }
}

bool same_structure(const Formula& fa, const Formula& fb) {
  const Formula& a = strip_parens(fa);
  const Formula& b = strip_parens(fb);
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case FormulaKind::Quant:
      if (a.quant != b.quant || a.decls.size() != b.decls.size()) return false;
      for (std::size_t i = 0; i < a.decls.size(); ++i) {
        if (a.decls[i].var != b.decls[i].var ||
            !same_ptr(a.decls[i].bound, b.decls[i].bound)) {
          return false;
        }
      }
      return same_ptr(a.lhs, b.lhs);
    case FormulaKind::Binary:
      return a.op == b.op && same_ptr(a.lhs, b.lhs) && same_ptr(a.rhs, b.rhs);
    case FormulaKind::Not:
      return same_ptr(a.lhs, b.lhs);
    case FormulaKind::Compare:
      return a.cmp == b.cmp && same_ptr(a.left, b.left) && same_ptr(a.right, b.right);
    case FormulaKind::Mult:
      return a.mult == b.mult && same_ptr(a.left, b.left);
    case FormulaKind::PredCall:
      if (a.name != b.name || a.args.size() != b.args.size()) return false;
      for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (!same_ptr(a.args[i], b.args[i])) return false;
      }
      return true;
    case FormulaKind::Block:
      if (a.children.size() != b.children.size()) return false;
      for (std::size_t i = 0; i < a.children.size(); ++i) {
        if (!same_ptr(a.children[i], b.children[i])) return false;
      }
      return true;
    case FormulaKind::Paren:
      break;
  }
  return false;
}

std::string dump(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Name:
    case ExprKind::Var:
    case ExprKind::SigRef:
    case ExprKind::FieldRef:
      return e.name;
    case ExprKind::Univ: return "univ";
    case ExprKind::Iden: return "iden";
    case ExprKind::None: return "none";
    case ExprKind::BoxJoin: {
      std::string s = "(box " + dump(*e.lhs);
      for (const auto& arg : e.args) s += " " + dump(*arg);
      return s + ")";
    }
    default:
      break;
  }
  if (e.is_unary_op()) return "(" + std::string(expr_op(e.kind)) + dump(*e.lhs) + ")";
  return "(" + dump(*e.lhs) + " " + std::string(expr_op(e.kind)) + " " + dump(*e.rhs) + ")";
}

std::string dump(const Formula& f) {
  switch (f.kind) {
    case FormulaKind::Quant: {
      std::string s = "(" + std::string(quant_name(f.quant));
      for (std::size_t i = 0; i < f.decls.size(); ++i) {
        s += (i == 0 ? " " : ", ") + f.decls[i].var + ": " + dump(*f.decls[i].bound);
      }
      return s + " | " + dump(*f.lhs) + ")";
    }
    case FormulaKind::Binary:
      return "(" + dump(*f.lhs) + " " + std::string(binary_name(f.op)) + " " + dump(*f.rhs) + ")";
    case FormulaKind::Not:
      return "(not " + dump(*f.lhs) + ")";
    case FormulaKind::Compare:
      return "(" + dump(*f.left) + " " + std::string(compare_name(f.cmp)) + " " +
             dump(*f.right) + ")";
    case FormulaKind::Mult:
      return "(" + std::string(mult_name(f.mult)) + " " + dump(*f.left) + ")";
    case FormulaKind::PredCall: {
      std::string s = f.name + "[";
      for (std::size_t i = 0; i < f.args.size(); ++i) {
        s += (i == 0 ? "" : ", ") + dump(*f.args[i]);
      }
      return s + "]";
    }
    case FormulaKind::Paren:
      return dump(*f.lhs);
    case FormulaKind::Block: {
      std::string s = "{";
      for (std::size_t i = 0; i < f.children.size(); ++i) {
        s += (i == 0 ? "" : " ") + dump(*f.children[i]);
      }
      return s + "}";
    }
  }
  return "?";
}

std::vector<std::string> Paragraph::declared_names() const {
  std::vector<std::string> names;
  switch (kind) {
    case ParagraphKind::SigDecl:
      for (const auto& sig : sigs) {
        names.push_back(sig.name);
        for (const auto& field : sig.fields) names.push_back(field.name);
      }
      break;
    case ParagraphKind::RunCmd:
    case ParagraphKind::CheckCmd:
      names.push_back(command.name);
      break;
    default:
      names.push_back(name);
      break;
  }
  return names;
}

}  // namespace a4f
