#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "a4f/lang/error.hpp"

namespace a4f {

enum class Mult { Set, One, Lone, Some };

std::string_view to_string(Mult m);

// ---------------------------------------------------------------------------
// Expressions

enum class ExprKind {
  Name,     // unresolved identifier
  Var,      // bound variable; `index` is a model-unique variable id
  SigRef,   // resolved signature; `index` into ResolvedModel::sigs
  FieldRef, // resolved field; `index` into ResolvedModel::fields
  Univ,
  Iden,
  None,
  Transpose,
  Closure,
  ReflexiveClosure,
  Union,
  Diff,
  Intersect,
  Product,
  Join,
  BoxJoin,  // lhs[args...]; removed by the resolver
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  ExprKind kind = ExprKind::None;
  Span span;
  std::string name;
  int index = -1;
  ExprPtr lhs;
  ExprPtr rhs;
  std::vector<ExprPtr> args;
  /// Number of columns; 0 until resolved.
  int arity = 0;

  [[nodiscard]] bool is_unary_op() const {
    return kind == ExprKind::Transpose || kind == ExprKind::Closure ||
           kind == ExprKind::ReflexiveClosure;
  }
  [[nodiscard]] bool is_binary_op() const {
    return kind == ExprKind::Union || kind == ExprKind::Diff ||
           kind == ExprKind::Intersect || kind == ExprKind::Product ||
           kind == ExprKind::Join;
  }
};

// ---------------------------------------------------------------------------
// Formulas

enum class FormulaKind { Quant, Binary, Not, Compare, Mult, PredCall, Paren, Block };
enum class QuantKind { All, Some, No, Lone, One };
enum class BinaryOp { And, Or, Implies, Iff };
enum class CompareOp { In, Eq, Neq, NotIn };
enum class MultKind { Some, No, Lone, One };

struct QuantDecl {
  std::string var;
  int var_id = -1;
  ExprPtr bound;
  Span span;
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  FormulaKind kind = FormulaKind::Block;
  Span span;

  QuantKind quant = QuantKind::All;
  BinaryOp op = BinaryOp::And;
  CompareOp cmp = CompareOp::In;
  MultKind mult = MultKind::Some;

  std::vector<QuantDecl> decls;        // Quant
  FormulaPtr lhs;                      // Binary, Not, Paren, Quant body
  FormulaPtr rhs;                      // Binary
  ExprPtr left;                        // Compare, Mult
  ExprPtr right;                       // Compare
  std::string name;                    // PredCall
  std::vector<ExprPtr> args;           // PredCall
  std::vector<FormulaPtr> children;    // Block (empty block is true)
};

// Node builders used by the parser, resolver and tests.
ExprPtr make_name(std::string name, Span span = {});
ExprPtr make_unary(ExprKind kind, ExprPtr e, Span span = {});
ExprPtr make_binary(ExprKind kind, ExprPtr l, ExprPtr r, Span span = {});
FormulaPtr make_block(std::vector<FormulaPtr> children, Span span = {});
FormulaPtr make_not(FormulaPtr f, Span span = {});
FormulaPtr make_binary(BinaryOp op, FormulaPtr l, FormulaPtr r, Span span = {});

/// Structural equality ignoring spans, resolution annotations and `Paren`.
bool same_structure(const Expr& a, const Expr& b);
bool same_structure(const Formula& a, const Formula& b);

/// Fully parenthesised rendering, used in tests and debugging output.
std::string dump(const Expr& e);
std::string dump(const Formula& f);

// ---------------------------------------------------------------------------
// Paragraphs

struct FieldDecl {
  std::string name;
  /// Column signatures after the implicit owner column (1 or 2 entries).
  std::vector<std::string> columns;
  Mult range_mult = Mult::One;
  /// Arrow multiplicities (left, right) of a ternary field `A m->n B`.
  std::optional<std::pair<Mult, Mult>> arrow_mult;
  Span span;
};

struct SigDecl {
  std::string name;
  bool is_abstract = false;
  Mult mult = Mult::Set;
  std::optional<std::string> parent;
  std::vector<FieldDecl> fields;
  Span span;
};

struct PredParam {
  std::string name;
  ExprPtr type;
  Span span;
};

struct ScopeOverride {
  std::string sig;
  int bound = 0;
  bool exactly = false;
  Span span;

  friend bool operator==(const ScopeOverride& a, const ScopeOverride& b) {
    return a.sig == b.sig && a.bound == b.bound && a.exactly == b.exactly;
  }
};

struct Scope {
  static constexpr int kDefaultBound = 3;

  int default_bound = kDefaultBound;
  /// `for exactly N`: the default bound is exact for every unlisted sig.
  bool default_exactly = false;
  std::vector<ScopeOverride> overrides;

  friend bool operator==(const Scope&, const Scope&) = default;
};

enum class CommandKind { Run, Check };

struct Command {
  CommandKind kind = CommandKind::Run;
  std::string name;
  /// Named predicate or assertion; empty when the body is inline.
  std::string target;
  FormulaPtr body;
  Scope scope;
  std::optional<int> expect;
};

enum class ParagraphKind { SigDecl, Fact, Pred, Assert, RunCmd, CheckCmd };

std::string_view to_string(ParagraphKind kind);

struct Paragraph {
  ParagraphKind kind = ParagraphKind::Fact;
  /// Declared name; anonymous facts and commands get `fact$N`, `run$N` or
  /// `check$N`. For a sig paragraph declaring several sigs, the first one.
  std::string name;
  bool secret = false;
  Span span;
  /// Location of the `//SECRET` marker when `secret` is set.
  Span marker;

  std::vector<SigDecl> sigs;          // SigDecl
  std::vector<PredParam> params;      // Pred
  FormulaPtr body;                    // Fact, Pred, Assert
  Command command;                    // RunCmd, CheckCmd

  [[nodiscard]] bool is_command() const {
    return kind == ParagraphKind::RunCmd || kind == ParagraphKind::CheckCmd;
  }
  /// Every user-visible name this paragraph introduces: sigs and their fields,
  /// predicate/assertion/fact names, or the command name.
  [[nodiscard]] std::vector<std::string> declared_names() const;
};

struct SourceModel {
  std::string text;
  std::vector<Paragraph> paragraphs;

  [[nodiscard]] std::string_view source_of(const Paragraph& p) const {
    return std::string_view(text).substr(p.span.begin, p.span.size());
  }
};

}  // namespace a4f
