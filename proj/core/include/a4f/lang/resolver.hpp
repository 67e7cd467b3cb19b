#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "a4f/lang/ast.hpp"

namespace a4f {

struct SigInfo {
  std::string name;
  bool is_abstract = false;
  Mult mult = Mult::Set;
  int parent = -1;
  std::vector<int> children;
  /// Top-level ancestor (itself for a top-level sig).
  int top = -1;
  Span span;

  [[nodiscard]] bool is_top_level() const { return parent < 0; }
};

struct FieldInfo {
  std::string name;
  int owner = -1;
  /// Column signatures including the owner as column 0.
  std::vector<int> columns;
  /// Multiplicity of `f: m B`; `Set` for ternary fields.
  Mult range_mult = Mult::One;
  /// Arrow multiplicities of a ternary field `f: B l->r C`.
  Mult left_mult = Mult::Set;
  Mult right_mult = Mult::Set;
  Span span;

  [[nodiscard]] int arity() const { return static_cast<int>(columns.size()); }
};

struct NamedFormula {
  std::string name;
  FormulaPtr body;
  bool secret = false;
  Span span;
};

struct ResolvedCommand {
  std::string name;
  CommandKind kind = CommandKind::Run;
  /// Formula to satisfy (run) or the assertion to refute (check); predicate
  /// calls are inlined and run-target parameters are existentially closed.
  FormulaPtr body;
  Scope scope;
  bool secret = false;
  Span span;
};

/// Symbol table plus fully resolved, arity-annotated formulas.
///
/// Signatures and fields are ordered by name so that the canonical variable
/// numbering depends on the declarations, not on paragraph order.
struct ResolvedModel {
  std::vector<SigInfo> sigs;
  std::vector<FieldInfo> fields;
  std::vector<NamedFormula> facts;
  std::vector<ResolvedCommand> commands;
  int var_count = 0;

  [[nodiscard]] int find_sig(std::string_view name) const;
  [[nodiscard]] int find_field(std::string_view name) const;
  [[nodiscard]] const ResolvedCommand* find_command(std::string_view name) const;
  [[nodiscard]] std::vector<int> top_level_sigs() const;
  /// True when `sig` equals `ancestor` or extends it transitively.
  [[nodiscard]] bool is_subsig_of(int sig, int ancestor) const;
};

/// Binds every name, computes arities, inlines predicate calls and checks
/// the scope of every command. Throws LangError on the first problem.
ResolvedModel resolve(const SourceModel& model);

}  // namespace a4f
