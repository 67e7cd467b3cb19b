#include <doctest.h>

#include "a4f/lang/parser.hpp"
#include "a4f/lang/resolver.hpp"

using namespace a4f;

namespace {

ResolvedModel resolve_text(std::string_view text) { return resolve(parse(text)); }

LangError resolve_error(std::string_view text) {
  try {
    resolve_text(text);
  } catch (const LangError& e) {
    return e;
  }
  FAIL("expected a resolution error");
  return LangError(LangErrorCode::ParseError, {}, "");
}

const Expr& first_mult_operand(const Formula& f) {
  const Formula* p = &f;
  while (p->kind == FormulaKind::Block || p->kind == FormulaKind::Paren) {
    p = p->kind == FormulaKind::Block ? p->children.front().get() : p->lhs.get();
  }
  REQUIRE(p->kind == FormulaKind::Mult);
  return *p->left;
}

}  // namespace

TEST_CASE("join arities") {
  auto m = resolve_text("sig A { r: set A }\nrun { some r.r }");
  REQUIRE(m.commands.size() == 1);
  const Expr& join = first_mult_operand(*m.commands[0].body);
  CHECK(join.kind == ExprKind::Join);
  CHECK(join.arity == 2);
  CHECK(join.lhs->kind == ExprKind::FieldRef);
}

TEST_CASE("join of two unary relations is rejected") {
  auto e = resolve_error("sig A {}\nsig B {}\nrun { some A.B }");
  CHECK(e.code() == LangErrorCode::ArityMismatch);
  CHECK(e.span().begin > 0);
}

TEST_CASE("cyclic extension") {
  CHECK(resolve_error("sig A extends B {}\nsig B extends A {}").code() == LangErrorCode::CyclicExtends);
  CHECK(resolve_error("sig A extends A {}").code() == LangErrorCode::CyclicExtends);
}

TEST_CASE("only sigs can be parents") {
  CHECK(resolve_error("sig A { f: set A }\nsig B extends f {}").code() == LangErrorCode::TypeMismatch);
  CHECK(resolve_error("sig B extends Nope {}").code() == LangErrorCode::UnknownName);
}

TEST_CASE("unknown and duplicate names") {
  auto e = resolve_error("sig A {}\nrun { some Missing }");
  CHECK(e.code() == LangErrorCode::UnknownName);
  CHECK(std::string(e.what()).find("Missing") != std::string::npos);
  CHECK(resolve_error("sig A {}\nsig A {}").code() == LangErrorCode::DuplicateName);
  CHECK(resolve_error("sig A { f: A }\nsig B { f: A }").code() == LangErrorCode::DuplicateName);
  CHECK(resolve_error("pred P {}\npred P {}").code() == LangErrorCode::DuplicateName);
  CHECK(resolve_error("run X {}\ncheck X {}").code() == LangErrorCode::DuplicateName);
  // assertion and the check naming it live in different namespaces
  CHECK_NOTHROW(resolve_text("assert Ok { no none }\ncheck Ok"));
}

TEST_CASE("recursive predicates are rejected") {
  CHECK(resolve_error("pred P { Q }\npred Q { P }\nrun P").code() == LangErrorCode::RecursivePredicate);
  CHECK(resolve_error("pred P { P }").code() == LangErrorCode::RecursivePredicate);
}

TEST_CASE("predicate calls are inlined with capture-avoiding substitution") {
  auto m = resolve_text(
      "sig A { r: set A }\n"
      "pred Reach[x: A] { some y: A | y in x.r }\n"
      "run { some y: A | Reach[y] }");
  const auto& body = *m.commands[0].body;
  // {(some y#1: A | (some y#2: A | (y#2 in (y#1 . r)))) }
  const Formula& outer = *body.children[0];
  REQUIRE(outer.kind == FormulaKind::Quant);
  int outer_id = outer.decls[0].var_id;
  const Formula& inlined = *outer.lhs;
  REQUIRE(inlined.kind == FormulaKind::Paren);
  const Formula& inner = *inlined.lhs->children[0];
  REQUIRE(inner.kind == FormulaKind::Quant);
  int inner_id = inner.decls[0].var_id;
  CHECK(inner_id != outer_id);
  const Formula& cmp = *inner.lhs;
  REQUIRE(cmp.kind == FormulaKind::Compare);
  CHECK(cmp.left->index == inner_id);
  CHECK(cmp.right->lhs->kind == ExprKind::Var);
  CHECK(cmp.right->lhs->index == outer_id);
}

TEST_CASE("predicate call argument checks") {
  CHECK(resolve_error("sig A { r: set A }\npred P[x: A] {}\nrun { P[r] }").code() == LangErrorCode::ArityMismatch);
  CHECK(resolve_error("sig A {}\npred P[x: A] {}\nrun { P }").code() == LangErrorCode::ArityMismatch);
  CHECK(resolve_error("sig A {}\nrun { A }").code() == LangErrorCode::TypeMismatch);
  CHECK(resolve_error("run { Nope }").code() == LangErrorCode::UnknownName);
}

TEST_CASE("run on a predicate with parameters closes them existentially") {
  auto m = resolve_text("sig A {}\npred P[a: A, b: A] { a != b }\nrun P for 2");
  const auto& body = *m.commands[0].body;
  REQUIRE(body.kind == FormulaKind::Quant);
  CHECK(body.quant == QuantKind::Some);
  CHECK(body.decls.size() == 2);
}

TEST_CASE("commands target the right paragraph kinds") {
  CHECK(resolve_error("pred P {}\ncheck P").code() == LangErrorCode::TypeMismatch);
  CHECK(resolve_error("assert P {}\nrun P").code() == LangErrorCode::TypeMismatch);
  CHECK(resolve_error("check Missing").code() == LangErrorCode::UnknownName);
}

TEST_CASE("scope overrides must name top-level sigs") {
  CHECK(resolve_error("sig A {}\nrun {} for 2 but 1 B").code() == LangErrorCode::UnknownName);
  CHECK(resolve_error("sig A {}\nsig B extends A {}\nrun {} for 2 but 1 B").code() == LangErrorCode::TypeMismatch);
  CHECK(resolve_error("sig A {}\nrun {} for 2 but 1 A, 2 A").code() == LangErrorCode::DuplicateName);
}

TEST_CASE("sigs and fields are ordered by name") {
  auto m = resolve_text("sig Z { b: Z, a: set Y }\nsig Y {}\nsig X extends Z {}");
  REQUIRE(m.sigs.size() == 3);
  CHECK(m.sigs[0].name == "X");
  CHECK(m.sigs[1].name == "Y");
  CHECK(m.sigs[2].name == "Z");
  CHECK(m.sigs[0].parent == 2);
  CHECK(m.sigs[0].top == 2);
  CHECK(m.sigs[2].children == std::vector<int>{0});
  CHECK(m.fields[0].name == "a");
  CHECK(m.fields[0].columns == std::vector<int>{2, 1});
  CHECK(m.fields[1].range_mult == Mult::One);
  CHECK(m.top_level_sigs() == std::vector<int>{1, 2});
  CHECK(m.is_subsig_of(0, 2));
  CHECK_FALSE(m.is_subsig_of(2, 0));
}

TEST_CASE("arity checks on operators") {
  CHECK(resolve_error("sig A { r: set A }\nrun { some A + r }").code() == LangErrorCode::ArityMismatch);
  CHECK(resolve_error("sig A {}\nrun { some ^A }").code() == LangErrorCode::ArityMismatch);
  CHECK(resolve_error("sig A { r: set A }\nrun { A = r }").code() == LangErrorCode::ArityMismatch);
  CHECK(resolve_error("sig A { r: set A }\nrun { all x: r | some x }").code() == LangErrorCode::ArityMismatch);
  auto m = resolve_text("sig A { r: set A, t: A -> A }\nrun { some A -> r and some t.A and some ~r + iden }");
  CHECK(m.commands.size() == 1);
}
