#include <doctest.h>

#include <regex>

#include "a4f/lang/parser.hpp"
#include "support/model_gen.hpp"

using namespace a4f;

namespace {

constexpr const char* kFig1Style = R"(sig Node { next: lone Node }

pred Inv2 {

}

//SECRET
check Inv2OK { Inv2 iff (all n: Node | n not in n.^next) } for 6
)";

LangErrorCode error_of(std::string_view text) {
  try {
    parse(text);
  } catch (const LangError& e) {
    return e.code();
  }
  FAIL("expected a LangError");
  return LangErrorCode::LexError;
}

void check_same(std::string_view a, std::string_view b) {
  auto fa = parse_formula(a);
  auto fb = parse_formula(b);
  INFO(dump(*fa), " vs ", dump(*fb));
  CHECK(same_structure(*fa, *fb));
}

}  // namespace

TEST_CASE("challenge model with one secret command") {
  auto model = parse(kFig1Style);
  REQUIRE(model.paragraphs.size() == 3);
  CHECK(model.paragraphs[0].kind == ParagraphKind::SigDecl);
  CHECK(model.paragraphs[1].kind == ParagraphKind::Pred);
  CHECK_FALSE(model.paragraphs[1].secret);
  const auto& check = model.paragraphs[2];
  CHECK(check.kind == ParagraphKind::CheckCmd);
  CHECK(check.secret);
  CHECK(check.command.name == "Inv2OK");
  CHECK(check.command.scope.default_bound == 6);
  CHECK(model.source_of(check).substr(0, 12) == "check Inv2OK");
}

TEST_CASE("public pred plus secret check gives two paragraphs") {
  auto model = parse("pred Inv2 { }\n//SECRET\ncheck Inv2OK for 6\n");
  REQUIRE(model.paragraphs.size() == 2);
  CHECK_FALSE(model.paragraphs[0].secret);
  CHECK(model.paragraphs[1].secret);
  CHECK(model.paragraphs[1].command.target == "Inv2OK");
}

TEST_CASE("anonymous paragraphs get $-names") {
  auto model = parse("fact { no none }");
  REQUIRE(model.paragraphs.size() == 1);
  CHECK(model.paragraphs[0].kind == ParagraphKind::Fact);
  CHECK(model.paragraphs[0].name == "fact$0");

  auto cmds = parse("run {} check { no none } run {} for 2");
  CHECK(cmds.paragraphs[0].command.name == "run$0");
  CHECK(cmds.paragraphs[1].command.name == "check$0");
  CHECK(cmds.paragraphs[2].command.name == "run$1");
}

TEST_CASE("scope clauses") {
  auto model = parse("sig A {}\nrun {} for 3 but exactly 2 A");
  const auto& scope = model.paragraphs[1].command.scope;
  CHECK(scope.default_bound == 3);
  CHECK_FALSE(scope.default_exactly);
  REQUIRE(scope.overrides.size() == 1);
  CHECK(scope.overrides[0] == ScopeOverride{"A", 2, true, {}});

  auto no_for = parse("run {}");
  CHECK(no_for.paragraphs[0].command.scope.default_bound == 3);

  auto exact = parse("run {} for exactly 1");
  CHECK(exact.paragraphs[0].command.scope.default_exactly);

  auto typed = parse("run {} for 2 A, exactly 1 B");
  CHECK(typed.paragraphs[0].command.scope.default_bound == 3);
  CHECK(typed.paragraphs[0].command.scope.overrides.size() == 2);

  CHECK(error_of("run {} for 0") == LangErrorCode::ParseError);
}

TEST_CASE("command forms") {
  auto m = parse("pred P {}\nassert Q { }\nrun P\nlabel: check Q for 2 expect 0\ncheck Named { } for 1");
  CHECK(m.paragraphs[2].command.target == "P");
  CHECK(m.paragraphs[3].command.name == "label");
  CHECK(m.paragraphs[3].command.target == "Q");
  CHECK(m.paragraphs[3].command.expect == 0);
  CHECK(m.paragraphs[4].command.name == "Named");
  CHECK(m.paragraphs[4].command.body);
}

TEST_CASE("field declarations") {
  auto m = parse("sig A { f: B, g: set B, h, k: lone A, t: B lone -> some A } sig B {}");
  const auto& fields = m.paragraphs[0].sigs[0].fields;
  REQUIRE(fields.size() == 5);
  CHECK(fields[0].range_mult == Mult::One);
  CHECK(fields[1].range_mult == Mult::Set);
  CHECK(fields[2].name == "h");
  CHECK(fields[2].range_mult == Mult::Lone);
  CHECK(fields[3].name == "k");
  CHECK(fields[4].columns == std::vector<std::string>{"B", "A"});
  REQUIRE(fields[4].arrow_mult);
  CHECK(fields[4].arrow_mult->first == Mult::Lone);
  CHECK(fields[4].arrow_mult->second == Mult::Some);

  auto multi = parse("abstract sig S {} one sig C1, C2 extends S {}");
  REQUIRE(multi.paragraphs[1].sigs.size() == 2);
  CHECK(multi.paragraphs[1].sigs[1].name == "C2");
  CHECK(multi.paragraphs[1].sigs[1].mult == Mult::One);
  CHECK(multi.paragraphs[1].sigs[1].parent == "S");
  CHECK(multi.paragraphs[1].declared_names() == std::vector<std::string>{"C1", "C2"});
}

TEST_CASE("formula precedence") {
  check_same("p or q and r", "p or (q and r)");
  check_same("p implies q implies r", "p implies (q implies r)");
  check_same("p iff q or r", "(p iff q) or r");
  check_same("p implies q iff r", "(p implies q) iff r");
  check_same("not p and q", "(not p) and q");
  check_same("!p && q || r => s <=> t", "((not p) and q) or ((r implies s) iff t)");
  check_same("all x: A | p and q", "all x: A | (p and q)");
  check_same("some x, y: A | x in y", "some x: A, y: A | x in y");
}

TEST_CASE("expression precedence") {
  auto a = parse_expression("a + b & c");
  auto b = parse_expression("a + (b & c)");
  CHECK(same_structure(*a, *b));
  CHECK(dump(*parse_expression("a - b -> c . d")) == "(a - (b -> (c . d)))");
  CHECK(dump(*parse_expression("~r.s")) == "((~r) . s)");
  CHECK(dump(*parse_expression("^r.*s")) == "((^r) . (*s))");
  CHECK(dump(*parse_expression("a.b[c]")) == "(box (a . b) c)");
  CHECK(dump(*parse_expression("r[a, b].c")) == "((box r a b) . c)");
  CHECK(dump(*parse_expression("a & b + c")) == "((a & b) + c)");
}

TEST_CASE("parenthesised formulas and expressions") {
  CHECK(dump(*parse_formula("(a + b) in c")) == "((a + b) in c)");
  CHECK(dump(*parse_formula("(a).r = b")) == "((a . r) = b)");
  CHECK(dump(*parse_formula("(a in b) and c !in d")) == "((a in b) and (c !in d))");
  CHECK(dump(*parse_formula("(P[x])")) == "P[x]");
  CHECK(dump(*parse_formula("x not in y")) == "(x !in y)");
  CHECK(dump(*parse_formula("some r")) == "(some r)");
  CHECK(dump(*parse_formula("one x: A { x in B }")) == "(one x: A | {(x in B)})");
  CHECK(parse_formula("(p)")->kind == FormulaKind::Paren);
}

TEST_CASE("parse errors carry positions") {
  try {
    parse("sig A { f: }");
    FAIL("expected ParseError");
  } catch (const LangError& e) {
    CHECK(e.code() == LangErrorCode::ParseError);
    CHECK(e.span().begin == 11);
    CHECK_FALSE(e.expected().empty());
  }
  CHECK(error_of("fact { a + }") == LangErrorCode::ParseError);
  CHECK(error_of("fact { a.b }") == LangErrorCode::ParseError);
  CHECK(error_of("pred P { @ }") == LangErrorCode::LexError);
}

TEST_CASE("secret marker must precede a paragraph") {
  CHECK(error_of("sig A {}\n//SECRET\n") == LangErrorCode::ParseError);
  CHECK(error_of("//SECRET\n//SECRET\nfact {}") == LangErrorCode::ParseError);
  CHECK(error_of("//SECRET\n-- note\nfact {}") == LangErrorCode::ParseError);
  auto blank_lines = parse("//SECRET\n\n\n  fact {}");
  CHECK(blank_lines.paragraphs[0].secret);
  CHECK(blank_lines.paragraphs[0].marker == Span{0, 8});
}

TEST_CASE("unsupported constructs are named") {
  auto message_of = [](std::string_view text) {
    try {
      parse(text);
    } catch (const LangError& e) {
      CHECK(e.code() == LangErrorCode::Unsupported);
      return std::string(e.what());
    }
    FAIL("expected an Unsupported error");
    return std::string();
  };
  CHECK(message_of("fact { #A = 1 }").find("cardinality") != std::string::npos);
  CHECK(message_of("fun f : A { A }").find("fun") != std::string::npos);
  CHECK(message_of("open util/ordering[A]").find("open") != std::string::npos);
  CHECK(message_of("sig B in A {}").find("subset") != std::string::npos);
  CHECK(message_of("fact { let x = A | some x }").find("let") != std::string::npos);
  CHECK(message_of("fact { all disj a, b: A | a != b }").find("disj") != std::string::npos);
  CHECK(message_of("sig A { f: A -> A -> A }").find("arity") != std::string::npos);
  CHECK(message_of("fact { some { x: A | x in A } }").find("comprehension") != std::string::npos);
  CHECK(message_of("fact { A <: r in r }").find("<:") != std::string::npos);
  CHECK(message_of("run {} for 3 Int").find("Int") != std::string::npos);
  CHECK(message_of("sig A {} { some A }").find("signature fact") != std::string::npos);
}

TEST_CASE("paragraph spans tile the source") {
  auto model = parse(kFig1Style);
  std::uint32_t last = 0;
  std::string rebuilt;
  for (const auto& p : model.paragraphs) {
    CHECK(p.span.begin >= last);
    rebuilt += model.text.substr(last, p.span.begin - last);
    rebuilt += model.source_of(p);
    last = p.span.end;
  }
  rebuilt += model.text.substr(last);
  CHECK(rebuilt == model.text);
}

namespace {

bool same_paragraph(const Paragraph& a, const Paragraph& b) {
  if (a.kind != b.kind || a.name != b.name) return false;
  if (a.body || b.body) {
    if (!a.body || !b.body || !same_structure(*a.body, *b.body)) return false;
  }
  if (a.is_command()) {
    const auto& ca = a.command;
    const auto& cb = b.command;
    if (ca.target != cb.target || !(ca.scope == cb.scope)) return false;
    if (ca.body || cb.body) {
      if (!ca.body || !cb.body || !same_structure(*ca.body, *cb.body)) return false;
    }
  }
  if (a.sigs.size() != b.sigs.size() || a.params.size() != b.params.size()) return false;
  for (std::size_t i = 0; i < a.sigs.size(); ++i) {
    if (a.sigs[i].name != b.sigs[i].name || a.sigs[i].fields.size() != b.sigs[i].fields.size()) {
      return false;
    }
  }
  return true;
}

// Reference check for secret marking: a line that is exactly //SECRET,
// then optional blank lines, then a line starting a paragraph.
std::vector<bool> regex_secret_flags(const std::string& text, const SourceModel& model) {
  static const std::regex marker(R"((^|\n)[ \t]*//SECRET[ \t\r]*\n(?:[ \t\r]*\n)*[ \t]*)");
  std::vector<std::uint32_t> starts;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), marker); it != std::sregex_iterator(); ++it) {
    starts.push_back(static_cast<std::uint32_t>(it->position() + it->length()));
  }
  std::vector<bool> flags;
  for (const auto& p : model.paragraphs) {
    flags.push_back(std::find(starts.begin(), starts.end(), p.span.begin) != starts.end());
  }
  return flags;
}

}  // namespace

TEST_CASE("property: re-parsing concatenated paragraph spans is structurally equal") {
  testing::GenOptions opts;
  opts.secret_rate = 0.3;
  auto corpus = testing::generate_corpus(101, 200, opts);
  for (const auto& text : corpus) {
    INFO(text);
    auto model = parse(text);
    std::string joined;
    for (const auto& p : model.paragraphs) {
      joined += model.source_of(p);
      joined += "\n";
    }
    auto again = parse(joined);
    REQUIRE(again.paragraphs.size() == model.paragraphs.size());
    for (std::size_t i = 0; i < model.paragraphs.size(); ++i) {
      CHECK(same_paragraph(model.paragraphs[i], again.paragraphs[i]));
    }
  }
}

TEST_CASE("property: secret detection agrees with a regex reference") {
  testing::GenOptions opts;
  opts.secret_rate = 0.4;
  auto corpus = testing::generate_corpus(202, 200, opts);
  int secrets = 0;
  for (const auto& text : corpus) {
    INFO(text);
    auto model = parse(text);
    auto expected = regex_secret_flags(text, model);
    for (std::size_t i = 0; i < model.paragraphs.size(); ++i) {
      CHECK(model.paragraphs[i].secret == expected[i]);
      secrets += model.paragraphs[i].secret ? 1 : 0;
    }
  }
  CHECK(secrets > 50);
}
