#include <doctest.h>

#include "a4f/lang/token.hpp"

using namespace a4f;

namespace {

std::vector<Tok> kinds(std::string_view text) {
  std::vector<Tok> out;
  for (const auto& t : tokenize(text)) out.push_back(t.kind);
  return out;
}

}  // namespace

TEST_CASE("minimal signature declaration") {
  CHECK(kinds("sig A {}") == std::vector<Tok>{Tok::Sig, Tok::Ident, Tok::LBrace, Tok::RBrace, Tok::End});
  auto toks = tokenize("sig A {}");
  CHECK(toks[1].text == "A");
  CHECK(toks[1].span == Span{4, 5});
}

TEST_CASE("secret marker is kept as a token") {
  auto toks = tokenize("//SECRET\ncheck Inv2OK for 3");
  REQUIRE(toks.size() == 6);
  CHECK(toks[0].kind == Tok::SecretMarker);
  CHECK(toks[0].span == Span{0, 8});
  CHECK(toks[1].kind == Tok::Check);
  CHECK(toks[2].kind == Tok::Ident);
  CHECK(toks[2].text == "Inv2OK");
  CHECK(toks[3].kind == Tok::For);
  CHECK(toks[4].kind == Tok::Number);
  CHECK(toks[4].text == "3");
}

TEST_CASE("secret marker spelling is exact") {
  CHECK(kinds("  //SECRET  \nfact {}").front() == Tok::SecretMarker);
  CHECK(kinds("//secret\nfact {}").front() == Tok::Fact);
  CHECK(kinds("// SECRET\nfact {}").front() == Tok::Fact);
  CHECK(kinds("//SECRETS\nfact {}").front() == Tok::Fact);
  // a trailing comment on a code line is not a marker
  CHECK(kinds("sig A {} //SECRET\n") == std::vector<Tok>{Tok::Sig, Tok::Ident, Tok::LBrace, Tok::RBrace, Tok::End});
}

TEST_CASE("other comments are skipped") {
  CHECK(kinds("-- note\nsig /* inner */ A // tail\n{}") ==
        std::vector<Tok>{Tok::Sig, Tok::Ident, Tok::LBrace, Tok::RBrace, Tok::End});
}

TEST_CASE("illegal character reports its position") {
  try {
    tokenize("pred P { @ }");
    FAIL("expected LexError");
  } catch (const LangError& e) {
    CHECK(e.code() == LangErrorCode::LexError);
    CHECK(e.span().begin == 9);
  }
  CHECK_THROWS_AS(tokenize("sig A$ {}"), LangError);
}

TEST_CASE("unterminated block comment") {
  try {
    tokenize("sig A {} /* open");
    FAIL("expected LexError");
  } catch (const LangError& e) {
    CHECK(e.code() == LangErrorCode::LexError);
    CHECK(e.span().begin == 9);
  }
}

TEST_CASE("operators") {
  CHECK(kinds("-> => <=> && || != ! ~ ^ * . & + -") ==
        std::vector<Tok>{Tok::Arrow, Tok::FatArrow, Tok::DoubleArrow, Tok::AmpAmp, Tok::BarBar,
                         Tok::Neq, Tok::Bang, Tok::Tilde, Tok::Caret, Tok::Star, Tok::Dot,
                         Tok::Amp, Tok::Plus, Tok::Minus, Tok::End});
  CHECK(kinds("# <: :> ++ let") == std::vector<Tok>{Tok::Unsupported, Tok::Unsupported,
                                                      Tok::Unsupported, Tok::Unsupported,
                                                      Tok::Unsupported, Tok::End});
}

TEST_CASE("size limit") {
  std::string big(100, ' ');
  CHECK_THROWS_AS(tokenize(big, LexOptions{50}), LangError);
  CHECK_NOTHROW(tokenize(big, LexOptions{100}));
}
