#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "a4f/lang/error.hpp"

namespace a4f {

enum class Tok {
  End,
  Ident,
  Number,
  SecretMarker,
  // keywords
  Sig, Abstract, Extends, Fact, Pred, Assert, Run, Check, For, But, Exactly,
  Expect, All, Some, No, Lone, One, Set, And, Or, Not, Implies, Iff, In, Iden,
  Univ, None,
  // punctuation
  LBrace, RBrace, LParen, RParen, LBracket, RBracket, Comma, Colon, Bar, Dot,
  Tilde, Caret, Star, Plus, Minus, Amp, Arrow, Eq, Neq, Bang, FatArrow,
  DoubleArrow, AmpAmp, BarBar,
  /// Recognised but outside the supported language (`let`, `#`, `<:`, ...).
  Unsupported,
};

std::string_view to_string(Tok tok);

struct Token {
  Tok kind = Tok::End;
  Span span;
  std::string text;

  friend bool operator==(const Token&, const Token&) = default;
};

struct LexOptions {
  std::size_t max_bytes = 64 * 1024;
};

/// Splits `text` into tokens. Comments are dropped except for a line that is
/// exactly `//SECRET` (surrounding whitespace allowed), which becomes a
/// `SecretMarker` token. The stream always ends with a `Tok::End` token.
std::vector<Token> tokenize(std::string_view text, const LexOptions& options = {});

}  // namespace a4f
