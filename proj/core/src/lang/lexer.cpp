#include <array>
#include <cctype>
#include <unordered_map>

#include "a4f/lang/token.hpp"

namespace a4f {

LineCol line_col(std::string_view text, std::uint32_t offset) {
  LineCol lc;
  for (std::uint32_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++lc.line;
      lc.column = 1;
    } else {
      ++lc.column;
    }
  }
  return lc;
}

std::string_view to_string(LangErrorCode code) {
  switch (code) {
    case LangErrorCode::LexError: return "lex_error";
    case LangErrorCode::ParseError: return "parse_error";
    case LangErrorCode::Unsupported: return "unsupported";
    case LangErrorCode::CodeTooLarge: return "code_too_large";
    case LangErrorCode::UnknownName: return "unknown_name";
    case LangErrorCode::ArityMismatch: return "arity_mismatch";
    case LangErrorCode::TypeMismatch: return "type_mismatch";
    case LangErrorCode::DuplicateName: return "duplicate_name";
    case LangErrorCode::CyclicExtends: return "cyclic_extends";
    case LangErrorCode::RecursivePredicate: return "recursive_predicate";
    case LangErrorCode::ScopeTooLarge: return "scope_too_large";
  }
  return "error";
}

LangError::LangError(LangErrorCode code, Span span, std::string message,
                     std::vector<std::string> expected)
    : std::runtime_error(std::move(message)),
      code_(code),
      span_(span),
      expected_(std::move(expected)) {}

std::string_view to_string(Tok tok) {
  switch (tok) {
    case Tok::End: return "end of input";
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::SecretMarker: return "//SECRET";
    case Tok::Sig: return "sig";
    case Tok::Abstract: return "abstract";
    case Tok::Extends: return "extends";
    case Tok::Fact: return "fact";
    case Tok::Pred: return "pred";
    case Tok::Assert: return "assert";
    case Tok::Run: return "run";
    case Tok::Check: return "check";
    case Tok::For: return "for";
    case Tok::But: return "but";
    case Tok::Exactly: return "exactly";
    case Tok::Expect: return "expect";
    case Tok::All: return "all";
    case Tok::Some: return "some";
    case Tok::No: return "no";
    case Tok::Lone: return "lone";
    case Tok::One: return "one";
    case Tok::Set: return "set";
    case Tok::And: return "and";
    case Tok::Or: return "or";
    case Tok::Not: return "not";
    case Tok::Implies: return "implies";
    case Tok::Iff: return "iff";
    case Tok::In: return "in";
    case Tok::Iden: return "iden";
    case Tok::Univ: return "univ";
    case Tok::None: return "none";
    case Tok::LBrace: return "{";
    case Tok::RBrace: return "}";
    case Tok::LParen: return "(";
    case Tok::RParen: return ")";
    case Tok::LBracket: return "[";
    case Tok::RBracket: return "]";
    case Tok::Comma: return ",";
    case Tok::Colon: return ":";
    case Tok::Bar: return "|";
    case Tok::Dot: return ".";
    case Tok::Tilde: return "~";
    case Tok::Caret: return "^";
    case Tok::Star: return "*";
    case Tok::Plus: return "+";
    case Tok::Minus: return "-";
    case Tok::Amp: return "&";
    case Tok::Arrow: return "->";
    case Tok::Eq: return "=";
    case Tok::Neq: return "!=";
    case Tok::Bang: return "!";
    case Tok::FatArrow: return "=>";
    case Tok::DoubleArrow: return "<=>";
    case Tok::AmpAmp: return "&&";
    case Tok::BarBar: return "||";
    case Tok::Unsupported: return "unsupported construct";
  }
  return "?";
}

namespace {

const std::unordered_map<std::string_view, Tok>& keywords() {
  static const std::unordered_map<std::string_view, Tok> table = {
      {"sig", Tok::Sig},         {"abstract", Tok::Abstract},
      {"extends", Tok::Extends}, {"fact", Tok::Fact},
      {"pred", Tok::Pred},       {"assert", Tok::Assert},
      {"run", Tok::Run},         {"check", Tok::Check},
      {"for", Tok::For},         {"but", Tok::But},
      {"exactly", Tok::Exactly}, {"expect", Tok::Expect},
      {"all", Tok::All},         {"some", Tok::Some},
      {"no", Tok::No},           {"lone", Tok::Lone},
      {"one", Tok::One},         {"set", Tok::Set},
      {"and", Tok::And},         {"or", Tok::Or},
      {"not", Tok::Not},         {"implies", Tok::Implies},
      {"iff", Tok::Iff},         {"in", Tok::In},
      {"iden", Tok::Iden},       {"univ", Tok::Univ},
      {"none", Tok::None},
      // reserved words of the full language that this subset rejects
      {"let", Tok::Unsupported}, {"fun", Tok::Unsupported},
      {"open", Tok::Unsupported}, {"module", Tok::Unsupported},
      {"disj", Tok::Unsupported}, {"seq", Tok::Unsupported},
      {"Int", Tok::Unsupported}, {"int", Tok::Unsupported},
      {"String", Tok::Unsupported}, {"enum", Tok::Unsupported},
      {"else", Tok::Unsupported}, {"sum", Tok::Unsupported},
      {"this", Tok::Unsupported}, {"private", Tok::Unsupported},
      {"var", Tok::Unsupported},
  };
  return table;
}

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_'; }
bool ident_continue(unsigned char c) {
  return std::isalnum(c) || c == '_' || c == '\'';
}
bool blank(char c) { return c == ' ' || c == '\t' || c == '\r'; }

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_trivia(out);
      if (pos_ >= text_.size()) break;
      out.push_back(next());
    }
    auto end = static_cast<std::uint32_t>(text_.size());
    out.push_back(Token{Tok::End, {end, end}, {}});
    return out;
  }

 private:
  [[nodiscard]] char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  [[nodiscard]] bool only_blanks_before_on_line(std::size_t at) const {
    while (at > 0) {
      char c = text_[at - 1];
      if (c == '\n') return true;
      if (!blank(c)) return false;
      --at;
    }
    return true;
  }

  void skip_trivia(std::vector<Token>& out) {
    while (pos_ < text_.size()) {
      char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if ((c == '/' && peek(1) == '/') || (c == '-' && peek(1) == '-')) {
        std::size_t start = pos_;
        std::size_t eol = text_.find('\n', pos_);
        if (eol == std::string_view::npos) eol = text_.size();
        std::size_t content_end = eol;
        while (content_end > start && blank(text_[content_end - 1])) --content_end;
        std::string_view comment = text_.substr(start, content_end - start);
        if (comment == "//SECRET" && only_blanks_before_on_line(start)) {
          out.push_back(Token{Tok::SecretMarker,
                              {static_cast<std::uint32_t>(start),
                               static_cast<std::uint32_t>(content_end)},
                              std::string(comment)});
        }
        pos_ = eol;
      } else if (c == '/' && peek(1) == '*') {
        std::size_t close = text_.find("*/", pos_ + 2);
        if (close == std::string_view::npos) {
          throw LangError(LangErrorCode::LexError, here(2), "unterminated block comment");
        }
        pos_ = close + 2;
      } else {
        break;
      }
    }
  }

  [[nodiscard]] Span here(std::size_t len) const {
    return {static_cast<std::uint32_t>(pos_), static_cast<std::uint32_t>(pos_ + len)};
  }

  Token make(Tok kind, std::size_t len) {
    Token t{kind, here(len), std::string(text_.substr(pos_, len))};
    pos_ += len;
    return t;
  }

  Token next() {
    auto c = static_cast<unsigned char>(peek());
    if (ident_start(c)) {
      std::size_t len = 1;
      while (pos_ + len < text_.size() &&
             ident_continue(static_cast<unsigned char>(text_[pos_ + len]))) {
        ++len;
      }
      auto word = text_.substr(pos_, len);
      auto it = keywords().find(word);
      return make(it == keywords().end() ? Tok::Ident : it->second, len);
    }
    if (std::isdigit(c)) {
      std::size_t len = 1;
      while (std::isdigit(static_cast<unsigned char>(peek(len)))) ++len;
      return make(Tok::Number, len);
    }
    char n1 = peek(1);
    char n2 = peek(2);
    switch (c) {
      case '{': return make(Tok::LBrace, 1);
      case '}': return make(Tok::RBrace, 1);
      case '(': return make(Tok::LParen, 1);
      case ')': return make(Tok::RParen, 1);
      case '[': return make(Tok::LBracket, 1);
      case ']': return make(Tok::RBracket, 1);
      case ',': return make(Tok::Comma, 1);
      case '|': return n1 == '|' ? make(Tok::BarBar, 2) : make(Tok::Bar, 1);
      case '.': return make(Tok::Dot, 1);
      case '~': return make(Tok::Tilde, 1);
      case '^': return make(Tok::Caret, 1);
      case '*': return make(Tok::Star, 1);
      case '+': return n1 == '+' ? make(Tok::Unsupported, 2) : make(Tok::Plus, 1);
      case '-': return n1 == '>' ? make(Tok::Arrow, 2) : make(Tok::Minus, 1);
      case '&': return n1 == '&' ? make(Tok::AmpAmp, 2) : make(Tok::Amp, 1);
      case '=':
        if (n1 == '>') return make(Tok::FatArrow, 2);
        if (n1 == '<') return make(Tok::Unsupported, 2);
        return make(Tok::Eq, 1);
      case '!': return n1 == '=' ? make(Tok::Neq, 2) : make(Tok::Bang, 1);
      case ':': return n1 == '>' ? make(Tok::Unsupported, 2) : make(Tok::Colon, 1);
      case '<':
        if (n1 == '=' && n2 == '>') return make(Tok::DoubleArrow, 3);
        if (n1 == ':' || n1 == '=') return make(Tok::Unsupported, 2);
        return make(Tok::Unsupported, 1);
      case '>':
        return n1 == '=' ? make(Tok::Unsupported, 2) : make(Tok::Unsupported, 1);
      case '#':
      case '/':
        return make(Tok::Unsupported, 1);
      default: break;
    }
    throw LangError(LangErrorCode::LexError, here(1), "illegal character");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<Token> tokenize(std::string_view text, const LexOptions& options) {
  if (text.size() > options.max_bytes) {
    throw LangError(LangErrorCode::CodeTooLarge, {0, 0},
                    "model source exceeds " + std::to_string(options.max_bytes) + " bytes");
  }
  return Lexer(text).run();
}

}  // namespace a4f
