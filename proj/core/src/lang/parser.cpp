#include "a4f/lang/parser.hpp"

#include <algorithm>
#include <cctype>

#include "a4f/lang/token.hpp"

namespace a4f {

namespace {

bool is_mult_keyword(Tok t) {
  return t == Tok::Set || t == Tok::One || t == Tok::Lone || t == Tok::Some;
}

Mult to_mult(Tok t) {
  switch (t) {
    case Tok::One: return Mult::One;
    case Tok::Lone: return Mult::Lone;
    case Tok::Some: return Mult::Some;
    default: return Mult::Set;
  }
}

class Parser {
 public:
  Parser(std::string_view text, std::vector<Token> tokens)
      : text_(text), toks_(std::move(tokens)) {}

  SourceModel parse_model() {
    SourceModel model;
    model.text = std::string(text_);
    while (cur().kind != Tok::End) model.paragraphs.push_back(parse_paragraph());
    return model;
  }

  FormulaPtr parse_lone_formula() {
    auto f = parse_formula();
    expect(Tok::End);
    return f;
  }

  ExprPtr parse_lone_expression() {
    auto e = parse_expr();
    expect(Tok::End);
    return e;
  }

 private:
  // -- token helpers ---------------------------------------------------------

  [[nodiscard]] const Token& cur() const { return toks_[pos_]; }
  [[nodiscard]] const Token& at(std::size_t ahead) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  [[nodiscard]] bool is(Tok t) const { return cur().kind == t; }

  const Token& advance() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  bool accept(Tok t) {
    if (!is(t)) return false;
    advance();
    return true;
  }

  [[noreturn]] void fail(std::string message, std::vector<std::string> expected = {}) const {
    if (is(Tok::Unsupported)) unsupported(cur().text);
    throw LangError(LangErrorCode::ParseError, cur().span, std::move(message),
                    std::move(expected));
  }

  [[noreturn]] void unsupported(const std::string& what) const {
    throw LangError(LangErrorCode::Unsupported, cur().span,
                    "unsupported construct: " + what);
  }

  const Token& expect(Tok t) {
    if (!is(t)) {
      fail("expected '" + std::string(to_string(t)) + "' but found '" +
               std::string(to_string(cur().kind)) + "'",
           {std::string(to_string(t))});
    }
    return advance();
  }

  std::string expect_ident() {
    if (!is(Tok::Ident)) {
      fail("expected identifier but found '" + std::string(to_string(cur().kind)) + "'",
           {"identifier"});
    }
    return advance().text;
  }

  int expect_number() {
    if (!is(Tok::Number)) fail("expected number", {"number"});
    const std::string& digits = cur().text;
    if (digits.size() > 6) fail("number out of range");
    int value = std::stoi(digits);
    advance();
    return value;
  }

  [[nodiscard]] std::uint32_t prev_end() const {
    return pos_ == 0 ? 0 : toks_[pos_ - 1].span.end;
  }

  [[nodiscard]] Span span_from(std::uint32_t begin) const { return {begin, prev_end()}; }

  // -- paragraphs ------------------------------------------------------------

  [[nodiscard]] bool at_paragraph_start() const {
    switch (cur().kind) {
      case Tok::Sig:
      case Tok::Abstract:
      case Tok::Fact:
      case Tok::Pred:
      case Tok::Assert:
      case Tok::Run:
      case Tok::Check:
        return true;
      case Tok::One:
      case Tok::Lone:
      case Tok::Some:
        return at(1).kind == Tok::Sig || at(1).kind == Tok::Abstract;
      case Tok::Ident:
        return at(1).kind == Tok::Colon;
      default:
        return false;
    }
  }

  Paragraph parse_paragraph() {
    Paragraph p;
    if (is(Tok::SecretMarker)) {
      p.secret = true;
      p.marker = advance().span;
      if (!at_paragraph_start()) fail("//SECRET must be followed by a paragraph");
      auto between = text_.substr(p.marker.end, cur().span.begin - p.marker.end);
      bool blank = std::all_of(between.begin(), between.end(), [](char c) {
        return std::isspace(static_cast<unsigned char>(c)) != 0;
      });
      if (!blank) fail("//SECRET must immediately precede a paragraph");
    }
    std::uint32_t begin = cur().span.begin;
    switch (cur().kind) {
      case Tok::Sig:
      case Tok::Abstract:
      case Tok::One:
      case Tok::Lone:
      case Tok::Some:
        parse_sig_paragraph(p);
        break;
      case Tok::Fact:
        parse_fact(p);
        break;
      case Tok::Pred:
        parse_pred(p);
        break;
      case Tok::Assert:
        parse_assert(p);
        break;
      case Tok::Run:
      case Tok::Check:
      case Tok::Ident:
        parse_command(p);
        break;
      case Tok::Unsupported:
        unsupported(cur().text);
      default:
        fail("expected a paragraph (sig, fact, pred, assert, run or check)",
             {"sig", "fact", "pred", "assert", "run", "check"});
    }
    p.span = span_from(begin);
    return p;
  }

  void parse_sig_paragraph(Paragraph& p) {
    p.kind = ParagraphKind::SigDecl;
    bool is_abstract = false;
    Mult mult = Mult::Set;
    for (;;) {
      if (accept(Tok::Abstract)) {
        is_abstract = true;
      } else if (is(Tok::One) || is(Tok::Lone) || is(Tok::Some)) {
        mult = to_mult(advance().kind);
      } else {
        break;
      }
    }
    expect(Tok::Sig);
    std::vector<std::pair<std::string, Span>> names;
    do {
      Span s = cur().span;
      names.emplace_back(expect_ident(), s);
    } while (accept(Tok::Comma));
    std::optional<std::string> parent;
    if (accept(Tok::Extends)) {
      parent = expect_ident();
    } else if (is(Tok::In)) {
      unsupported("subset signature ('in')");
    }
    expect(Tok::LBrace);
    std::vector<FieldDecl> fields;
    while (!is(Tok::RBrace)) {
      parse_field_group(fields);
      if (!accept(Tok::Comma)) break;
    }
    expect(Tok::RBrace);
    if (is(Tok::LBrace)) unsupported("signature fact");
    for (auto& [name, span] : names) {
      SigDecl sig;
      sig.name = name;
      sig.is_abstract = is_abstract;
      sig.mult = mult;
      sig.parent = parent;
      sig.fields = fields;
      sig.span = span;
      p.sigs.push_back(std::move(sig));
    }
    p.name = p.sigs.front().name;
  }

  Mult parse_optional_mult(Mult fallback) {
    if (is(Tok::Unsupported) && cur().text == "disj") unsupported("disj");
    if (is_mult_keyword(cur().kind)) return to_mult(advance().kind);
    return fallback;
  }

  void parse_field_group(std::vector<FieldDecl>& out) {
    std::vector<std::pair<std::string, Span>> names;
    do {
      Span s = cur().span;
      names.emplace_back(expect_ident(), s);
    } while (accept(Tok::Comma));
    expect(Tok::Colon);
    bool explicit_mult = is_mult_keyword(cur().kind);
    Mult lead = parse_optional_mult(Mult::One);
    FieldDecl proto;
    proto.columns.push_back(expect_ident());
    proto.range_mult = lead;
    if (is_mult_keyword(cur().kind) || is(Tok::Arrow)) {
      if (explicit_mult && lead != Mult::Set) {
        fail("a ternary field may only be prefixed with 'set'");
      }
      Mult left = parse_optional_mult(Mult::Set);
      expect(Tok::Arrow);
      Mult right = parse_optional_mult(Mult::Set);
      proto.columns.push_back(expect_ident());
      proto.range_mult = Mult::Set;
      proto.arrow_mult = std::make_pair(left, right);
      if (is(Tok::Arrow) || is_mult_keyword(cur().kind)) {
        unsupported("fields of arity above 3 (nested arrow multiplicities)");
      }
    }
    for (auto& [name, span] : names) {
      FieldDecl f = proto;
      f.name = name;
      f.span = span;
      out.push_back(std::move(f));
    }
  }

  void parse_fact(Paragraph& p) {
    p.kind = ParagraphKind::Fact;
    expect(Tok::Fact);
    p.name = is(Tok::Ident) ? advance().text : "fact$" + std::to_string(fact_count_++);
    p.body = parse_block();
  }

  void parse_pred(Paragraph& p) {
    p.kind = ParagraphKind::Pred;
    expect(Tok::Pred);
    p.name = expect_ident();
    if (is(Tok::Dot)) unsupported("receiver predicates");
    if (accept(Tok::LBracket)) {
      while (!is(Tok::RBracket)) {
        std::vector<std::pair<std::string, Span>> names;
        do {
          Span s = cur().span;
          names.emplace_back(expect_ident(), s);
        } while (accept(Tok::Comma));
        expect(Tok::Colon);
        parse_optional_mult(Mult::One);
        auto type = parse_expr();
        for (auto& [name, span] : names) p.params.push_back({name, type, span});
        if (!accept(Tok::Comma)) break;
      }
      expect(Tok::RBracket);
    } else if (is(Tok::LParen)) {
      unsupported("parenthesised predicate parameters");
    }
    p.body = parse_block();
  }

  void parse_assert(Paragraph& p) {
    p.kind = ParagraphKind::Assert;
    expect(Tok::Assert);
    p.name = expect_ident();
    p.body = parse_block();
  }

  void parse_command(Paragraph& p) {
    std::string label;
    if (is(Tok::Ident)) {
      label = advance().text;
      expect(Tok::Colon);
    }
    Command& cmd = p.command;
    if (accept(Tok::Run)) {
      cmd.kind = CommandKind::Run;
      p.kind = ParagraphKind::RunCmd;
    } else {
      expect(Tok::Check);
      cmd.kind = CommandKind::Check;
      p.kind = ParagraphKind::CheckCmd;
    }
    std::string named;
    if (is(Tok::Ident)) named = advance().text;
    if (is(Tok::LBrace)) {
      cmd.body = parse_block();
    } else if (named.empty()) {
      fail("expected a predicate/assertion name or a block", {"identifier", "{"});
    } else {
      cmd.target = named;
    }
    if (!label.empty()) {
      cmd.name = label;
    } else if (!named.empty()) {
      cmd.name = named;
    } else if (cmd.kind == CommandKind::Run) {
      cmd.name = "run$" + std::to_string(run_count_++);
    } else {
      cmd.name = "check$" + std::to_string(check_count_++);
    }
    if (accept(Tok::For)) cmd.scope = parse_scope();
    if (accept(Tok::Expect)) cmd.expect = expect_number();
    p.name = cmd.name;
  }

  ScopeOverride parse_type_scope(bool exactly, int bound, Span begin) {
    if (is(Tok::Unsupported)) unsupported("scope for '" + cur().text + "'");
    ScopeOverride o;
    o.exactly = exactly;
    o.bound = bound;
    o.sig = expect_ident();
    o.span = {begin.begin, prev_end()};
    return o;
  }

  ScopeOverride parse_type_scope() {
    Span begin = cur().span;
    bool exactly = accept(Tok::Exactly);
    int bound = expect_number();
    return parse_type_scope(exactly, bound, begin);
  }

  Scope parse_scope() {
    Scope scope;
    Span begin = cur().span;
    bool exactly = accept(Tok::Exactly);
    int bound = expect_number();
    if ((is(Tok::Ident) && at(1).kind != Tok::Colon) || is(Tok::Unsupported)) {
      scope.overrides.push_back(parse_type_scope(exactly, bound, begin));
      while (accept(Tok::Comma)) scope.overrides.push_back(parse_type_scope());
      return scope;
    }
    if (bound < 1) {
      throw LangError(LangErrorCode::ParseError, begin, "default scope must be at least 1");
    }
    scope.default_bound = bound;
    scope.default_exactly = exactly;
    if (accept(Tok::But)) {
      do {
        scope.overrides.push_back(parse_type_scope());
      } while (accept(Tok::Comma));
    }
    return scope;
  }

  // -- formulas --------------------------------------------------------------

  FormulaPtr parse_block() {
    std::uint32_t begin = cur().span.begin;
    expect(Tok::LBrace);
    std::vector<FormulaPtr> children;
    while (!is(Tok::RBrace)) {
      if (is(Tok::End)) expect(Tok::RBrace);
      children.push_back(parse_formula());
    }
    expect(Tok::RBrace);
    return make_block(std::move(children), span_from(begin));
  }

  FormulaPtr parse_formula() { return parse_or(); }

  FormulaPtr parse_or() {
    std::uint32_t begin = cur().span.begin;
    auto f = parse_iff();
    while (is(Tok::Or) || is(Tok::BarBar)) {
      advance();
      f = make_binary(BinaryOp::Or, f, parse_iff(), span_from(begin));
    }
    return f;
  }

  FormulaPtr parse_iff() {
    std::uint32_t begin = cur().span.begin;
    auto f = parse_implies();
    while (is(Tok::Iff) || is(Tok::DoubleArrow)) {
      advance();
      f = make_binary(BinaryOp::Iff, f, parse_implies(), span_from(begin));
    }
    return f;
  }

  FormulaPtr parse_implies() {
    std::uint32_t begin = cur().span.begin;
    auto f = parse_and();
    if (is(Tok::Implies) || is(Tok::FatArrow)) {
      advance();
      auto rhs = parse_implies();
      if (is(Tok::Unsupported) && cur().text == "else") unsupported("implies-else");
      f = make_binary(BinaryOp::Implies, f, rhs, span_from(begin));
    }
    return f;
  }

  FormulaPtr parse_and() {
    std::uint32_t begin = cur().span.begin;
    auto f = parse_unary_formula();
    while (is(Tok::And) || is(Tok::AmpAmp)) {
      advance();
      f = make_binary(BinaryOp::And, f, parse_unary_formula(), span_from(begin));
    }
    return f;
  }

  [[nodiscard]] bool at_quant_decls() const {
    std::size_t k = 1;
    if (at(k).kind == Tok::Unsupported && at(k).text == "disj") return true;
    if (at(k).kind != Tok::Ident) return false;
    ++k;
    while (at(k).kind == Tok::Comma && at(k + 1).kind == Tok::Ident) k += 2;
    return at(k).kind == Tok::Colon;
  }

  FormulaPtr parse_unary_formula() {
    std::uint32_t begin = cur().span.begin;
    if (is(Tok::Not) || is(Tok::Bang)) {
      advance();
      return make_not(parse_unary_formula(), span_from(begin));
    }
    if (is(Tok::Unsupported) && cur().text == "let") unsupported("let");
    switch (cur().kind) {
      case Tok::All:
      case Tok::Some:
      case Tok::No:
      case Tok::Lone:
      case Tok::One:
        if (is(Tok::All) || at_quant_decls()) return parse_quant();
        return parse_mult();
      case Tok::LBrace:
        return parse_block();
      default:
        return parse_atom_formula();
    }
  }

  FormulaPtr parse_quant() {
    std::uint32_t begin = cur().span.begin;
    auto f = std::make_shared<Formula>();
    f->kind = FormulaKind::Quant;
    switch (advance().kind) {
      case Tok::All: f->quant = QuantKind::All; break;
      case Tok::Some: f->quant = QuantKind::Some; break;
      case Tok::No: f->quant = QuantKind::No; break;
      case Tok::Lone: f->quant = QuantKind::Lone; break;
      default: f->quant = QuantKind::One; break;
    }
    do {
      if (is(Tok::Unsupported) && cur().text == "disj") unsupported("disj");
      std::vector<std::pair<std::string, Span>> names;
      do {
        Span s = cur().span;
        names.emplace_back(expect_ident(), s);
      } while (accept(Tok::Comma));
      expect(Tok::Colon);
      if (is_mult_keyword(cur().kind)) {
        if (cur().kind != Tok::One) unsupported("higher-order quantification");
        advance();
      }
      auto bound = parse_expr();
      for (auto& [name, span] : names) f->decls.push_back({name, -1, bound, span});
    } while (accept(Tok::Comma));
    if (is(Tok::LBrace)) {
      f->lhs = parse_block();
    } else {
      expect(Tok::Bar);
      f->lhs = parse_formula();
    }
    f->span = span_from(begin);
    return f;
  }

  FormulaPtr parse_mult() {
    std::uint32_t begin = cur().span.begin;
    auto f = std::make_shared<Formula>();
    f->kind = FormulaKind::Mult;
    switch (advance().kind) {
      case Tok::Some: f->mult = MultKind::Some; break;
      case Tok::No: f->mult = MultKind::No; break;
      case Tok::Lone: f->mult = MultKind::Lone; break;
      default: f->mult = MultKind::One; break;
    }
    f->left = parse_expr();
    f->span = span_from(begin);
    return f;
  }

  [[nodiscard]] bool at_compare() const {
    switch (cur().kind) {
      case Tok::In:
      case Tok::Eq:
      case Tok::Neq:
        return true;
      case Tok::Not:
      case Tok::Bang:
        return at(1).kind == Tok::In;
      default:
        return false;
    }
  }

  [[nodiscard]] bool continues_expression() const {
    switch (cur().kind) {
      case Tok::Dot:
      case Tok::LBracket:
      case Tok::Plus:
      case Tok::Minus:
      case Tok::Amp:
      case Tok::Arrow:
        return true;
      default:
        return at_compare();
    }
  }

  FormulaPtr parse_atom_formula() {
    std::uint32_t begin = cur().span.begin;
    if (is(Tok::LParen)) {
      std::size_t save = pos_;
      std::optional<LangError> formula_error;
      try {
        advance();
        auto inner = parse_formula();
        expect(Tok::RParen);
        if (!continues_expression()) {
          auto f = std::make_shared<Formula>();
          f->kind = FormulaKind::Paren;
          f->lhs = inner;
          f->span = span_from(begin);
          return f;
        }
      } catch (const LangError& e) {
        formula_error = e;
      }
      pos_ = save;
      try {
        return parse_expression_formula(begin);
      } catch (const LangError& e) {
        if (formula_error && formula_error->span().begin > e.span().begin) throw *formula_error;
        throw;
      }
    }
    return parse_expression_formula(begin);
  }

  FormulaPtr parse_expression_formula(std::uint32_t begin) {
    auto lhs = parse_expr();
    if (at_compare()) {
      auto f = std::make_shared<Formula>();
      f->kind = FormulaKind::Compare;
      if (accept(Tok::In)) {
        f->cmp = CompareOp::In;
      } else if (accept(Tok::Eq)) {
        f->cmp = CompareOp::Eq;
      } else if (accept(Tok::Neq)) {
        f->cmp = CompareOp::Neq;
      } else {
        advance();
        expect(Tok::In);
        f->cmp = CompareOp::NotIn;
      }
      f->left = lhs;
      f->right = parse_expr();
      f->span = span_from(begin);
      return f;
    }
    // A bare name or name[args] in formula position is a predicate call.
    auto f = std::make_shared<Formula>();
    f->kind = FormulaKind::PredCall;
    f->span = span_from(begin);
    if (lhs->kind == ExprKind::Name) {
      f->name = lhs->name;
      return f;
    }
    if (lhs->kind == ExprKind::BoxJoin && lhs->lhs->kind == ExprKind::Name) {
      f->name = lhs->lhs->name;
      f->args = lhs->args;
      return f;
    }
    fail("expected a formula", {"in", "=", "!="});
  }

  // -- expressions -----------------------------------------------------------

  ExprPtr parse_expr() { return parse_union(); }

  ExprPtr parse_union() {
    std::uint32_t begin = cur().span.begin;
    auto e = parse_intersect();
    while (is(Tok::Plus) || is(Tok::Minus)) {
      ExprKind kind = advance().kind == Tok::Plus ? ExprKind::Union : ExprKind::Diff;
      e = make_binary(kind, e, parse_intersect(), span_from(begin));
    }
    return e;
  }

  ExprPtr parse_intersect() {
    std::uint32_t begin = cur().span.begin;
    auto e = parse_product();
    while (accept(Tok::Amp)) {
      e = make_binary(ExprKind::Intersect, e, parse_product(), span_from(begin));
    }
    return e;
  }

  ExprPtr parse_product() {
    std::uint32_t begin = cur().span.begin;
    auto e = parse_join();
    while (is(Tok::Arrow) || (is_mult_keyword(cur().kind) && at(1).kind == Tok::Arrow)) {
      if (!is(Tok::Arrow)) unsupported("arrow multiplicities in expressions");
      advance();
      if (is_mult_keyword(cur().kind)) unsupported("arrow multiplicities in expressions");
      e = make_binary(ExprKind::Product, e, parse_join(), span_from(begin));
    }
    return e;
  }

  ExprPtr parse_join() {
    std::uint32_t begin = cur().span.begin;
    auto e = parse_prefix();
    for (;;) {
      if (accept(Tok::Dot)) {
        e = make_binary(ExprKind::Join, e, parse_prefix(), span_from(begin));
      } else if (accept(Tok::LBracket)) {
        auto box = std::make_shared<Expr>();
        box->kind = ExprKind::BoxJoin;
        box->lhs = e;
        if (!is(Tok::RBracket)) {
          do {
            box->args.push_back(parse_expr());
          } while (accept(Tok::Comma));
        }
        expect(Tok::RBracket);
        box->span = span_from(begin);
        e = box;
      } else {
        return e;
      }
    }
  }

  ExprPtr parse_prefix() {
    std::uint32_t begin = cur().span.begin;
    ExprKind kind;
    switch (cur().kind) {
      case Tok::Tilde: kind = ExprKind::Transpose; break;
      case Tok::Caret: kind = ExprKind::Closure; break;
      case Tok::Star: kind = ExprKind::ReflexiveClosure; break;
      default: return parse_primary();
    }
    advance();
    auto operand = parse_prefix();
    return make_unary(kind, operand, span_from(begin));
  }

  ExprPtr parse_primary() {
    std::uint32_t begin = cur().span.begin;
    auto leaf = [&](ExprKind kind) {
      advance();
      auto e = std::make_shared<Expr>();
      e->kind = kind;
      e->span = span_from(begin);
      return e;
    };
    switch (cur().kind) {
      case Tok::Ident: {
        auto name = advance().text;
        return make_name(name, span_from(begin));
      }
      case Tok::Univ: return leaf(ExprKind::Univ);
      case Tok::Iden: return leaf(ExprKind::Iden);
      case Tok::None: return leaf(ExprKind::None);
      case Tok::LParen: {
        advance();
        auto e = parse_expr();
        expect(Tok::RParen);
        return e;
      }
      case Tok::Unsupported:
        if (cur().text == "#") unsupported("cardinality '#'");
        unsupported(cur().text);
      case Tok::LBrace:
        unsupported("set comprehension");
      default:
        fail("expected an expression but found '" + std::string(to_string(cur().kind)) + "'",
             {"identifier", "univ", "iden", "none", "("});
    }
  }

  std::string_view text_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int fact_count_ = 0;
  int run_count_ = 0;
  int check_count_ = 0;
};

}  // namespace

SourceModel parse(std::string_view text, const ParseOptions& options) {
  Parser parser(text, tokenize(text, LexOptions{options.max_bytes}));
  return parser.parse_model();
}

FormulaPtr parse_formula(std::string_view text) {
  Parser parser(text, tokenize(text));
  return parser.parse_lone_formula();
}

ExprPtr parse_expression(std::string_view text) {
  Parser parser(text, tokenize(text));
  return parser.parse_lone_expression();
}

}  // namespace a4f
