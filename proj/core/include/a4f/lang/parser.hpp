#pragma once

#include <string_view>

#include "a4f/lang/ast.hpp"

namespace a4f {

struct ParseOptions {
  std::size_t max_bytes = 64 * 1024;
};

/// Parses a complete model into paragraphs.
///
/// Formula precedence, loosest first: `or`, `iff`, `implies` (right
/// associative), `and`, `not`. Expression precedence, loosest first:
/// `+ -`, `&`, `->`, `.` and `[]`, then the prefix operators `~ ^ *`.
/// Throws LangError (LexError, ParseError, Unsupported, CodeTooLarge).
SourceModel parse(std::string_view text, const ParseOptions& options = {});

/// Parses a standalone formula or expression; handy for tools and tests.
FormulaPtr parse_formula(std::string_view text);
ExprPtr parse_expression(std::string_view text);

}  // namespace a4f
