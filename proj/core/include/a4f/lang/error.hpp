#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace a4f {

/// Half-open byte range into a model source.
struct Span {
  std::uint32_t begin = 0;
  std::uint32_t end = 0;

  [[nodiscard]] std::uint32_t size() const { return end - begin; }
  friend bool operator==(const Span&, const Span&) = default;
};

struct LineCol {
  std::uint32_t line = 1;
  std::uint32_t column = 1;
};

/// 1-based line/column of a byte offset.
LineCol line_col(std::string_view text, std::uint32_t offset);

enum class LangErrorCode {
  LexError,
  ParseError,
  Unsupported,
  CodeTooLarge,
  UnknownName,
  ArityMismatch,
  TypeMismatch,
  DuplicateName,
  CyclicExtends,
  RecursivePredicate,
  ScopeTooLarge,
};

std::string_view to_string(LangErrorCode code);

/// Error raised while lexing, parsing or resolving a model.
///
/// Messages name identifiers only and never quote source text, so they are
/// safe to show to a user who cannot see every paragraph of the model.
class LangError : public std::runtime_error {
 public:
  LangError(LangErrorCode code, Span span, std::string message,
            std::vector<std::string> expected = {});

  [[nodiscard]] LangErrorCode code() const { return code_; }
  [[nodiscard]] Span span() const { return span_; }
  [[nodiscard]] const std::vector<std::string>& expected() const { return expected_; }

 private:
  LangErrorCode code_;
  Span span_;
  std::vector<std::string> expected_;
};

}  // namespace a4f
