#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "a4f/finder/finder.hpp"
#include "a4f/lang/parser.hpp"

namespace a4f {

struct CommandEntry {
  std::string name;
  CommandKind kind = CommandKind::Run;
  bool secret = false;

  friend bool operator==(const CommandEntry&, const CommandEntry&) = default;
};

/// Source text of one secret paragraph, without its marker.
struct SecretParagraph {
  std::string source;
  /// Name the paragraph had in the full model. Anonymous facts and commands
  /// keep their `fact$N` / `run$N` / `check$N` number across a merge.
  std::string name;

  friend bool operator==(const SecretParagraph&, const SecretParagraph&) = default;
};

/// Public and secret halves of a model.
struct SplitModel {
  /// The source with every secret paragraph and its marker cut out; all
  /// other bytes are kept as they were.
  std::string public_text;
  std::vector<SecretParagraph> secrets;
  /// Every command of the model in source order, secret ones included.
  std::vector<CommandEntry> command_index;

  [[nodiscard]] bool has_secrets() const { return !secrets.empty(); }
  [[nodiscard]] const CommandEntry* find_command(std::string_view name) const;
};

SplitModel split(const SourceModel& model);
/// Parses first; throws LangError.
SplitModel split(std::string_view text, const ParseOptions& options = {});

enum class ChallengeErrorCode { SecretNameClash, UnknownCommand };

std::string_view to_string(ChallengeErrorCode code);

class ChallengeError : public std::runtime_error {
 public:
  ChallengeError(ChallengeErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}
  [[nodiscard]] ChallengeErrorCode code() const { return code_; }

 private:
  ChallengeErrorCode code_;
};

/// The submission followed by the secrets, each behind a `//SECRET` line.
///
/// Throws LangError when the submission does not parse (positions refer to
/// the submission) and ChallengeError(SecretNameClash) when it declares a
/// name one of the secrets declares.
SourceModel merge(const std::vector<SecretParagraph>& secrets, std::string_view submitted,
                  const ParseOptions& options = {});

enum class Verdict { Solved, Counterexample, Witness, NoWitness, Error, ResourceLimit };

std::string_view to_string(Verdict verdict);

struct GradeResult {
  std::string command;
  Verdict verdict = Verdict::Error;
  std::optional<Instance> instance;  // Counterexample and Witness
  std::string message;               // Error and ResourceLimit
  /// Error location, only when it lies in the submitted text.
  std::optional<Span> position;

  /// The raw solver outcome the verdict came from.
  [[nodiscard]] OutcomeKind outcome() const;
};

/// Who is executing: holders of the public link run against the stored
/// secrets; holders of the private link run exactly what they submit.
enum class Access { Public, Private };

/// Runs `command` on the submission, merged with the stored secrets for
/// public access, and grades the outcome.
///
/// Throws LangError when the submission does not parse and ChallengeError
/// for a name clash or a command missing from the model. Resolution and
/// solver failures come back as Error and ResourceLimit verdicts.
GradeResult execute_on_view(const SplitModel& stored, std::string_view submitted, Access access,
                            std::string_view command, std::uint64_t skip, const FinderOptions& options = {},
                            const ParseOptions& parse_options = {});

}  // namespace a4f
