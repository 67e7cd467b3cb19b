#include "a4f/challenge/challenge.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace a4f {

namespace {

bool auto_named(const std::string& name) { return name.find('$') != std::string::npos; }

void rename(Paragraph& p, const std::string& name) {
  p.name = name;
  if (p.is_command()) p.command.name = name;
}

// Commands live apart from sigs, fields, facts, predicates and assertions.
std::string namespaced(const Paragraph& p, const std::string& name) { return (p.is_command() ? "cmd:" : "decl:") + name; }

CommandKind kind_of(const Paragraph& p) {
  return p.kind == ParagraphKind::CheckCmd ? CommandKind::Check : CommandKind::Run;
}

}  // namespace

const CommandEntry* SplitModel::find_command(std::string_view name) const {
  for (const auto& c : command_index) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

SplitModel split(const SourceModel& model) {
  SplitModel out;
  std::uint32_t kept = 0;
  for (const auto& p : model.paragraphs) {
    if (p.is_command()) out.command_index.push_back({p.command.name, kind_of(p), p.secret});
    if (!p.secret) continue;
    out.public_text.append(model.text, kept, p.marker.begin - kept);
    out.secrets.push_back({std::string(model.source_of(p)), p.name});
    kept = p.span.end;
  }
  out.public_text.append(model.text, kept, std::string::npos);
  return out;
}

SplitModel split(std::string_view text, const ParseOptions& options) { return split(parse(text, options)); }

std::string_view to_string(ChallengeErrorCode code) {
  switch (code) {
    case ChallengeErrorCode::SecretNameClash: return "SecretNameClash";
    case ChallengeErrorCode::UnknownCommand: return "UnknownCommand";
  }
  return "ChallengeError";
}

SourceModel merge(const std::vector<SecretParagraph>& secrets, std::string_view submitted,
                  const ParseOptions& options) {
  SourceModel pub = parse(submitted, options);

  std::string text(submitted);
  text += "\n";
  for (const auto& s : secrets) text += "//SECRET\n" + s.source + "\n";
  ParseOptions unlimited = options;
  unlimited.max_bytes = std::max(options.max_bytes, text.size());
  SourceModel merged = parse(text, unlimited);
  const std::size_t npub = pub.paragraphs.size();
  if (merged.paragraphs.size() != npub + secrets.size()) {
    throw std::logic_error("secret paragraphs did not parse back one for one");
  }

  // Secrets keep their names; anonymous public paragraphs are numbered in
  // order around the numbers the secrets hold, as in the full model.
  std::set<std::string> reserved;
  std::set<std::string> secret_names;
  for (std::size_t i = 0; i < secrets.size(); ++i) {
    Paragraph& p = merged.paragraphs[npub + i];
    rename(p, secrets[i].name);
    if (auto_named(p.name)) reserved.insert(p.name);
    for (const auto& n : p.declared_names()) {
      if (!auto_named(n)) secret_names.insert(namespaced(p, n));
    }
  }
  std::map<std::string, int> next;
  for (std::size_t i = 0; i < npub; ++i) {
    Paragraph& p = merged.paragraphs[i];
    for (const auto& n : p.declared_names()) {
      if (!auto_named(n) && secret_names.count(namespaced(p, n))) {
        throw ChallengeError(ChallengeErrorCode::SecretNameClash,
                             "the submission declares '" + n + "', which a secret paragraph already declares");
      }
    }
    if (!auto_named(p.name)) continue;
    std::string prefix = p.name.substr(0, p.name.find('$') + 1);
    int& k = next[prefix];
    while (reserved.count(prefix + std::to_string(k))) ++k;
    rename(p, prefix + std::to_string(k++));
  }
  return merged;
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Solved: return "solved";
    case Verdict::Counterexample: return "counterexample";
    case Verdict::Witness: return "witness";
    case Verdict::NoWitness: return "no-witness";
    case Verdict::Error: return "error";
    case Verdict::ResourceLimit: return "resource-limit";
  }
  return "error";
}

OutcomeKind GradeResult::outcome() const {
  switch (verdict) {
    case Verdict::Solved:
    case Verdict::NoWitness: return OutcomeKind::Unsat;
    case Verdict::Counterexample:
    case Verdict::Witness: return OutcomeKind::Sat;
    case Verdict::Error: return OutcomeKind::Error;
    case Verdict::ResourceLimit: return OutcomeKind::ResourceLimit;
  }
  return OutcomeKind::Error;
}

GradeResult execute_on_view(const SplitModel& stored, std::string_view submitted, Access access,
                            std::string_view command, std::uint64_t skip, const FinderOptions& options,
                            const ParseOptions& parse_options) {
  SourceModel source =
      access == Access::Public ? merge(stored.secrets, submitted, parse_options) : parse(submitted, parse_options);
  const bool listed = access == Access::Private || stored.find_command(command) != nullptr;
  const bool present = std::any_of(source.paragraphs.begin(), source.paragraphs.end(),
                                   [&](const Paragraph& p) { return p.is_command() && p.command.name == command; });
  if (!listed || !present) {
    throw ChallengeError(ChallengeErrorCode::UnknownCommand, "no command named '" + std::string(command) + "'");
  }

  GradeResult result;
  result.command = std::string(command);
  ResolvedModel model;
  try {
    model = resolve(source);
  } catch (const LangError& e) {
    result.verdict = Verdict::Error;
    result.message = e.what();
    // Positions inside the appended secrets would locate hidden text.
    if (e.span().end > 0 && e.span().end <= submitted.size()) result.position = e.span();
    return result;
  }
  const ResolvedCommand* cmd = model.find_command(command);
  SolveOutcome out = enumerate(model, *cmd, skip, options);
  const bool check = cmd->kind == CommandKind::Check;
  switch (out.kind) {
    case OutcomeKind::Sat:
      result.verdict = check ? Verdict::Counterexample : Verdict::Witness;
      result.instance = std::move(out.instance);
      break;
    case OutcomeKind::Unsat: result.verdict = check ? Verdict::Solved : Verdict::NoWitness; break;
    case OutcomeKind::Error:
      result.verdict = Verdict::Error;
      result.message = out.message;
      break;
    case OutcomeKind::ResourceLimit:
      result.verdict = Verdict::ResourceLimit;
      result.message = out.message;
      break;
  }
  return result;
}

}  // namespace a4f
