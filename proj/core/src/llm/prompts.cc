#include "ragulator/llm/prompts.h"

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "ragulator/common/assets.h"
#include "ragulator/common/strings.h"

namespace ragulator::llm {
namespace {

constexpr std::string_view kCandidate = "{candidate}";
constexpr std::string_view kSentences = "{context_sentences}";
constexpr std::string_view kReference = "{reference}";
constexpr std::string_view kQuotes = R"(""")";

// Template split around its two placeholders.
struct TemplateParts {
  std::string_view prefix;
  std::string_view middle;
  std::string_view suffix;
};

TemplateParts Split(std::string_view body, std::string_view first, std::string_view second) {
  const std::size_t a = body.find(first);
  const std::size_t b = body.find(second, a + first.size());
  return {body.substr(0, a), body.substr(a + first.size(), b - a - first.size()),
          body.substr(b + second.size())};
}

std::string Render(const TemplateParts& parts, std::string_view first, std::string_view second) {
  return absl::StrCat(ToAbsl(parts.prefix), ToAbsl(first), ToAbsl(parts.middle), ToAbsl(second),
                      ToAbsl(parts.suffix));
}

bool StartsWith(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }
bool EndsWith(std::string_view s, std::string_view p) {
  return s.size() >= p.size() && s.substr(s.size() - p.size()) == p;
}

// Splits `prompt` as prefix + first + middle + second + suffix where `first`
// holds no newline.
absl::Status Unframe(std::string_view prompt, const TemplateParts& parts, std::string_view& first,
                     std::string_view& second) {
  if (!StartsWith(prompt, parts.prefix) || !EndsWith(prompt, parts.suffix) ||
      prompt.size() < parts.prefix.size() + parts.suffix.size()) {
    return absl::InvalidArgumentError("prompt does not match the template frame");
  }
  std::string_view body =
      prompt.substr(parts.prefix.size(), prompt.size() - parts.prefix.size() - parts.suffix.size());
  const std::size_t nl = body.find('\n');
  if (nl == std::string_view::npos || !StartsWith(body.substr(nl), parts.middle)) {
    return absl::InvalidArgumentError("prompt does not match the template frame");
  }
  first = body.substr(0, nl);
  second = body.substr(nl + parts.middle.size());
  return absl::OkStatus();
}

}  // namespace

std::string_view ToString(TemplateName name) {
  switch (name) {
    case TemplateName::kLabel0Shot:
      return "label_0shot";
    case TemplateName::kLabel0ShotCot:
      return "label_0shot_cot";
    case TemplateName::kLabel5Shot:
      return "label_5shot";
    case TemplateName::kLabel5ShotCot:
      return "label_5shot_cot";
    case TemplateName::kJudgeDirect:
      return "judge_direct";
  }
  return "unknown";
}

absl::StatusOr<TemplateName> ParseTemplateName(std::string_view name) {
  for (TemplateName t :
       {TemplateName::kLabel0Shot, TemplateName::kLabel0ShotCot, TemplateName::kLabel5Shot,
        TemplateName::kLabel5ShotCot, TemplateName::kJudgeDirect}) {
    if (ToString(t) == name) return t;
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown prompt template '", ToAbsl(name), "'"));
}

bool IsCot(TemplateName name) {
  return name == TemplateName::kLabel0ShotCot || name == TemplateName::kLabel5ShotCot;
}

bool IsZeroShot(TemplateName name) {
  return name == TemplateName::kLabel0Shot || name == TemplateName::kLabel0ShotCot;
}

bool IsLabelTemplate(TemplateName name) { return name != TemplateName::kJudgeDirect; }

std::string_view TemplateBody(TemplateName name) { return assets::Prompt(ToString(name)); }

std::string EscapePromptText(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\r':
        out += "\\r";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string UnescapePromptText(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '\\' || i + 1 == text.size()) {
      out += text[i];
      continue;
    }
    const char next = text[++i];
    if (next == 'n') {
      out += '\n';
    } else if (next == 'r') {
      out += '\r';
    } else if (next == '\\') {
      out += '\\';
    } else {
      out += '\\';
      out += next;
    }
  }
  return out;
}

std::string FormatContextSentences(std::span<const std::string> sentences) {
  std::string out;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (i > 0) out += '\n';
    absl::StrAppend(&out, i, ". ", ToAbsl(kQuotes), EscapePromptText(sentences[i]),
                    ToAbsl(kQuotes));
  }
  return out;
}

absl::StatusOr<std::string> RenderLabelPrompt(TemplateName name, std::string_view candidate,
                                              std::span<const std::string> sentences) {
  if (!IsLabelTemplate(name)) {
    return absl::InvalidArgumentError(
        absl::StrCat(ToAbsl(ToString(name)), " is not a labelling template"));
  }
  if (sentences.empty()) return absl::InvalidArgumentError("no context sentences to label");
  return Render(Split(TemplateBody(name), kCandidate, kSentences), EscapePromptText(candidate),
                FormatContextSentences(sentences));
}

std::string RenderJudgePrompt(std::string_view candidate, std::string_view reference) {
  return Render(Split(TemplateBody(TemplateName::kJudgeDirect), kCandidate, kReference),
                EscapePromptText(candidate), reference);
}

absl::StatusOr<DecodedLabelPrompt> DecodeLabelPrompt(std::string_view prompt) {
  for (TemplateName name : kLabelTemplates) {
    std::string_view candidate, block;
    if (!Unframe(prompt, Split(TemplateBody(name), kCandidate, kSentences), candidate, block)
             .ok()) {
      continue;
    }
    DecodedLabelPrompt out;
    out.name = name;
    out.candidate = UnescapePromptText(candidate);
    std::size_t start = 0;
    while (start <= block.size()) {
      std::size_t end = block.find('\n', start);
      if (end == std::string_view::npos) end = block.size();
      const std::string_view line = block.substr(start, end - start);
      const std::string number = absl::StrCat(out.sentences.size(), ". ");
      const std::string_view head = line.substr(0, number.size() + kQuotes.size());
      if (head != absl::StrCat(number, ToAbsl(kQuotes)) ||
          line.size() < number.size() + 2 * kQuotes.size() || !EndsWith(line, kQuotes)) {
        return absl::InvalidArgumentError(
            absl::StrCat("malformed context sentence line ", out.sentences.size()));
      }
      out.sentences.push_back(
          UnescapePromptText(line.substr(head.size(), line.size() - head.size() - kQuotes.size())));
      start = end + 1;
    }
    return out;
  }
  return absl::InvalidArgumentError("not a labelling prompt");
}

absl::StatusOr<DecodedJudgePrompt> DecodeJudgePrompt(std::string_view prompt) {
  std::string_view candidate, reference;
  if (absl::Status s =
          Unframe(prompt, Split(TemplateBody(TemplateName::kJudgeDirect), kCandidate, kReference),
                  candidate, reference);
      !s.ok()) {
    return absl::InvalidArgumentError("not a judge prompt");
  }
  return DecodedJudgePrompt{UnescapePromptText(candidate), std::string(reference)};
}

}  // namespace ragulator::llm
