#ifndef RAGULATOR_LLM_PROMPTS_H_
#define RAGULATOR_LLM_PROMPTS_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace ragulator::llm {

enum class TemplateName {
  kLabel0Shot,
  kLabel0ShotCot,
  kLabel5Shot,
  kLabel5ShotCot,
  kJudgeDirect,
};

inline constexpr TemplateName kLabelTemplates[] = {
    TemplateName::kLabel0Shot, TemplateName::kLabel0ShotCot, TemplateName::kLabel5Shot,
    TemplateName::kLabel5ShotCot};

// "label_0shot", "label_0shot_cot", "label_5shot", "label_5shot_cot",
// "judge_direct".
std::string_view ToString(TemplateName name);
absl::StatusOr<TemplateName> ParseTemplateName(std::string_view name);

bool IsCot(TemplateName name);
bool IsZeroShot(TemplateName name);
bool IsLabelTemplate(TemplateName name);

// Raw template text with {candidate}, {context_sentences} / {reference}
// placeholders.
std::string_view TemplateBody(TemplateName name);

// Keeps inserted text on one line: '\' -> "\\", newline -> "\n", carriage
// return -> "\r". Each sentence line is framed by its fixed prefix and
// suffix, so quotes inside need no escaping.
std::string EscapePromptText(std::string_view text);
std::string UnescapePromptText(std::string_view text);

// Lines `i. """s"""`, numbered from 0, joined by newlines.
std::string FormatContextSentences(std::span<const std::string> sentences);

// Placeholders are substituted in one pass; inserted text is never rescanned.
// InvalidArgument for a judge template or an empty sentence list.
absl::StatusOr<std::string> RenderLabelPrompt(TemplateName name, std::string_view candidate,
                                              std::span<const std::string> sentences);

// The candidate is escaped; the reference is inserted verbatim as the last
// section.
std::string RenderJudgePrompt(std::string_view candidate, std::string_view reference);

// Inverse of the renderers, matched against the actual-task section.
struct DecodedLabelPrompt {
  TemplateName name = TemplateName::kLabel0Shot;
  std::string candidate;
  std::vector<std::string> sentences;

  friend bool operator==(const DecodedLabelPrompt&, const DecodedLabelPrompt&) = default;
};
absl::StatusOr<DecodedLabelPrompt> DecodeLabelPrompt(std::string_view prompt);

struct DecodedJudgePrompt {
  std::string candidate;
  std::string reference;

  friend bool operator==(const DecodedJudgePrompt&, const DecodedJudgePrompt&) = default;
};
absl::StatusOr<DecodedJudgePrompt> DecodeJudgePrompt(std::string_view prompt);

}  // namespace ragulator::llm

#endif  // RAGULATOR_LLM_PROMPTS_H_
