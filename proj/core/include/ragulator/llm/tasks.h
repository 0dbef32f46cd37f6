#ifndef RAGULATOR_LLM_TASKS_H_
#define RAGULATOR_LLM_TASKS_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ragulator/datagen/records.h"
#include "ragulator/llm/client.h"
#include "ragulator/llm/prompts.h"
#include "ragulator/llm/responses.h"
#include "ragulator/window/windows.h"

namespace ragulator::llm {

// Renders the judge prompt, asks for one token with logprobs and scores it.
absl::StatusOr<JudgeScore> JudgeOoc(const CompletionClient& client, std::string_view candidate,
                                    std::string_view reference, const RetryPolicy& retry = {});

struct LabelOptions {
  TemplateName method = TemplateName::kLabel0Shot;
  RetryPolicy retry;
  // Extra completions after a parse failure; -1 = 0 for zero-shot methods,
  // 2 otherwise.
  int parse_retries = -1;
  int max_tokens = 1024;
};

int EffectiveParseRetries(const LabelOptions& options);

struct LabelOutcome {
  std::string pair_id;
  TemplateName method = TemplateName::kLabel0Shot;
  // Unset when the pair is unlabellable.
  std::optional<window::RelevanceAnnotation> annotation;
  std::vector<std::string> warnings;
  int completions = 0;

  bool unlabellable() const { return !annotation.has_value(); }
  friend bool operator==(const LabelOutcome&, const LabelOutcome&) = default;
};

// Splits the context into sentences, renders, completes and parses. Parse
// failures are retried per the options, then reported as unlabellable.
// FailedPrecondition for OOC pairs; transport errors propagate after the
// retry policy.
absl::StatusOr<LabelOutcome> LabelPair(const CompletionClient& client,
                                       const datagen::SentenceContextPair& pair,
                                       const LabelOptions& options);

// Labels in-context pairs with at most `max_in_flight` concurrent requests,
// in input order. OOC pairs are skipped. The first error is returned with the
// pair id prefixed.
absl::StatusOr<std::vector<LabelOutcome>> LabelPairs(
    const CompletionClient& client, std::span<const datagen::SentenceContextPair> pairs,
    const LabelOptions& options, unsigned max_in_flight);

// JSONL rows {pair_id, method, relevant_sentence_indices (null when
// unlabellable), unlabellable, warnings, completions}.
std::string LabelOutcomeToJson(const LabelOutcome& outcome);
absl::StatusOr<LabelOutcome> ParseLabelOutcome(std::string_view json_line);
absl::Status WriteLabelOutcomesJsonl(const std::string& path,
                                     std::span<const LabelOutcome> outcomes);
absl::StatusOr<std::vector<LabelOutcome>> ReadLabelOutcomesJsonl(const std::string& path);

}  // namespace ragulator::llm

#endif  // RAGULATOR_LLM_TASKS_H_
