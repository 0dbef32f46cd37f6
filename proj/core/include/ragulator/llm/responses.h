#ifndef RAGULATOR_LLM_RESPONSES_H_
#define RAGULATOR_LLM_RESPONSES_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace ragulator::llm {

inline constexpr std::string_view kAnswerMarker = "The answer is:";

struct ParsedLabel {
  // Sorted, unique, all < n_sentences.
  std::vector<std::size_t> indices;
  std::vector<std::string> warnings;
};

// With `cot`, only the text after the last "The answer is:" (any case) is
// read. The first bracketed list is used if present, else the first
// non-empty line; its comma-separated integers are kept, non-integers and
// out-of-range indices are dropped with a warning. InvalidArgument
// ("parse failure: ...") when nothing usable remains.
absl::StatusOr<ParsedLabel> ParseLabelResponse(std::string_view text, std::size_t n_sentences,
                                               bool cot);

struct TokenLogprob {
  std::string token;
  double logprob = 0.0;

  friend bool operator==(const TokenLogprob&, const TokenLogprob&) = default;
};

struct JudgeScore {
  double probability = 1.0;  // P(OOC)
  double logprob_0 = 0.0;
  double logprob_1 = 0.0;
  bool estimated_0 = false;
  bool estimated_1 = false;
};

// First-position top logprobs (at most 10, each finite and <= 0) to P(OOC) =
// exp(l1) / (exp(l0) + exp(l1)). Tokens match "0" / "1" after trimming
// whitespace; the first match wins. A token missing from the list gets the
// sum of every other entry's logprob. If both are missing P(OOC) = 1.
absl::StatusOr<JudgeScore> ScoreJudgeLogprobs(std::span<const TokenLogprob> top);

}  // namespace ragulator::llm

#endif  // RAGULATOR_LLM_RESPONSES_H_
