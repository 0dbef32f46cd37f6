#include "ragulator/llm/tasks.h"

#include <atomic>
#include <optional>

#include <nlohmann/json.hpp>

#include "absl/strings/str_cat.h"
#include "ragulator/common/io.h"
#include "ragulator/common/parallel.h"
#include "ragulator/common/status.h"
#include "ragulator/common/strings.h"
#include "ragulator/text/sentences.h"

namespace ragulator::llm {

absl::StatusOr<JudgeScore> JudgeOoc(const CompletionClient& client, std::string_view candidate,
                                    std::string_view reference, const RetryPolicy& retry) {
  CompletionRequest request;
  request.prompt = RenderJudgePrompt(candidate, reference);
  request.max_tokens = 1;
  request.logprobs = true;
  auto completion = CompleteWithRetry(client, request, retry);
  if (!completion.ok()) return completion.status();
  return ScoreJudgeLogprobs(completion->top_logprobs);
}

int EffectiveParseRetries(const LabelOptions& options) {
  if (options.parse_retries >= 0) return options.parse_retries;
  return IsZeroShot(options.method) ? 0 : 2;
}

absl::StatusOr<LabelOutcome> LabelPair(const CompletionClient& client,
                                       const datagen::SentenceContextPair& pair,
                                       const LabelOptions& options) {
  if (pair.label != datagen::Label::kInContext) {
    return absl::FailedPreconditionError(absl::StrCat(
        "pair ", pair.pair_id, " is out-of-context; only in-context pairs are labelled"));
  }
  LabelOutcome outcome;
  outcome.pair_id = pair.pair_id;
  outcome.method = options.method;
  const std::vector<std::string> sentences = text::SplitSentenceTexts(pair.context);
  if (sentences.empty()) {
    outcome.warnings.push_back("context has no sentences");
    return outcome;
  }
  CompletionRequest request;
  auto prompt = RenderLabelPrompt(options.method, pair.sentence, sentences);
  if (!prompt.ok()) return prompt.status();
  request.prompt = *std::move(prompt);
  request.max_tokens = options.max_tokens;

  const int tries = 1 + EffectiveParseRetries(options);
  for (int t = 0; t < tries; ++t) {
    auto completion = CompleteWithRetry(client, request, options.retry);
    ++outcome.completions;
    if (!completion.ok()) return completion.status();
    auto parsed = ParseLabelResponse(completion->text, sentences.size(), IsCot(options.method));
    if (!parsed.ok()) {
      outcome.warnings.push_back(std::string(parsed.status().message()));
      continue;
    }
    outcome.warnings.insert(outcome.warnings.end(), parsed->warnings.begin(),
                            parsed->warnings.end());
    outcome.annotation = window::RelevanceAnnotation{pair.pair_id, parsed->indices};
    return outcome;
  }
  return outcome;
}

absl::StatusOr<std::vector<LabelOutcome>> LabelPairs(
    const CompletionClient& client, std::span<const datagen::SentenceContextPair> pairs,
    const LabelOptions& options, unsigned max_in_flight) {
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].label == datagen::Label::kInContext) todo.push_back(i);
  }
  std::vector<std::optional<absl::StatusOr<LabelOutcome>>> results(todo.size());
  // Pairs not yet started are abandoned after the first failure.
  std::atomic<bool> failed{false};
  ParallelFor(
      todo.size(),
      [&](std::size_t k) {
        if (failed.load()) return;
        results[k] = LabelPair(client, pairs[todo[k]], options);
        if (!results[k]->ok()) failed.store(true);
      },
      std::max(1u, max_in_flight));
  for (std::size_t k = 0; k < results.size(); ++k) {
    if (results[k] && !results[k]->ok()) {
      return PrefixStatus(results[k]->status(),
                          absl::StrCat("pair ", pairs[todo[k]].pair_id, ": "));
    }
  }
  std::vector<LabelOutcome> out;
  out.reserve(results.size());
  for (auto& r : results) out.push_back(**std::move(r));
  return out;
}

std::string LabelOutcomeToJson(const LabelOutcome& o) {
  nlohmann::ordered_json j;
  j["pair_id"] = o.pair_id;
  j["method"] = std::string(ToString(o.method));
  j["relevant_sentence_indices"] =
      o.annotation ? nlohmann::ordered_json(o.annotation->relevant_sentence_indices)
                   : nlohmann::ordered_json(nullptr);
  j["unlabellable"] = o.unlabellable();
  j["warnings"] = o.warnings;
  j["completions"] = o.completions;
  return j.dump();
}

absl::StatusOr<LabelOutcome> ParseLabelOutcome(std::string_view json_line) {
  const auto j = nlohmann::json::parse(json_line.begin(), json_line.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) return absl::InvalidArgumentError("not a JSON object");
  LabelOutcome o;
  const auto id = j.find("pair_id");
  const auto method = j.find("method");
  if (id == j.end() || !id->is_string() || method == j.end() || !method->is_string()) {
    return absl::InvalidArgumentError("missing or non-string 'pair_id' / 'method'");
  }
  o.pair_id = id->get<std::string>();
  auto name = ParseTemplateName(method->get<std::string>());
  if (!name.ok() || !IsLabelTemplate(*name)) {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown labelling method '", method->get<std::string>(), "'"));
  }
  o.method = *name;
  const auto indices = j.find("relevant_sentence_indices");
  if (indices != j.end() && !indices->is_null()) {
    if (!indices->is_array()) {
      return absl::InvalidArgumentError("'relevant_sentence_indices' must be an array or null");
    }
    window::RelevanceAnnotation ann{o.pair_id, {}};
    for (const auto& v : *indices) {
      if (!v.is_number_unsigned()) {
        return absl::InvalidArgumentError("sentence indices must be non-negative integers");
      }
      ann.relevant_sentence_indices.push_back(v.get<std::size_t>());
    }
    o.annotation = std::move(ann);
  }
  if (const auto w = j.find("warnings"); w != j.end() && w->is_array()) {
    for (const auto& s : *w) {
      if (s.is_string()) o.warnings.push_back(s.get<std::string>());
    }
  }
  if (const auto c = j.find("completions"); c != j.end() && c->is_number_integer()) {
    o.completions = c->get<int>();
  }
  return o;
}

absl::Status WriteLabelOutcomesJsonl(const std::string& path,
                                     std::span<const LabelOutcome> outcomes) {
  std::string out;
  for (const LabelOutcome& o : outcomes) {
    out += LabelOutcomeToJson(o);
    out += '\n';
  }
  return WriteFile(path, out);
}

absl::StatusOr<std::vector<LabelOutcome>> ReadLabelOutcomesJsonl(const std::string& path) {
  auto lines = ReadJsonLines(path);
  if (!lines.ok()) return lines.status();
  std::vector<LabelOutcome> out;
  out.reserve(lines->size());
  for (const NumberedLine& line : *lines) {
    auto o = ParseLabelOutcome(line.text);
    if (!o.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ":", line.number, ": ", o.status().message()));
    }
    out.push_back(*std::move(o));
  }
  return out;
}

}  // namespace ragulator::llm
