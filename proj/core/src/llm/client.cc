#include "ragulator/llm/client.h"

#include <algorithm>
#include <cmath>
#include <thread>

#include "absl/strings/str_cat.h"
#include "ragulator/common/status.h"
#include "ragulator/common/strings.h"
#include "ragulator/features/classical.h"
#include "ragulator/llm/prompts.h"
#include "ragulator/text/preprocess.h"

namespace ragulator::llm {

bool IsTransient(const absl::Status& status) {
  return absl::IsUnavailable(status) || absl::IsDeadlineExceeded(status) ||
         absl::IsResourceExhausted(status);
}

absl::StatusOr<Completion> CompleteWithRetry(const CompletionClient& client,
                                             const CompletionRequest& request,
                                             const RetryPolicy& policy, int* attempts) {
  const int max_attempts = std::max(1, policy.max_attempts);
  std::chrono::milliseconds backoff = policy.initial_backoff;
  absl::StatusOr<Completion> result = absl::UnknownError("no attempt made");
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    if (attempts != nullptr) *attempts = attempt;
    result = client.Complete(request);
    if (result.ok() || !IsTransient(result.status()) || attempt == max_attempts) break;
    if (policy.sleep) {
      policy.sleep(backoff);
    } else {
      std::this_thread::sleep_for(backoff);
    }
    backoff = std::chrono::milliseconds(
        static_cast<std::int64_t>(static_cast<double>(backoff.count()) * policy.multiplier));
  }
  if (result.ok()) return result;
  if (IsTransient(result.status()) && max_attempts > 1) {
    return AttachProvider(
        PrefixStatus(result.status(),
                     absl::StrCat(client.Name(), " failed after ", max_attempts, " attempts: ")),
        client.Name());
  }
  return AttachProvider(result.status(), client.Name());
}

ScriptedCompletionClient::ScriptedCompletionClient(std::vector<absl::StatusOr<Completion>> script)
    : script_(std::move(script)) {}

absl::StatusOr<Completion> ScriptedCompletionClient::Complete(
    const CompletionRequest& request) const {
  std::lock_guard<std::mutex> lock(mu_);
  requests_.push_back(request);
  if (next_ >= script_.size()) {
    return absl::FailedPreconditionError("completion script exhausted");
  }
  return script_[next_++];
}

std::vector<CompletionRequest> ScriptedCompletionClient::requests() const {
  std::lock_guard<std::mutex> lock(mu_);
  return requests_;
}

absl::StatusOr<Completion> OverlapCompletionClient::Complete(
    const CompletionRequest& request) const {
  if (auto label = DecodeLabelPrompt(request.prompt); label.ok()) {
    const text::PreprocessedText candidate = text::Preprocess(label->candidate);
    std::size_t best = 0;
    double best_score = -1.0;
    for (std::size_t i = 0; i < label->sentences.size(); ++i) {
      const double score =
          features::PrecisionScore(candidate, text::Preprocess(label->sentences[i]));
      if (score > best_score) {
        best = i;
        best_score = score;
      }
    }
    Completion out;
    out.text = absl::StrCat("[", best, "]");
    if (IsCot(label->name)) {
      out.text = absl::StrCat("Context sentence ", best,
                              " shares the most content words with the candidate sentence. ",
                              ToAbsl(kAnswerMarker), " ", out.text);
    }
    return out;
  }
  if (auto judge = DecodeJudgePrompt(request.prompt); judge.ok()) {
    const double precision = features::PrecisionScore(text::Preprocess(judge->candidate),
                                                      text::Preprocess(judge->reference));
    const double p_ooc = std::clamp(1.0 - precision, 0.01, 0.99);
    Completion out;
    out.text = p_ooc >= 0.5 ? "1" : "0";
    out.top_logprobs = {{"1", std::log(p_ooc)}, {"0", std::log(1.0 - p_ooc)}};
    if (p_ooc < 0.5) std::swap(out.top_logprobs[0], out.top_logprobs[1]);
    return out;
  }
  return absl::InvalidArgumentError("stub completion client only answers rendered prompts");
}

}  // namespace ragulator::llm
