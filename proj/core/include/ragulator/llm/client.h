#ifndef RAGULATOR_LLM_CLIENT_H_
#define RAGULATOR_LLM_CLIENT_H_

#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ragulator/llm/responses.h"

namespace ragulator::llm {

struct CompletionRequest {
  std::string prompt;
  int max_tokens = 512;
  // Request the first position's top-10 token logprobs.
  bool logprobs = false;
};

struct Completion {
  std::string text;
  // Descending by logprob; empty unless requested.
  std::vector<TokenLogprob> top_logprobs;
};

// Implementations are stateless per request and safe for concurrent calls.
// Transport problems are Unavailable, DeadlineExceeded or ResourceExhausted.
class CompletionClient {
 public:
  virtual ~CompletionClient() = default;
  virtual absl::StatusOr<Completion> Complete(const CompletionRequest& request) const = 0;
  virtual std::string Name() const = 0;
};

bool IsTransient(const absl::Status& status);

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  // Defaults to std::this_thread::sleep_for.
  std::function<void(std::chrono::milliseconds)> sleep;
};

// Retries transient failures with exponential backoff. `attempts`, when
// given, receives the number of calls made. Failures carry the client name
// as their provider (see FailingProvider).
absl::StatusOr<Completion> CompleteWithRetry(const CompletionClient& client,
                                             const CompletionRequest& request,
                                             const RetryPolicy& policy, int* attempts = nullptr);

// Replays a fixed script, one entry per call, and records the requests.
// FailedPrecondition once the script is exhausted.
class ScriptedCompletionClient : public CompletionClient {
 public:
  explicit ScriptedCompletionClient(std::vector<absl::StatusOr<Completion>> script);
  absl::StatusOr<Completion> Complete(const CompletionRequest& request) const override;
  std::string Name() const override { return "scripted"; }
  std::vector<CompletionRequest> requests() const;

 private:
  mutable std::mutex mu_;
  std::vector<absl::StatusOr<Completion>> script_;
  mutable std::size_t next_ = 0;
  mutable std::vector<CompletionRequest> requests_;
};

class FunctionCompletionClient : public CompletionClient {
 public:
  using Fn = std::function<absl::StatusOr<Completion>(const CompletionRequest&)>;
  explicit FunctionCompletionClient(Fn fn) : fn_(std::move(fn)) {}
  absl::StatusOr<Completion> Complete(const CompletionRequest& request) const override {
    return fn_(request);
  }
  std::string Name() const override { return "function"; }

 private:
  Fn fn_;
};

// Offline stand-in that reads the rendered prompt back. Labelling prompts are
// answered with the context sentence sharing the most preprocessed tokens with
// the candidate (COT prompts get a reasoning line and the answer marker).
// Judge prompts get P(OOC) = 1 - token precision against the reference,
// clamped to [0.01, 0.99], as "0"/"1" logprobs.
class OverlapCompletionClient : public CompletionClient {
 public:
  absl::StatusOr<Completion> Complete(const CompletionRequest& request) const override;
  std::string Name() const override { return "stub-completion"; }
};

}  // namespace ragulator::llm

#endif  // RAGULATOR_LLM_CLIENT_H_
