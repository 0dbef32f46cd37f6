#ifndef RAGULATOR_LLM_OPENAI_CLIENT_H_
#define RAGULATOR_LLM_OPENAI_CLIENT_H_

#include <chrono>
#include <memory>
#include <string>

#include "ragulator/llm/client.h"

namespace ragulator::llm {

struct OpenAiClientOptions {
  // scheme://host[:port]; requests go to <base_url>/v1/completions.
  std::string base_url;
  // Sent as "Authorization: Bearer <token>" when non-empty.
  std::string api_token;
  std::string model = "meta-llama/Meta-Llama-3.1-70B-Instruct";
  double temperature = 0.0;
  std::chrono::seconds timeout{120};
};

// OpenAI-compatible /v1/completions client. Connection failures, HTTP 5xx
// and 429 map to transient codes; other non-200 replies are
// FailedPrecondition; unexpected bodies are Internal.
class OpenAiCompletionClient : public CompletionClient {
 public:
  explicit OpenAiCompletionClient(OpenAiClientOptions options) : options_(std::move(options)) {}
  absl::StatusOr<Completion> Complete(const CompletionRequest& request) const override;
  std::string Name() const override { return "completion"; }

 private:
  OpenAiClientOptions options_;
};

// "stub" selects OverlapCompletionClient; anything else is a base URL.
std::unique_ptr<CompletionClient> MakeCompletionClient(const OpenAiClientOptions& options);

}  // namespace ragulator::llm

#endif  // RAGULATOR_LLM_OPENAI_CLIENT_H_
