#include "ragulator/llm/openai_client.h"

#include <algorithm>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "absl/strings/str_cat.h"

namespace ragulator::llm {

using json = nlohmann::json;

absl::StatusOr<Completion> OpenAiCompletionClient::Complete(
    const CompletionRequest& request) const {
  json body = {{"model", options_.model},
               {"prompt", request.prompt},
               {"max_tokens", request.max_tokens},
               {"temperature", options_.temperature}};
  if (request.logprobs) body["logprobs"] = 10;

  httplib::Client client(options_.base_url);
  client.set_connection_timeout(options_.timeout);
  client.set_read_timeout(options_.timeout);
  client.set_write_timeout(options_.timeout);
  httplib::Headers headers;
  if (!options_.api_token.empty()) {
    headers.emplace("Authorization", "Bearer " + options_.api_token);
  }
  const auto res = client.Post("/v1/completions", headers, body.dump(), "application/json");
  if (!res) {
    return absl::UnavailableError(absl::StrCat("completion endpoint unreachable at ",
                                               options_.base_url, ": ",
                                               httplib::to_string(res.error())));
  }
  if (res->status == 429) {
    return absl::ResourceExhaustedError("completion endpoint returned HTTP 429");
  }
  if (res->status >= 500) {
    return absl::UnavailableError(absl::StrCat("completion endpoint returned HTTP ", res->status));
  }
  if (res->status != 200) {
    return absl::FailedPreconditionError(
        absl::StrCat("completion endpoint returned HTTP ", res->status, ": ", res->body));
  }
  const json reply = json::parse(res->body, nullptr, false);
  if (reply.is_discarded() || !reply.is_object() || !reply.contains("choices") ||
      !reply["choices"].is_array() || reply["choices"].empty() ||
      !reply["choices"][0].is_object() || !reply["choices"][0].contains("text") ||
      !reply["choices"][0]["text"].is_string()) {
    return absl::InternalError("completion endpoint reply lacks choices[0].text");
  }
  const json& choice = reply["choices"][0];
  Completion out;
  out.text = choice["text"].get<std::string>();
  if (!request.logprobs) return out;

  const auto lp = choice.find("logprobs");
  if (lp == choice.end() || !lp->is_object() || !lp->contains("top_logprobs") ||
      !(*lp)["top_logprobs"].is_array() || (*lp)["top_logprobs"].empty() ||
      !(*lp)["top_logprobs"][0].is_object()) {
    return absl::InternalError("completion endpoint reply lacks logprobs.top_logprobs[0]");
  }
  for (const auto& [token, value] : (*lp)["top_logprobs"][0].items()) {
    if (!value.is_number()) {
      return absl::InternalError("completion endpoint returned a non-numeric logprob");
    }
    out.top_logprobs.push_back({token, value.get<double>()});
  }
  std::sort(out.top_logprobs.begin(), out.top_logprobs.end(),
            [](const TokenLogprob& a, const TokenLogprob& b) {
              return a.logprob != b.logprob ? a.logprob > b.logprob : a.token < b.token;
            });
  return out;
}

std::unique_ptr<CompletionClient> MakeCompletionClient(const OpenAiClientOptions& options) {
  if (options.base_url == "stub") return std::make_unique<OverlapCompletionClient>();
  return std::make_unique<OpenAiCompletionClient>(options);
}

}  // namespace ragulator::llm
