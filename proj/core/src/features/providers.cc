#include "ragulator/features/providers.h"

#include <cmath>
#include <unordered_set>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "absl/strings/str_cat.h"
#include "ragulator/common/random.h"
#include "ragulator/common/strings.h"
#include "ragulator/text/preprocess.h"
#include "ragulator/text/tokenize.h"

namespace ragulator::features {
namespace {

using json = nlohmann::json;

absl::StatusOr<json> PostJson(const HttpProviderOptions& options, const std::string& path,
                              const json& body, std::string_view provider) {
  httplib::Client client(options.base_url);
  client.set_connection_timeout(options.timeout);
  client.set_read_timeout(options.timeout);
  client.set_write_timeout(options.timeout);
  const auto res = client.Post(path, body.dump(), "application/json");
  if (!res) {
    return absl::UnavailableError(absl::StrCat(ToAbsl(provider), " provider unreachable at ",
                                               options.base_url, ": ",
                                               httplib::to_string(res.error())));
  }
  if (res->status != 200) {
    return absl::UnavailableError(
        absl::StrCat(ToAbsl(provider), " provider returned HTTP ", res->status));
  }
  json reply = json::parse(res->body, nullptr, false);
  if (reply.is_discarded() || !reply.is_object()) {
    return absl::InternalError(absl::StrCat(ToAbsl(provider), " provider returned malformed JSON"));
  }
  return reply;
}

void Normalise(std::vector<float>& v) {
  double norm = 0.0;
  for (float x : v) norm += static_cast<double>(x) * x;
  norm = std::sqrt(norm);
  if (norm == 0.0) return;
  for (float& x : v) x = static_cast<float>(x / norm);
}

}  // namespace

absl::StatusOr<std::vector<std::vector<float>>> HashedEmbeddingProvider::Embed(
    const std::vector<std::string>& texts) const {
  std::vector<std::vector<float>> out;
  out.reserve(texts.size());
  for (const std::string& t : texts) {
    std::vector<float> v(dim_, 0.0f);
    bool any = false;
    for (const text::Token& tok : text::Tokenize(text::ToLower(t))) {
      if (!tok.is_word) continue;
      v[StableHash(tok.surface.data(), tok.surface.size()) % dim_] += 1.0f;
      any = true;
    }
    if (!any) v[0] = 1.0f;
    Normalise(v);
    out.push_back(std::move(v));
  }
  return out;
}

absl::StatusOr<std::vector<double>> OverlapRerankerProvider::Score(
    std::string_view candidate, const std::vector<std::string>& references) const {
  const auto cand_tokens = text::Preprocess(candidate).tokens;
  const std::unordered_set<std::string> cand(cand_tokens.begin(), cand_tokens.end());
  std::vector<double> scores;
  scores.reserve(references.size());
  for (const std::string& ref : references) {
    if (cand.empty()) {
      scores.push_back(0.0);
      continue;
    }
    const auto ref_tokens = text::Preprocess(ref).tokens;
    const std::unordered_set<std::string> r(ref_tokens.begin(), ref_tokens.end());
    std::size_t shared = 0;
    for (const std::string& t : cand) shared += r.contains(t) ? 1 : 0;
    scores.push_back(static_cast<double>(shared) / static_cast<double>(cand.size()));
  }
  return scores;
}

absl::StatusOr<std::vector<std::vector<float>>> HttpEmbeddingProvider::Embed(
    const std::vector<std::string>& texts) const {
  auto reply = PostJson(options_, "/embed", json{{"texts", texts}}, Name());
  if (!reply.ok()) return reply.status();
  const auto it = reply->find("vectors");
  if (it == reply->end() || !it->is_array() || it->size() != texts.size()) {
    return absl::InternalError("embed provider reply lacks one vector per text");
  }
  std::vector<std::vector<float>> out;
  out.reserve(texts.size());
  for (const json& row : *it) {
    if (!row.is_array() || row.empty()) {
      return absl::InternalError("embed provider returned a non-array vector");
    }
    std::vector<float> v;
    v.reserve(row.size());
    for (const json& x : row) {
      if (!x.is_number()) return absl::InternalError("embed provider returned a non-number");
      v.push_back(x.get<float>());
    }
    if (!out.empty() && v.size() != out.front().size()) {
      return absl::InternalError("embed provider returned vectors of differing dimension");
    }
    Normalise(v);
    out.push_back(std::move(v));
  }
  return out;
}

absl::StatusOr<std::vector<double>> HttpRerankerProvider::Score(
    std::string_view candidate, const std::vector<std::string>& references) const {
  auto reply =
      PostJson(options_, "/rerank",
               json{{"query", std::string(candidate)}, {"candidates", references}}, Name());
  if (!reply.ok()) return reply.status();
  const auto it = reply->find("scores");
  if (it == reply->end() || !it->is_array() || it->size() != references.size()) {
    return absl::InternalError("rerank provider reply lacks one score per candidate");
  }
  std::vector<double> scores;
  scores.reserve(references.size());
  for (const json& x : *it) {
    if (!x.is_number()) return absl::InternalError("rerank provider returned a non-number");
    scores.push_back(x.get<double>());
  }
  return scores;
}

std::unique_ptr<EmbeddingProvider> MakeEmbeddingProvider(const std::string& endpoint) {
  if (endpoint == "stub") return std::make_unique<HashedEmbeddingProvider>();
  return std::make_unique<HttpEmbeddingProvider>(HttpProviderOptions{endpoint});
}

std::unique_ptr<RerankerProvider> MakeRerankerProvider(const std::string& endpoint) {
  if (endpoint == "stub") return std::make_unique<OverlapRerankerProvider>();
  return std::make_unique<HttpRerankerProvider>(HttpProviderOptions{endpoint});
}

}  // namespace ragulator::features
