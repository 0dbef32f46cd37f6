#ifndef RAGULATOR_FEATURES_PROVIDERS_H_
#define RAGULATOR_FEATURES_PROVIDERS_H_

#include <chrono>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace ragulator::features {

// Implementations must be safe for concurrent calls.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  // One unit-norm vector per text, all of the same dimension.
  virtual absl::StatusOr<std::vector<std::vector<float>>> Embed(
      const std::vector<std::string>& texts) const = 0;
  virtual std::string_view Name() const = 0;
};

class RerankerProvider {
 public:
  virtual ~RerankerProvider() = default;
  // One relevance score per reference; larger is more relevant.
  virtual absl::StatusOr<std::vector<double>> Score(
      std::string_view candidate, const std::vector<std::string>& references) const = 0;
  virtual std::string_view Name() const = 0;
};

// Offline stand-ins. The embedder hashes lowercased word tokens into a
// fixed number of buckets and L2-normalises the counts (texts without words
// map to the first basis vector). The reranker scores each reference by the
// fraction of the candidate's preprocessed token set it contains.
class HashedEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit HashedEmbeddingProvider(std::size_t dim = 256) : dim_(dim) {}
  absl::StatusOr<std::vector<std::vector<float>>> Embed(
      const std::vector<std::string>& texts) const override;
  std::string_view Name() const override { return "stub-embed"; }

 private:
  std::size_t dim_;
};

class OverlapRerankerProvider : public RerankerProvider {
 public:
  absl::StatusOr<std::vector<double>> Score(
      std::string_view candidate, const std::vector<std::string>& references) const override;
  std::string_view Name() const override { return "stub-rerank"; }
};

// JSON-over-HTTP clients.
//   POST <base>/embed   {"texts": [...]}                      -> {"vectors": [[...], ...]}
//   POST <base>/rerank  {"query": "...", "candidates": [...]} -> {"scores": [...]}
// Returned embeddings are re-normalised client side. Transport failures and
// non-200 replies are Unavailable; malformed bodies are Internal.
struct HttpProviderOptions {
  std::string base_url;  // e.g. "http://127.0.0.1:8081"
  std::chrono::milliseconds timeout{30000};
};

class HttpEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit HttpEmbeddingProvider(HttpProviderOptions options) : options_(std::move(options)) {}
  absl::StatusOr<std::vector<std::vector<float>>> Embed(
      const std::vector<std::string>& texts) const override;
  std::string_view Name() const override { return "embed"; }

 private:
  HttpProviderOptions options_;
};

class HttpRerankerProvider : public RerankerProvider {
 public:
  explicit HttpRerankerProvider(HttpProviderOptions options) : options_(std::move(options)) {}
  absl::StatusOr<std::vector<double>> Score(
      std::string_view candidate, const std::vector<std::string>& references) const override;
  std::string_view Name() const override { return "rerank"; }

 private:
  HttpProviderOptions options_;
};

// "stub" selects the offline provider; anything else is an HTTP base URL.
std::unique_ptr<EmbeddingProvider> MakeEmbeddingProvider(const std::string& endpoint);
std::unique_ptr<RerankerProvider> MakeRerankerProvider(const std::string& endpoint);

}  // namespace ragulator::features

#endif  // RAGULATOR_FEATURES_PROVIDERS_H_
