#ifndef RAGULATOR_SERVICE_DETECTOR_H_
#define RAGULATOR_SERVICE_DETECTOR_H_

#include <chrono>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ragulator/ensemble/model.h"
#include "ragulator/features/feature_vector.h"
#include "ragulator/features/providers.h"
#include "ragulator/service/config.h"
#include "ragulator/window/tokenizer.h"

namespace ragulator::service {

struct SentenceDetection {
  double probability = 0.0;  // P(OOC), min over windows
  int label = 0;
  std::size_t n_windows = 0;
  // Features of the minimum-probability window (meta-classifier only).
  std::optional<features::FeatureVector> features;

  friend bool operator==(const SentenceDetection&, const SentenceDetection&) = default;
};

struct ProviderHealth {
  std::string name;
  absl::Status status;
};

// Implementations are shared across request threads and must be safe for
// concurrent calls.
class Detector {
 public:
  virtual ~Detector() = default;
  // Windows every non-blank document separately and aggregates over all
  // windows. InvalidArgument for bad input; provider failures carry the
  // provider name (see FailingProvider).
  virtual absl::StatusOr<SentenceDetection> Detect(
      std::string_view sentence, std::span<const std::string> documents) const = 0;
  virtual std::vector<ProviderHealth> CheckProviders() const = 0;
  virtual std::string_view Name() const = 0;
};

struct DetectorOptions {
  double threshold = 0.5;
  int window_limit = 512;
};

// Featurizes each (sentence, window slice) and applies the tree ensemble.
class MetaClassifierDetector : public Detector {
 public:
  MetaClassifierDetector(ensemble::TreeEnsembleModel model,
                         std::unique_ptr<features::EmbeddingProvider> embed,
                         std::unique_ptr<features::RerankerProvider> rerank,
                         DetectorOptions options);
  absl::StatusOr<SentenceDetection> Detect(std::string_view sentence,
                                           std::span<const std::string> documents) const override;
  std::vector<ProviderHealth> CheckProviders() const override;
  std::string_view Name() const override { return "meta_classifier"; }

 private:
  ensemble::TreeEnsembleModel model_;
  std::unique_ptr<features::EmbeddingProvider> embed_;
  std::unique_ptr<features::RerankerProvider> rerank_;
  window::WhitespaceTokenizer tokenizer_;
  DetectorOptions options_;
};

// Encoder-style classifier over (sentence, context slice) pairs.
class WindowClassifier {
 public:
  virtual ~WindowClassifier() = default;
  // One P(OOC) in [0, 1] per slice.
  virtual absl::StatusOr<std::vector<double>> Classify(
      std::string_view sentence, const std::vector<std::string>& slices) const = 0;
  virtual std::string_view Name() const = 0;
};

// Offline stand-in: P(OOC) = clamp(1 - precision score, 0.01, 0.99).
class OverlapWindowClassifier : public WindowClassifier {
 public:
  absl::StatusOr<std::vector<double>> Classify(
      std::string_view sentence, const std::vector<std::string>& slices) const override;
  std::string_view Name() const override { return "stub-window-scorer"; }
};

// POST <base>/classify {"sentence": "...", "contexts": [...]}
//   -> {"probabilities": [...]}
// Transport failures and non-200 replies are Unavailable; malformed bodies
// are Internal.
class HttpWindowClassifier : public WindowClassifier {
 public:
  HttpWindowClassifier(std::string base_url, std::chrono::milliseconds timeout);
  absl::StatusOr<std::vector<double>> Classify(
      std::string_view sentence, const std::vector<std::string>& slices) const override;
  std::string_view Name() const override { return "window_scorer"; }

 private:
  std::string base_url_;
  std::chrono::milliseconds timeout_;
};

// "stub" selects the offline classifier; anything else is a base URL.
std::unique_ptr<WindowClassifier> MakeWindowClassifier(const std::string& endpoint);

class WindowScorerDetector : public Detector {
 public:
  WindowScorerDetector(std::unique_ptr<WindowClassifier> classifier, DetectorOptions options);
  absl::StatusOr<SentenceDetection> Detect(std::string_view sentence,
                                           std::span<const std::string> documents) const override;
  std::vector<ProviderHealth> CheckProviders() const override;
  std::string_view Name() const override { return "window_scorer"; }

 private:
  std::unique_ptr<WindowClassifier> classifier_;
  window::WhitespaceTokenizer tokenizer_;
  DetectorOptions options_;
};

// Builds the configured detector; the meta-classifier loads model_path.
absl::StatusOr<std::unique_ptr<Detector>> MakeDetector(const PipelineConfig& config);

}  // namespace ragulator::service

#endif  // RAGULATOR_SERVICE_DETECTOR_H_
