#ifndef RAGULATOR_SERVICE_CONFIG_H_
#define RAGULATOR_SERVICE_CONFIG_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ragulator/ensemble/model.h"
#include "ragulator/llm/prompts.h"

namespace ragulator::service {

enum class DetectorKind { kMetaClassifier, kWindowScorer };
std::string_view ToString(DetectorKind kind);
absl::StatusOr<DetectorKind> ParseDetectorKind(std::string_view s);

inline constexpr std::string_view kEnvPrefix = "RAGULATOR_";

// Every field has a JSON key of the same name and an environment override
// RAGULATOR_<KEY in upper case>. Endpoints are base URLs or "stub".
struct PipelineConfig {
  std::string corpus_path;
  std::string pairs_path;
  std::string labels_path;
  std::string features_path;
  std::string model_path;
  std::string scores_path;
  std::string report_path;
  std::string windows_path;

  uint64_t rng_seed = 0;
  double ooc_fraction = 0.5;              // [0, 1]
  std::vector<std::string> test_sources;  // empty keeps every test source

  int window_limit = 512;  // [3, 65536]
  double threshold = 0.5;  // (0, 1)

  std::string embed_url = "stub";
  std::string rerank_url = "stub";
  std::string window_scorer_url = "stub";
  std::string completion_url = "stub";
  std::string completion_token;
  std::string completion_model = "meta-llama/Meta-Llama-3.1-70B-Instruct";

  DetectorKind detector = DetectorKind::kMetaClassifier;
  ensemble::ModelKind model_kind = ensemble::ModelKind::kRandomForest;
  llm::TemplateName labelling_method = llm::TemplateName::kLabel0Shot;
  int cv_folds = 5;       // [2, 20]
  int max_in_flight = 8;  // [1, 256]
  int threads = 0;        // [0, 1024]; 0 = hardware concurrency

  std::string host = "127.0.0.1";
  int port = 8080;  // [0, 65535]; 0 picks a free port

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

// Range checks; failures are ConfigError.
absl::Status Validate(const PipelineConfig& config);

// Every key, in declaration order.
std::string ConfigToJson(const PipelineConfig& config);

// Missing keys keep their defaults; unknown keys, wrong types and
// out-of-range values are ConfigError.
absl::StatusOr<PipelineConfig> ParseConfigJson(std::string_view json);

using EnvLookup = std::function<std::optional<std::string>(const std::string& name)>;
EnvLookup ProcessEnv();

// Strings are taken verbatim, numbers parsed, test_sources split on commas.
absl::StatusOr<PipelineConfig> ApplyEnvOverrides(PipelineConfig config, const EnvLookup& env);

// Defaults, then the file at `path` (if non-empty), then the environment.
absl::StatusOr<PipelineConfig> LoadConfig(const std::string& path, const EnvLookup& env);

}  // namespace ragulator::service

#endif  // RAGULATOR_SERVICE_CONFIG_H_
