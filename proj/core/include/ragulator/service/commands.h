#ifndef RAGULATOR_SERVICE_COMMANDS_H_
#define RAGULATOR_SERVICE_COMMANDS_H_

#include <optional>
#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ragulator/datagen/records.h"
#include "ragulator/ensemble/grid_search.h"
#include "ragulator/eval/report.h"
#include "ragulator/service/config.h"

namespace ragulator::service {

// Pipeline stages. Each reads and writes only the paths named in the config
// and returns a one-line JSON summary (evaluate returns the rendered report).
// Outputs are byte-identical for identical inputs, config and seed.

// corpus_path -> pairs_path plus the sidecar ManifestPath(pairs_path).
// Summary records are shuffled at ooc_fraction; STS splits are rebalanced
// to ooc_fraction. test_sources, when set, filters the test split.
absl::StatusOr<std::string> RunDatagen(const PipelineConfig& config, datagen::RecordKind kind);
std::string ManifestPath(const std::string& pairs_path);

// pairs_path -> labels_path, in-context pairs only.
absl::StatusOr<std::string> RunLabel(const PipelineConfig& config);

// pairs_path -> features_path, optionally one split only.
absl::StatusOr<std::string> RunFeaturize(const PipelineConfig& config,
                                         std::optional<datagen::Split> split = std::nullopt);

// features_path -> model_path by grid search; the summary holds the CV
// scores of every cell. Defaults to the full grid of config.model_kind.
absl::StatusOr<std::string> RunTrain(const PipelineConfig& config,
                                     std::optional<ensemble::HyperparamGrid> grid = std::nullopt);

// features_path + model_path -> scores_path.
absl::StatusOr<std::string> RunScore(const PipelineConfig& config);

// scores_path -> report_path (when set). Throughput is reported when every
// score carries a latency.
absl::StatusOr<std::string> RunEvaluate(const PipelineConfig& config, eval::ReportFormat format,
                                        const std::string& detector_name);

// pairs_path (+ labels_path when set) -> windows_path as fine-tuning rows.
// Pairs whose sentence exhausts the window budget, and multi-window
// in-context pairs without an annotation, are skipped and counted.
absl::StatusOr<std::string> RunWindowsExport(const PipelineConfig& config);

enum class ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kConfig = 2,
  kMissingInput = 3,
  kInvalidInput = 4,
  kProvider = 5,
  kOutput = 6,
};

ExitCode ExitCodeFor(const absl::Status& status);

// {"error": {"code", "exit_code", "message", "provider"?}} on one line.
std::string ErrorJson(const absl::Status& status);

}  // namespace ragulator::service

#endif  // RAGULATOR_SERVICE_COMMANDS_H_
