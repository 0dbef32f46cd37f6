#ifndef RAGULATOR_EVAL_REPORT_H_
#define RAGULATOR_EVAL_REPORT_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "ragulator/eval/metrics.h"

namespace ragulator::eval {

struct EvalReport {
  std::string detector;
  double auroc = 0.0;
  double auprc = 0.0;
  double f1 = 0.0;
  double threshold = 0.5;
  std::size_t n_positive = 0;
  std::size_t n_negative = 0;
  std::optional<double> examples_per_second;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// Computes AUROC, AUPRC and F1; throughput when wall_seconds is given.
absl::StatusOr<EvalReport> Evaluate(std::string detector, std::span<const ScoredExample> scored,
                                    double threshold = 0.5,
                                    std::optional<double> wall_seconds = std::nullopt);

enum class ReportFormat { kJson, kMarkdownTable };
absl::StatusOr<ReportFormat> ParseReportFormat(std::string_view s);

// Columns in fixed order: AUROC, AUPRC, F1, Speed.
std::string RenderReports(std::span<const EvalReport> reports, ReportFormat format);
absl::StatusOr<std::vector<EvalReport>> ParseReportsJson(std::string_view json);

// Scores JSONL: {"pair_id", "score", "label", optional "latency"}.
absl::StatusOr<std::vector<ScoredExample>> ReadScoresJsonl(const std::string& path);
absl::Status WriteScoresJsonl(const std::string& path, std::span<const ScoredExample> scored);

}  // namespace ragulator::eval

#endif  // RAGULATOR_EVAL_REPORT_H_
