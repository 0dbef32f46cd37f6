#ifndef RAGULATOR_EVAL_METRICS_H_
#define RAGULATOR_EVAL_METRICS_H_

#include <array>
#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"

namespace ragulator::eval {

// Label 1 is the positive (out-of-context) class.
struct ScoredExample {
  std::string pair_id;
  double score = 0.0;
  int label = 0;
  std::optional<double> latency_seconds;

  friend bool operator==(const ScoredExample&, const ScoredExample&) = default;
};

// All metrics are percentages in [0, 100]. Undefined metrics (a required
// class is missing) are FailedPrecondition; malformed input (length
// mismatch, non-binary labels, NaN scores) is InvalidArgument.

// Mann-Whitney AUROC; tied positive/negative pairs count one half.
absl::StatusOr<double> Auroc(std::span<const double> scores, std::span<const int> labels);
absl::StatusOr<double> Auroc(std::span<const ScoredExample> scored);

// Average precision: sum over distinct descending thresholds of
// (R_k - R_{k-1}) * P_k, with tied scores forming one threshold.
absl::StatusOr<double> Auprc(std::span<const double> scores, std::span<const int> labels);
absl::StatusOr<double> Auprc(std::span<const ScoredExample> scored);

// F1 of the positive class predicting 1 iff score >= threshold; 0 when
// there are no predicted or no actual positives.
absl::StatusOr<double> F1At(std::span<const double> scores, std::span<const int> labels,
                            double threshold);
absl::StatusOr<double> F1At(std::span<const ScoredExample> scored, double threshold);

struct AgreementReport {
  double accuracy = 0.0;
  double kappa = 0.0;
  // confusion[a][b] = number of items rater A labelled a and rater B labelled b.
  std::array<std::array<std::size_t, 2>, 2> confusion{};
};

absl::StatusOr<double> CohenKappa(std::span<const int> a, std::span<const int> b);
absl::StatusOr<AgreementReport> Agreement(std::span<const int> a, std::span<const int> b);

// n / wall_seconds; FailedPrecondition for n == 0 or a non-positive time.
absl::StatusOr<double> Throughput(std::size_t n, double wall_seconds);

// Calls score(i) for i in [0, n) serially, timing the whole loop.
struct TimedRun {
  std::vector<double> scores;
  std::vector<double> latencies;
  double wall_seconds = 0.0;
};
TimedRun RunTimed(std::size_t n, const std::function<double(std::size_t)>& score);

}  // namespace ragulator::eval

#endif  // RAGULATOR_EVAL_METRICS_H_
