#include "ragulator/eval/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"

namespace ragulator::eval {
namespace {

absl::Status Validate(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("scores/labels length mismatch: ", scores.size(), " vs ", labels.size()));
  }
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) {
      return absl::InvalidArgumentError(absl::StrCat("label at ", i, " is not 0/1"));
    }
    if (std::isnan(scores[i]))
      return absl::InvalidArgumentError(absl::StrCat("score at ", i, " is NaN"));
  }
  return absl::OkStatus();
}

void Split(std::span<const ScoredExample> scored, std::vector<double>& scores,
           std::vector<int>& labels) {
  scores.reserve(scored.size());
  labels.reserve(scored.size());
  for (const ScoredExample& s : scored) {
    scores.push_back(s.score);
    labels.push_back(s.label);
  }
}

// Indices sorted by descending score (stable).
std::vector<std::size_t> DescendingOrder(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

}  // namespace

absl::StatusOr<double> Auroc(std::span<const double> scores, std::span<const int> labels) {
  if (auto s = Validate(scores, labels); !s.ok()) return s;
  const auto n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    return absl::FailedPreconditionError("AUROC undefined: both classes must be present");
  }
  // Ascending order; average ranks over tie groups.
  std::vector<std::size_t> order = DescendingOrder(scores);
  std::reverse(order.begin(), order.end());
  double pos_rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::size_t pos_in_group = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      pos_in_group += labels[order[j]] == 1 ? 1 : 0;
      ++j;
    }
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    pos_rank_sum += avg_rank * static_cast<double>(pos_in_group);
    i = j;
  }
  const double np = static_cast<double>(n_pos);
  const double u = pos_rank_sum - np * (np + 1.0) / 2.0;
  return 100.0 * u / (np * static_cast<double>(n_neg));
}

absl::StatusOr<double> Auroc(std::span<const ScoredExample> scored) {
  std::vector<double> scores;
  std::vector<int> labels;
  Split(scored, scores, labels);
  return Auroc(scores, labels);
}

absl::StatusOr<double> Auprc(std::span<const double> scores, std::span<const int> labels) {
  if (auto s = Validate(scores, labels); !s.ok()) return s;
  const auto n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  if (n_pos == 0) return absl::FailedPreconditionError("AUPRC undefined: no positives");
  const std::vector<std::size_t> order = DescendingOrder(scores);
  double ap = 0.0;
  std::size_t tp = 0;
  std::size_t seen = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::size_t pos_in_group = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      pos_in_group += labels[order[j]] == 1 ? 1 : 0;
      ++j;
    }
    tp += pos_in_group;
    seen = j;
    if (pos_in_group > 0) {
      const double precision = static_cast<double>(tp) / static_cast<double>(seen);
      ap += precision * static_cast<double>(pos_in_group) / static_cast<double>(n_pos);
    }
    i = j;
  }
  return 100.0 * ap;
}

absl::StatusOr<double> Auprc(std::span<const ScoredExample> scored) {
  std::vector<double> scores;
  std::vector<int> labels;
  Split(scored, scores, labels);
  return Auprc(scores, labels);
}

absl::StatusOr<double> F1At(std::span<const double> scores, std::span<const int> labels,
                            double threshold) {
  if (auto s = Validate(scores, labels); !s.ok()) return s;
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (predicted && labels[i] == 1) ++tp;
    if (predicted && labels[i] == 0) ++fp;
    if (!predicted && labels[i] == 1) ++fn;
  }
  if (tp == 0) return 0.0;
  return 100.0 * 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

absl::StatusOr<double> F1At(std::span<const ScoredExample> scored, double threshold) {
  std::vector<double> scores;
  std::vector<int> labels;
  Split(scored, scores, labels);
  return F1At(scores, labels, threshold);
}

absl::StatusOr<AgreementReport> Agreement(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("rater length mismatch: ", a.size(), " vs ", b.size()));
  }
  if (a.empty()) return absl::InvalidArgumentError("no ratings");
  AgreementReport r;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] != 0 && a[i] != 1) || (b[i] != 0 && b[i] != 1)) {
      return absl::InvalidArgumentError(absl::StrCat("rating at ", i, " is not 0/1"));
    }
    ++r.confusion[a[i]][b[i]];
  }
  const double n = static_cast<double>(a.size());
  const double p_o = static_cast<double>(r.confusion[0][0] + r.confusion[1][1]) / n;
  const double a1 = static_cast<double>(r.confusion[1][0] + r.confusion[1][1]) / n;
  const double b1 = static_cast<double>(r.confusion[0][1] + r.confusion[1][1]) / n;
  const double p_e = a1 * b1 + (1.0 - a1) * (1.0 - b1);
  r.accuracy = 100.0 * p_o;
  if (p_e == 1.0) {
    if (p_o != 1.0) return absl::FailedPreconditionError("kappa undefined");
    r.kappa = 100.0;
  } else {
    r.kappa = 100.0 * (p_o - p_e) / (1.0 - p_e);
  }
  return r;
}

absl::StatusOr<double> CohenKappa(std::span<const int> a, std::span<const int> b) {
  auto r = Agreement(a, b);
  if (!r.ok()) return r.status();
  return r->kappa;
}

absl::StatusOr<double> Throughput(std::size_t n, double wall_seconds) {
  if (n == 0) return absl::FailedPreconditionError("throughput undefined for 0 examples");
  if (!(wall_seconds > 0.0)) {
    return absl::FailedPreconditionError("throughput needs a positive wall time");
  }
  return static_cast<double>(n) / wall_seconds;
}

TimedRun RunTimed(std::size_t n, const std::function<double(std::size_t)>& score) {
  using Clock = std::chrono::steady_clock;
  TimedRun run;
  run.scores.reserve(n);
  run.latencies.reserve(n);
  const auto start = Clock::now();
  for (std::size_t i = 0; i < n; ++i) {
    const auto t0 = Clock::now();
    run.scores.push_back(score(i));
    run.latencies.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
  }
  run.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return run;
}

}  // namespace ragulator::eval
