#include "ragulator/ensemble/grid_search.h"

#include <optional>

#include "absl/strings/str_cat.h"
#include "ragulator/common/parallel.h"
#include "ragulator/common/random.h"
#include "ragulator/eval/metrics.h"

namespace ragulator::ensemble {
namespace {

constexpr uint64_t kFoldStream = 0xF01D;

int DepthRank(int max_depth) { return max_depth < 0 ? std::numeric_limits<int>::max() : max_depth; }

// True if a should be preferred over b at equal mean AUROC.
bool Simpler(const Hyperparams& a, const Hyperparams& b) {
  if (a.n_estimators != b.n_estimators) return a.n_estimators < b.n_estimators;
  return DepthRank(a.max_depth) < DepthRank(b.max_depth);
}

}  // namespace

std::vector<Hyperparams> HyperparamGrid::Cells(ModelKind kind) const {
  std::vector<Hyperparams> cells;
  const bool gbt = kind == ModelKind::kGradientBoosted;
  const std::vector<int> leaves = gbt ? num_leaves : std::vector<int>{Hyperparams{}.num_leaves};
  const std::vector<double> subs = gbt ? subsample : std::vector<double>{1.0};
  for (int d : max_depth) {
    for (int n : n_estimators) {
      for (int l : leaves) {
        for (double s : subs) cells.push_back({d, n, l, s});
      }
    }
  }
  return cells;
}

HyperparamGrid DefaultRandomForestGrid() {
  return {{1, 2, 3, 4, 5}, {100, 325, 550, 775, 1000}, {}, {}};
}

HyperparamGrid DefaultGradientBoostedGrid() {
  return {{2, 4, -1}, {60, 100, 200}, {4, 10, 31}, {0.8, 1.0}};
}

absl::StatusOr<std::vector<int>> StratifiedFolds(std::span<const TrainingRow> rows, int folds,
                                                 uint64_t seed) {
  if (folds < 2) return absl::InvalidArgumentError("folds must be >= 2");
  std::vector<int> fold(rows.size(), 0);
  for (int cls : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].label == cls) members.push_back(i);
    }
    if (members.size() < static_cast<std::size_t>(folds)) {
      return absl::FailedPreconditionError(absl::StrCat("class ", cls, " has ", members.size(),
                                                        " rows; stratified ", folds,
                                                        "-fold CV needs at least ", folds));
    }
    Rng rng(DeriveSeed(seed, kFoldStream + static_cast<uint64_t>(cls)));
    rng.Shuffle(members);
    for (std::size_t k = 0; k < members.size(); ++k) {
      fold[members[k]] = static_cast<int>(k % static_cast<std::size_t>(folds));
    }
  }
  return fold;
}

absl::StatusOr<GridSearchResult> GridSearch(std::span<const TrainingRow> rows,
                                            const HyperparamGrid& grid, ModelKind kind, int folds,
                                            uint64_t seed, unsigned max_threads) {
  const std::vector<Hyperparams> cells = grid.Cells(kind);
  if (cells.empty()) return absl::InvalidArgumentError("hyperparameter grid is empty");
  auto fold_of = StratifiedFolds(rows, folds, seed);
  if (!fold_of.ok()) return fold_of.status();

  std::vector<std::vector<TrainingRow>> train(folds), valid(folds);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int k = 0; k < folds; ++k) ((*fold_of)[i] == k ? valid : train)[k].push_back(rows[i]);
  }

  const std::size_t tasks = cells.size() * static_cast<std::size_t>(folds);
  std::vector<std::optional<absl::StatusOr<double>>> results(tasks);
  ParallelFor(
      tasks,
      [&](std::size_t t) {
        const Hyperparams& params = cells[t / folds];
        const int k = static_cast<int>(t % folds);
        auto model = Train(kind, train[k], params, seed, /*max_threads=*/1);
        if (!model.ok()) {
          results[t] = model.status();
          return;
        }
        std::vector<double> scores;
        std::vector<int> labels;
        for (const TrainingRow& r : valid[k]) {
          scores.push_back(model->PredictUnchecked(r.x));
          labels.push_back(r.label);
        }
        results[t] = eval::Auroc(scores, labels);
      },
      max_threads);

  GridSearchResult out;
  std::size_t best = 0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    CellScore score{cells[c], {}, 0.0};
    for (int k = 0; k < folds; ++k) {
      const auto& r = *results[c * folds + k];
      if (!r.ok()) return r.status();
      score.fold_auroc.push_back(*r);
      score.mean_auroc += *r;
    }
    score.mean_auroc /= folds;
    out.cv_scores.push_back(std::move(score));
    if (c == 0) continue;
    const CellScore& incumbent = out.cv_scores[best];
    const CellScore& candidate = out.cv_scores[c];
    if (candidate.mean_auroc > incumbent.mean_auroc ||
        (candidate.mean_auroc == incumbent.mean_auroc &&
         Simpler(candidate.params, incumbent.params))) {
      best = c;
    }
  }
  out.best_params = cells[best];
  auto model = Train(kind, rows, out.best_params, seed, max_threads);
  if (!model.ok()) return model.status();
  out.model = std::move(*model);
  return out;
}

}  // namespace ragulator::ensemble
