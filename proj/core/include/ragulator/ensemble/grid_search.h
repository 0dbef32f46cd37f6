#ifndef RAGULATOR_ENSEMBLE_GRID_SEARCH_H_
#define RAGULATOR_ENSEMBLE_GRID_SEARCH_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "ragulator/ensemble/model.h"
#include "ragulator/ensemble/train.h"

namespace ragulator::ensemble {

struct HyperparamGrid {
  std::vector<int> max_depth;
  std::vector<int> n_estimators;
  std::vector<int> num_leaves;    // gradient-boosted only
  std::vector<double> subsample;  // gradient-boosted only

  // Cells in grid order: max_depth outermost, then n_estimators,
  // num_leaves, subsample. Random-forest cells ignore the last two lists.
  std::vector<Hyperparams> Cells(ModelKind kind) const;
};

HyperparamGrid DefaultRandomForestGrid();     // depth 1..5 x trees 100..1000
HyperparamGrid DefaultGradientBoostedGrid();  // depth {2,4,-1} x trees {60,100,200} x ...

struct CellScore {
  Hyperparams params;
  std::vector<double> fold_auroc;
  double mean_auroc = 0.0;
};

struct GridSearchResult {
  Hyperparams best_params;
  TreeEnsembleModel model;
  std::vector<CellScore> cv_scores;  // grid order
};

// Stratified k-fold CV over every cell, scored by mean fold AUROC. Ties go
// to fewer trees, then shallower depth (-1 deepest), then grid order. The
// winner is refit on all rows. Every class needs at least `folds` rows.
absl::StatusOr<GridSearchResult> GridSearch(std::span<const TrainingRow> rows,
                                            const HyperparamGrid& grid, ModelKind kind, int folds,
                                            uint64_t seed, unsigned max_threads = 0);

// Fold index per row; deterministic in seed.
absl::StatusOr<std::vector<int>> StratifiedFolds(std::span<const TrainingRow> rows, int folds,
                                                 uint64_t seed);

}  // namespace ragulator::ensemble

#endif  // RAGULATOR_ENSEMBLE_GRID_SEARCH_H_
