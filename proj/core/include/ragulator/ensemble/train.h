#ifndef RAGULATOR_ENSEMBLE_TRAIN_H_
#define RAGULATOR_ENSEMBLE_TRAIN_H_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "ragulator/ensemble/model.h"
#include "ragulator/features/feature_vector.h"

namespace ragulator::ensemble {

struct TrainingRow {
  std::array<double, features::kNumFeatures> x{};
  int label = 0;  // 1 = out-of-context
};

std::vector<TrainingRow> ToTrainingRows(std::span<const features::FeatureRow> rows);

// Random forest: bootstrap sample of size n per tree, floor(sqrt(5)) = 2
// candidate features per split, Gini impurity, exact thresholds at
// midpoints between sorted distinct values. Leaves hold the positive
// fraction; prediction is the mean over trees. Tree t draws from
// DeriveSeed(seed, t), so the result does not depend on max_threads.
absl::StatusOr<TreeEnsembleModel> TrainRandomForest(std::span<const TrainingRow> rows,
                                                    const Hyperparams& params, uint64_t seed,
                                                    unsigned max_threads = 0);

// Gradient boosting on logistic loss with second-order (Newton) leaf values
// and leaf-wise growth capped by num_leaves and max_depth.
struct GbtOptions {
  double learning_rate = 0.1;
  int min_data_in_leaf = 20;
  double min_sum_hessian_in_leaf = 1e-3;
  double lambda_l2 = 0.0;
};

absl::StatusOr<TreeEnsembleModel> TrainGradientBoosted(std::span<const TrainingRow> rows,
                                                       const Hyperparams& params, uint64_t seed,
                                                       const GbtOptions& options = {});

absl::StatusOr<TreeEnsembleModel> Train(ModelKind kind, std::span<const TrainingRow> rows,
                                        const Hyperparams& params, uint64_t seed,
                                        unsigned max_threads = 0);

// Mean logistic loss of the model's probabilities on rows.
double LogisticLoss(const TreeEnsembleModel& model, std::span<const TrainingRow> rows);

}  // namespace ragulator::ensemble

#endif  // RAGULATOR_ENSEMBLE_TRAIN_H_
