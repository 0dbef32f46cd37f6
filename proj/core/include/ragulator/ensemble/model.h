#ifndef RAGULATOR_ENSEMBLE_MODEL_H_
#define RAGULATOR_ENSEMBLE_MODEL_H_

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "ragulator/ensemble/tree.h"
#include "ragulator/features/feature_vector.h"

namespace ragulator::ensemble {

enum class ModelKind { kRandomForest, kGradientBoosted };
std::string_view ToString(ModelKind kind);
absl::StatusOr<ModelKind> ParseModelKind(std::string_view s);

// max_depth -1 means unlimited. num_leaves and subsample apply to
// gradient-boosted models only.
struct Hyperparams {
  int max_depth = -1;
  int n_estimators = 100;
  int num_leaves = 31;
  double subsample = 1.0;

  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

inline constexpr int kModelFormatVersion = 1;

struct TreeEnsembleModel {
  ModelKind kind = ModelKind::kRandomForest;
  Hyperparams params;
  std::vector<DecisionTree> trees;
  double learning_rate = 0.0;  // gradient-boosted only
  double base_score = 0.0;     // gradient-boosted only, in log-odds
  std::vector<std::string> feature_names;

  // P(OOC). InvalidArgument for non-finite input.
  absl::StatusOr<double> Predict(const features::FeatureVector& fv) const;
  // No validation; x must have one entry per feature.
  double PredictUnchecked(std::span<const double> x) const;

  friend bool operator==(const TreeEnsembleModel&, const TreeEnsembleModel&) = default;
};

// {format_version, kind, params, learning_rate, base_score, feature_names,
//  trees: [{nodes: [...]}]}. Serialisation is byte-stable.
std::string ModelToJson(const TreeEnsembleModel& model);
absl::StatusOr<TreeEnsembleModel> ModelFromJson(std::string_view json);
absl::Status SaveModel(const std::string& path, const TreeEnsembleModel& model);
absl::StatusOr<TreeEnsembleModel> LoadModel(const std::string& path);

}  // namespace ragulator::ensemble

#endif  // RAGULATOR_ENSEMBLE_MODEL_H_
