#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "ragulator/ensemble/grid_search.h"
#include "ragulator/ensemble/model.h"
#include "ragulator/ensemble/train.h"
#include "ragulator/eval/metrics.h"

namespace ragulator::ensemble {
namespace {

using ::testing::SizeIs;

// Feature 0 separates the classes (label 1 iff x0 < 0.5); the rest is noise.
std::vector<TrainingRow> Separable(std::size_t n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<TrainingRow> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    TrainingRow& r = rows[i];
    for (double& v : r.x) v = u(rng);
    r.label = r.x[0] < 0.5 ? 1 : 0;
  }
  rows[0].x[0] = 0.1;
  rows[0].label = 1;
  rows[1].x[0] = 0.9;
  rows[1].label = 0;
  return rows;
}

// Like Separable but with no rows in (0.4, 0.6), so held-out folds split cleanly.
std::vector<TrainingRow> Margin(std::size_t n, uint64_t seed) {
  auto rows = Separable(n, seed);
  for (TrainingRow& r : rows) {
    r.x[0] = r.label == 1 ? 0.8 * r.x[0] : 0.6 + 0.8 * (r.x[0] - 0.5);
  }
  return rows;
}

// Labels depend on features only weakly, so models disagree across seeds.
std::vector<TrainingRow> Noisy(std::size_t n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<TrainingRow> rows(n);
  for (TrainingRow& r : rows) {
    for (double& v : r.x) v = u(rng);
    r.label = u(rng) < 0.3 + 0.4 * r.x[1] ? 1 : 0;
  }
  return rows;
}

double TrainingAuroc(const TreeEnsembleModel& m, const std::vector<TrainingRow>& rows) {
  std::vector<double> scores;
  std::vector<int> labels;
  for (const TrainingRow& r : rows) {
    scores.push_back(m.PredictUnchecked(r.x));
    labels.push_back(r.label);
  }
  return *eval::Auroc(scores, labels);
}

TEST(RandomForest, SeparableTrainingAurocIsPerfect) {
  const auto rows = Separable(200, 1);
  const auto model = TrainRandomForest(rows, {3, 50}, 7);
  ASSERT_TRUE(model.ok()) << model.status();
  EXPECT_DOUBLE_EQ(TrainingAuroc(*model, rows), 100.0);
  features::FeatureVector ooc{0.05, 0.5, 0.5, 0.5, 0.5};
  EXPECT_GT(*model->Predict(ooc), 0.5);
}

TEST(RandomForest, ConstantFeaturesPredictPrior) {
  std::vector<TrainingRow> rows(100);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].x = {0.3, 1, 2, 3, 4};
    rows[i].label = i < 30 ? 1 : 0;
  }
  const auto model = TrainRandomForest(rows, {5, 100}, 3);
  ASSERT_TRUE(model.ok());
  EXPECT_NEAR(model->PredictUnchecked(rows[0].x), 0.3, 0.05);
  for (const DecisionTree& t : model->trees) EXPECT_EQ(t.nodes.size(), 1u);
}

TEST(RandomForest, PredictionIsMeanOfTrees) {
  const auto rows = Noisy(150, 2);
  const auto model = *TrainRandomForest(rows, {4, 25}, 5);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-0.5, 1.5);
  for (int i = 0; i < 200; ++i) {
    std::array<double, 5> x;
    for (double& v : x) v = u(rng);
    double sum = 0.0;
    for (const DecisionTree& t : model.trees) sum += t.Predict(x);
    ASSERT_DOUBLE_EQ(model.PredictUnchecked(x), sum / model.trees.size());
  }
  const auto single = *TrainRandomForest(rows, {4, 1}, 5);
  EXPECT_DOUBLE_EQ(single.PredictUnchecked(rows[3].x), single.trees[0].Predict(rows[3].x));
}

TEST(RandomForest, DeterministicAcrossRunsAndThreadCounts) {
  const auto rows = Noisy(120, 3);
  const std::string a = ModelToJson(*TrainRandomForest(rows, {5, 40}, 11, 1));
  const std::string b = ModelToJson(*TrainRandomForest(rows, {5, 40}, 11, 4));
  const std::string c = ModelToJson(*TrainRandomForest(rows, {5, 40}, 12, 1));
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(RandomForest, DepthCapRespected) {
  const auto rows = Noisy(200, 4);
  for (int depth : {1, 2, 3, 5}) {
    const auto model = *TrainRandomForest(rows, {depth, 20}, 1);
    for (const DecisionTree& t : model.trees) {
      ASSERT_LE(t.Depth(), depth);
      ASSERT_TRUE(t.IsWellFormed(5));
      for (const TreeNode& n : t.nodes) {
        if (n.IsLeaf()) ASSERT_TRUE(n.value >= 0.0 && n.value <= 1.0);
      }
    }
  }
}

TEST(RandomForest, Errors) {
  std::vector<TrainingRow> one_class(10);
  EXPECT_EQ(TrainRandomForest(one_class, {2, 5}, 1).status().code(),
            absl::StatusCode::kFailedPrecondition);
  auto rows = Separable(20, 1);
  EXPECT_EQ(TrainRandomForest(rows, {0, 5}, 1).status().code(), absl::StatusCode::kInvalidArgument);
  rows[3].x[2] = std::numeric_limits<double>::infinity();
  EXPECT_EQ(TrainRandomForest(rows, {2, 5}, 1).status().code(), absl::StatusCode::kInvalidArgument);
}

TEST(GradientBoosted, SeparableTrainingAurocIsPerfect) {
  const auto rows = Separable(200, 5);
  const auto model = TrainGradientBoosted(rows, {2, 60, 4, 1.0}, 7);
  ASSERT_TRUE(model.ok()) << model.status();
  EXPECT_DOUBLE_EQ(TrainingAuroc(*model, rows), 100.0);
}

TEST(GradientBoosted, LeafAndDepthCaps) {
  const auto rows = Noisy(300, 6);
  for (const Hyperparams& p : {Hyperparams{-1, 30, 4, 1.0}, Hyperparams{2, 30, 31, 0.8},
                               Hyperparams{4, 30, 10, 1.0}, Hyperparams{-1, 30, 31, 0.8}}) {
    const auto model = *TrainGradientBoosted(rows, p, 2);
    ASSERT_THAT(model.trees, SizeIs(30));
    for (const DecisionTree& t : model.trees) {
      ASSERT_LE(t.NumLeaves(), p.num_leaves);
      if (p.max_depth >= 0) ASSERT_LE(t.Depth(), p.max_depth);
      ASSERT_TRUE(t.IsWellFormed(5));
    }
  }
}

TEST(GradientBoosted, TrainingLossNonIncreasing) {
  for (uint64_t seed : {7u, 8u, 9u}) {
    const auto rows = Noisy(250, seed);
    const auto model = *TrainGradientBoosted(rows, {-1, 80, 31, 1.0}, seed);
    TreeEnsembleModel prefix = model;
    prefix.trees.clear();
    double previous = std::numeric_limits<double>::infinity();
    for (const DecisionTree& t : model.trees) {
      prefix.trees.push_back(t);
      const double loss = LogisticLoss(prefix, rows);
      ASSERT_LE(loss, previous + 1e-12);
      previous = loss;
    }
  }
}

TEST(GradientBoosted, SubsampleChangesModel) {
  const auto rows = Noisy(200, 10);
  EXPECT_NE(ModelToJson(*TrainGradientBoosted(rows, {4, 20, 10, 1.0}, 3)),
            ModelToJson(*TrainGradientBoosted(rows, {4, 20, 10, 0.8}, 3)));
  EXPECT_EQ(ModelToJson(*TrainGradientBoosted(rows, {4, 20, 10, 0.8}, 3)),
            ModelToJson(*TrainGradientBoosted(rows, {4, 20, 10, 0.8}, 3)));
}

TEST(Model, SerialisationRoundTrip) {
  const auto rows = Noisy(200, 11);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  for (ModelKind kind : {ModelKind::kRandomForest, ModelKind::kGradientBoosted}) {
    const auto model = *Train(kind, rows, {4, 30, 10, 0.8}, 5);
    const std::string json = ModelToJson(model);
    const auto back = ModelFromJson(json);
    ASSERT_TRUE(back.ok()) << back.status();
    EXPECT_EQ(*back, model);
    EXPECT_EQ(ModelToJson(*back), json);
    for (int i = 0; i < 1000; ++i) {
      features::FeatureVector fv{u(rng), u(rng), u(rng), u(rng), u(rng)};
      const double p = *model.Predict(fv);
      ASSERT_EQ(*back->Predict(fv), p);
      ASSERT_TRUE(p >= 0.0 && p <= 1.0);
    }
  }
}

TEST(Model, RejectsBadInput) {
  const auto model = *TrainRandomForest(Separable(50, 1), {2, 3}, 1);
  features::FeatureVector fv{std::nan(""), 0, 0, 0, 0};
  EXPECT_EQ(model.Predict(fv).status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_FALSE(ModelFromJson(R"({"kind":"random_forest"})").ok());
  EXPECT_FALSE(ModelFromJson("not json").ok());
  std::string json = ModelToJson(model);
  json.replace(json.find("\"format_version\":1"), 18, "\"format_version\":9");
  EXPECT_FALSE(ModelFromJson(json).ok());
}

TEST(GridSearch, CellCountsAndSingleCell) {
  EXPECT_THAT(DefaultRandomForestGrid().Cells(ModelKind::kRandomForest), SizeIs(25));
  EXPECT_THAT(DefaultGradientBoostedGrid().Cells(ModelKind::kGradientBoosted), SizeIs(54));
  const auto rows = Noisy(60, 13);
  const HyperparamGrid one{{3}, {10}, {}, {}};
  const auto result = GridSearch(rows, one, ModelKind::kRandomForest, 5, 1);
  ASSERT_TRUE(result.ok()) << result.status();
  EXPECT_EQ(result->best_params, (Hyperparams{3, 10}));
  ASSERT_THAT(result->cv_scores, SizeIs(1));
  EXPECT_THAT(result->cv_scores[0].fold_auroc, SizeIs(5));
  EXPECT_THAT(result->model.trees, SizeIs(10));
}

TEST(GridSearch, TiesGoToFewerTreesThenShallower) {
  // Every cell separates the folds perfectly, so all mean AUROCs are 100.
  const auto rows = Margin(60, 14);
  const HyperparamGrid grid{{3, 2}, {40, 20, 30}, {}, {}};
  const auto result = *GridSearch(rows, grid, ModelKind::kRandomForest, 3, 2);
  for (const CellScore& c : result.cv_scores) ASSERT_DOUBLE_EQ(c.mean_auroc, 100.0);
  EXPECT_EQ(result.best_params.n_estimators, 20);
  EXPECT_EQ(result.best_params.max_depth, 2);
}

TEST(GridSearch, DeterministicAndFullRandomForestGrid) {
  const auto rows = Separable(80, 15);
  const auto a = *GridSearch(rows, DefaultRandomForestGrid(), ModelKind::kRandomForest, 5, 3);
  const auto b = *GridSearch(rows, DefaultRandomForestGrid(), ModelKind::kRandomForest, 5, 3);
  ASSERT_THAT(a.cv_scores, SizeIs(25));
  EXPECT_EQ(a.best_params, b.best_params);
  for (std::size_t i = 0; i < a.cv_scores.size(); ++i) {
    EXPECT_EQ(a.cv_scores[i].fold_auroc, b.cv_scores[i].fold_auroc);
  }
  EXPECT_EQ(ModelToJson(a.model), ModelToJson(b.model));
}

TEST(GridSearch, GradientBoostedGridRuns) {
  const auto rows = Noisy(120, 16);
  HyperparamGrid grid = DefaultGradientBoostedGrid();
  grid.n_estimators = {10, 20};
  const auto result = GridSearch(rows, grid, ModelKind::kGradientBoosted, 3, 4);
  ASSERT_TRUE(result.ok()) << result.status();
  EXPECT_THAT(result->cv_scores, SizeIs(36));
  EXPECT_EQ(result->model.kind, ModelKind::kGradientBoosted);
}

TEST(GridSearch, Errors) {
  const auto rows = Separable(40, 17);
  EXPECT_EQ(GridSearch(rows, {}, ModelKind::kRandomForest, 5, 1).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(GridSearch(rows, {{1}, {1}, {}, {}}, ModelKind::kRandomForest, 1, 1).status().code(),
            absl::StatusCode::kInvalidArgument);
  std::vector<TrainingRow> few = Separable(40, 17);
  for (auto& r : few) r.label = 0;
  few[0].label = 1;
  few[1].label = 1;
  EXPECT_EQ(GridSearch(few, {{1}, {1}, {}, {}}, ModelKind::kRandomForest, 5, 1).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(StratifiedFolds, BalancedPerClass) {
  const auto rows = Noisy(103, 18);
  const auto folds = *StratifiedFolds(rows, 5, 9);
  for (int cls : {0, 1}) {
    std::array<int, 5> count{};
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].label == cls) ++count[folds[i]];
    }
    const auto [lo, hi] = std::minmax_element(count.begin(), count.end());
    EXPECT_LE(*hi - *lo, 1);
  }
}

}  // namespace
}  // namespace ragulator::ensemble
