#include "ragulator/ensemble/train.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "ragulator/common/parallel.h"
#include "ragulator/common/random.h"

namespace ragulator::ensemble {
namespace {

constexpr int kNumFeatures = static_cast<int>(features::kNumFeatures);
constexpr int kForestFeaturesPerSplit = 2;  // floor(sqrt(5))
constexpr double kMinGain = 1e-12;

double Sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Threshold strictly between a < b that routes a left and b right.
double Midpoint(double a, double b) {
  const double mid = a + (b - a) / 2.0;
  return mid < b ? mid : a;
}

absl::Status ValidateRows(std::span<const TrainingRow> rows) {
  std::size_t pos = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const TrainingRow& r = rows[i];
    if (r.label != 0 && r.label != 1) {
      return absl::InvalidArgumentError(absl::StrCat("row ", i, " has label ", r.label));
    }
    for (double v : r.x) {
      if (!std::isfinite(v)) {
        return absl::InvalidArgumentError(absl::StrCat("row ", i, " has a non-finite feature"));
      }
    }
    pos += static_cast<std::size_t>(r.label);
  }
  if (pos == 0 || pos == rows.size()) {
    return absl::FailedPreconditionError("untrainable: training rows must contain both classes");
  }
  return absl::OkStatus();
}

absl::Status ValidateParams(ModelKind kind, const Hyperparams& p) {
  if (p.n_estimators < 1) return absl::InvalidArgumentError("n_estimators must be >= 1");
  if (p.max_depth == 0 || p.max_depth < -1) {
    return absl::InvalidArgumentError("max_depth must be -1 or >= 1");
  }
  if (kind == ModelKind::kGradientBoosted) {
    if (p.num_leaves < 2) return absl::InvalidArgumentError("num_leaves must be >= 2");
    if (!(p.subsample > 0.0 && p.subsample <= 1.0)) {
      return absl::InvalidArgumentError("subsample must be in (0, 1]");
    }
  }
  return absl::OkStatus();
}

std::vector<std::string> FeatureNames() {
  return {features::kFeatureNames.begin(), features::kFeatureNames.end()};
}

// ---- Random forest --------------------------------------------------------

class ForestTreeBuilder {
 public:
  ForestTreeBuilder(std::span<const TrainingRow> rows, int max_depth, Rng& rng)
      : rows_(rows), max_depth_(max_depth), rng_(rng) {}

  DecisionTree Build(std::vector<std::size_t> sample) {
    Grow(sample, 0);
    return std::move(tree_);
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double impurity = 0.0;  // weighted Gini sum of both children
  };

  static double WeightedGini(double pos, double n) {
    if (n == 0.0) return 0.0;
    const double p = pos / n;
    return n * 2.0 * p * (1.0 - p);
  }

  int Grow(std::vector<std::size_t>& idx, int depth) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    double pos = 0.0;
    for (std::size_t i : idx) pos += rows_[i].label;
    const double n = static_cast<double>(idx.size());
    tree_.nodes[id].value = pos / n;
    if (pos == 0.0 || pos == n || idx.size() < 2 || (max_depth_ >= 0 && depth >= max_depth_)) {
      return id;
    }
    const double parent = WeightedGini(pos, n);
    Split best;
    best.impurity = parent - kMinGain;

    std::array<int, kNumFeatures> order;
    std::iota(order.begin(), order.end(), 0);
    int evaluated = 0;
    // Draw features in random order, skipping those constant in this node,
    // until kForestFeaturesPerSplit have been evaluated.
    for (int k = 0; k < kNumFeatures && evaluated < kForestFeaturesPerSplit; ++k) {
      const std::size_t pick = k + rng_.UniformIndex(kNumFeatures - k);
      std::swap(order[k], order[pick]);
      const int f = order[k];
      std::sort(idx.begin(), idx.end(),
                [&](std::size_t a, std::size_t b) { return rows_[a].x[f] < rows_[b].x[f]; });
      if (rows_[idx.front()].x[f] == rows_[idx.back()].x[f]) continue;
      ++evaluated;
      double left_pos = 0.0;
      for (std::size_t j = 1; j < idx.size(); ++j) {
        left_pos += rows_[idx[j - 1]].label;
        const double a = rows_[idx[j - 1]].x[f];
        const double b = rows_[idx[j]].x[f];
        if (a == b) continue;
        const double nl = static_cast<double>(j);
        const double impurity = WeightedGini(left_pos, nl) + WeightedGini(pos - left_pos, n - nl);
        if (impurity < best.impurity) best = {f, Midpoint(a, b), impurity};
      }
    }
    if (best.feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (std::size_t i : idx) {
      (rows_[i].x[best.feature] <= best.threshold ? left : right).push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();
    const int l = Grow(left, depth + 1);
    const int r = Grow(right, depth + 1);
    TreeNode& node = tree_.nodes[id];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = l;
    node.right = r;
    node.value = 0.0;
    return id;
  }

  std::span<const TrainingRow> rows_;
  int max_depth_;
  Rng& rng_;
  DecisionTree tree_;
};

// ---- Gradient boosting ----------------------------------------------------

class BoostedTreeBuilder {
 public:
  BoostedTreeBuilder(std::span<const TrainingRow> rows, const std::vector<double>& grad,
                     const std::vector<double>& hess, const Hyperparams& params,
                     const GbtOptions& options)
      : rows_(rows), grad_(grad), hess_(hess), params_(params), options_(options) {}

  // Returns the tree and, per leaf node id, the rows that landed there.
  DecisionTree Build(std::vector<std::size_t> sample,
                     std::vector<std::vector<std::size_t>>& leaf_rows) {
    std::vector<Leaf> open;
    open.push_back(MakeLeaf(NewNode(), std::move(sample), 0));
    int leaves = 1;
    while (leaves < params_.num_leaves) {
      auto it = std::max_element(open.begin(), open.end(), [](const Leaf& a, const Leaf& b) {
        return a.split.gain < b.split.gain || (a.split.gain == b.split.gain && a.node > b.node);
      });
      if (it == open.end() || it->split.feature < 0) break;
      Leaf leaf = std::move(*it);
      open.erase(it);
      std::vector<std::size_t> left, right;
      for (std::size_t i : leaf.rows) {
        (rows_[i].x[leaf.split.feature] <= leaf.split.threshold ? left : right).push_back(i);
      }
      const int l = NewNode();
      const int r = NewNode();
      TreeNode& node = tree_.nodes[leaf.node];
      node.feature = leaf.split.feature;
      node.threshold = leaf.split.threshold;
      node.left = l;
      node.right = r;
      node.value = 0.0;
      open.push_back(MakeLeaf(l, std::move(left), leaf.depth + 1));
      open.push_back(MakeLeaf(r, std::move(right), leaf.depth + 1));
      ++leaves;
    }
    leaf_rows.assign(tree_.nodes.size(), {});
    for (Leaf& leaf : open) {
      tree_.nodes[leaf.node].value = -leaf.g / (leaf.h + options_.lambda_l2);
      leaf_rows[leaf.node] = std::move(leaf.rows);
    }
    return std::move(tree_);
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
  };
  struct Leaf {
    int node = 0;
    std::vector<std::size_t> rows;
    int depth = 0;
    double g = 0.0;
    double h = 0.0;
    Split split;
  };

  int NewNode() {
    tree_.nodes.emplace_back();
    return static_cast<int>(tree_.nodes.size()) - 1;
  }

  double Score(double g, double h) const { return g * g / (h + options_.lambda_l2); }

  Leaf MakeLeaf(int node, std::vector<std::size_t> rows, int depth) {
    Leaf leaf;
    leaf.node = node;
    leaf.rows = std::move(rows);
    leaf.depth = depth;
    for (std::size_t i : leaf.rows) {
      leaf.g += grad_[i];
      leaf.h += hess_[i];
    }
    const auto min_data = static_cast<std::size_t>(options_.min_data_in_leaf);
    if ((params_.max_depth >= 0 && depth >= params_.max_depth) ||
        leaf.rows.size() < 2 * std::max<std::size_t>(min_data, 1)) {
      return leaf;
    }
    const double parent = Score(leaf.g, leaf.h);
    std::vector<std::size_t> idx = leaf.rows;
    for (int f = 0; f < kNumFeatures; ++f) {
      std::sort(idx.begin(), idx.end(),
                [&](std::size_t a, std::size_t b) { return rows_[a].x[f] < rows_[b].x[f]; });
      double gl = 0.0, hl = 0.0;
      for (std::size_t j = 1; j < idx.size(); ++j) {
        gl += grad_[idx[j - 1]];
        hl += hess_[idx[j - 1]];
        const double a = rows_[idx[j - 1]].x[f];
        const double b = rows_[idx[j]].x[f];
        if (a == b || j < min_data || idx.size() - j < min_data) continue;
        const double gr = leaf.g - gl;
        const double hr = leaf.h - hl;
        if (hl < options_.min_sum_hessian_in_leaf || hr < options_.min_sum_hessian_in_leaf)
          continue;
        const double gain = Score(gl, hl) + Score(gr, hr) - parent;
        if (gain > kMinGain && gain > leaf.split.gain) leaf.split = {f, Midpoint(a, b), gain};
      }
    }
    return leaf;
  }

  std::span<const TrainingRow> rows_;
  const std::vector<double>& grad_;
  const std::vector<double>& hess_;
  const Hyperparams& params_;
  const GbtOptions& options_;
  DecisionTree tree_;
};

double RowLoss(double margin, int label) {
  // log(1 + exp(-s)) with s = +margin for label 1, -margin for label 0.
  const double s = label == 1 ? margin : -margin;
  return s > 0 ? std::log1p(std::exp(-s)) : -s + std::log1p(std::exp(s));
}

}  // namespace

std::vector<TrainingRow> ToTrainingRows(std::span<const features::FeatureRow> rows) {
  std::vector<TrainingRow> out;
  out.reserve(rows.size());
  for (const features::FeatureRow& r : rows) {
    out.push_back({r.features.ToArray(), r.label ? static_cast<int>(*r.label) : 0});
  }
  return out;
}

absl::StatusOr<TreeEnsembleModel> TrainRandomForest(std::span<const TrainingRow> rows,
                                                    const Hyperparams& params, uint64_t seed,
                                                    unsigned max_threads) {
  if (auto s = ValidateParams(ModelKind::kRandomForest, params); !s.ok()) return s;
  if (auto s = ValidateRows(rows); !s.ok()) return s;
  TreeEnsembleModel model;
  model.kind = ModelKind::kRandomForest;
  model.params = params;
  model.feature_names = FeatureNames();
  model.trees.resize(static_cast<std::size_t>(params.n_estimators));
  ParallelFor(
      model.trees.size(),
      [&](std::size_t t) {
        Rng rng(DeriveSeed(seed, t));
        std::vector<std::size_t> sample(rows.size());
        for (std::size_t& i : sample) i = rng.UniformIndex(rows.size());
        model.trees[t] = ForestTreeBuilder(rows, params.max_depth, rng).Build(std::move(sample));
      },
      max_threads);
  return model;
}

absl::StatusOr<TreeEnsembleModel> TrainGradientBoosted(std::span<const TrainingRow> rows,
                                                       const Hyperparams& params, uint64_t seed,
                                                       const GbtOptions& options) {
  if (auto s = ValidateParams(ModelKind::kGradientBoosted, params); !s.ok()) return s;
  if (auto s = ValidateRows(rows); !s.ok()) return s;
  const std::size_t n = rows.size();
  double pos = 0.0;
  for (const TrainingRow& r : rows) pos += r.label;
  const double prior = pos / static_cast<double>(n);

  TreeEnsembleModel model;
  model.kind = ModelKind::kGradientBoosted;
  model.params = params;
  model.learning_rate = options.learning_rate;
  model.base_score = std::log(prior / (1.0 - prior));
  model.feature_names = FeatureNames();

  std::vector<double> margin(n, model.base_score);
  std::vector<double> grad(n), hess(n);
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  const auto sample_size = static_cast<std::size_t>(
      std::max<long long>(1, std::llround(params.subsample * static_cast<double>(n))));

  for (int iter = 0; iter < params.n_estimators; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = Sigmoid(margin[i]);
      grad[i] = p - rows[i].label;
      hess[i] = std::max(p * (1.0 - p), 1e-16);
    }
    std::vector<std::size_t> sample = all;
    if (sample_size < n) {
      Rng rng(DeriveSeed(seed, static_cast<uint64_t>(iter)));
      for (std::size_t k = 0; k < sample_size; ++k) {
        std::swap(sample[k], sample[k + rng.UniformIndex(n - k)]);
      }
      sample.resize(sample_size);
      std::sort(sample.begin(), sample.end());
    }
    std::vector<std::vector<std::size_t>> leaf_rows;
    DecisionTree tree =
        BoostedTreeBuilder(rows, grad, hess, params, options).Build(std::move(sample), leaf_rows);

    // Halve a leaf's step while it would raise the loss of the rows it was
    // fitted on.
    for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
      TreeNode& node = tree.nodes[id];
      if (!node.IsLeaf() || leaf_rows[id].empty()) continue;
      double before = 0.0;
      for (std::size_t i : leaf_rows[id]) before += RowLoss(margin[i], rows[i].label);
      bool accepted = false;
      for (int halvings = 0; halvings < 40 && !accepted; ++halvings) {
        double after = 0.0;
        for (std::size_t i : leaf_rows[id]) {
          after += RowLoss(margin[i] + options.learning_rate * node.value, rows[i].label);
        }
        accepted = after <= before;
        if (!accepted) node.value /= 2.0;
      }
      if (!accepted) node.value = 0.0;
    }
    for (std::size_t i = 0; i < n; ++i) {
      margin[i] += options.learning_rate * tree.Predict(rows[i].x);
    }
    model.trees.push_back(std::move(tree));
  }
  return model;
}

absl::StatusOr<TreeEnsembleModel> Train(ModelKind kind, std::span<const TrainingRow> rows,
                                        const Hyperparams& params, uint64_t seed,
                                        unsigned max_threads) {
  if (kind == ModelKind::kRandomForest) return TrainRandomForest(rows, params, seed, max_threads);
  return TrainGradientBoosted(rows, params, seed);
}

double LogisticLoss(const TreeEnsembleModel& model, std::span<const TrainingRow> rows) {
  double loss = 0.0;
  for (const TrainingRow& r : rows) {
    const double p = std::clamp(model.PredictUnchecked(r.x), 1e-15, 1.0 - 1e-15);
    loss -= r.label == 1 ? std::log(p) : std::log(1.0 - p);
  }
  return loss / static_cast<double>(rows.size());
}

}  // namespace ragulator::ensemble
