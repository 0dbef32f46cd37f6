#include "ragulator/ensemble/model.h"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "absl/strings/str_cat.h"
#include "ragulator/common/io.h"
#include "ragulator/common/strings.h"

namespace ragulator::ensemble {
namespace {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

double Sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

std::string_view ToString(ModelKind kind) {
  return kind == ModelKind::kRandomForest ? "random_forest" : "gradient_boosted";
}

absl::StatusOr<ModelKind> ParseModelKind(std::string_view s) {
  if (s == "random_forest" || s == "rf") return ModelKind::kRandomForest;
  if (s == "gradient_boosted" || s == "gbt" || s == "lightgbm") return ModelKind::kGradientBoosted;
  return absl::InvalidArgumentError(absl::StrCat("unknown model kind '", ToAbsl(s), "'"));
}

double TreeEnsembleModel::PredictUnchecked(std::span<const double> x) const {
  double sum = 0.0;
  for (const DecisionTree& t : trees) sum += t.Predict(x);
  double p;
  if (kind == ModelKind::kRandomForest) {
    p = sum / static_cast<double>(trees.size());
  } else {
    p = Sigmoid(base_score + learning_rate * sum);
  }
  return std::clamp(p, 0.0, 1.0);
}

absl::StatusOr<double> TreeEnsembleModel::Predict(const features::FeatureVector& fv) const {
  if (trees.empty()) return absl::FailedPreconditionError("model has no trees");
  if (!fv.AllFinite()) return absl::InvalidArgumentError("feature vector has a non-finite value");
  const auto x = fv.ToArray();
  return PredictUnchecked(x);
}

std::string ModelToJson(const TreeEnsembleModel& m) {
  ordered_json j;
  j["format_version"] = kModelFormatVersion;
  j["kind"] = ToString(m.kind);
  j["params"] = {{"max_depth", m.params.max_depth},
                 {"n_estimators", m.params.n_estimators},
                 {"num_leaves", m.params.num_leaves},
                 {"subsample", m.params.subsample}};
  j["learning_rate"] = m.learning_rate;
  j["base_score"] = m.base_score;
  j["feature_names"] = m.feature_names;
  ordered_json trees = ordered_json::array();
  for (const DecisionTree& t : m.trees) {
    ordered_json nodes = ordered_json::array();
    for (const TreeNode& n : t.nodes) {
      if (n.IsLeaf()) {
        nodes.push_back({{"value", n.value}});
      } else {
        nodes.push_back({{"feature", n.feature},
                         {"threshold", n.threshold},
                         {"left", n.left},
                         {"right", n.right}});
      }
    }
    trees.push_back({{"nodes", std::move(nodes)}});
  }
  j["trees"] = std::move(trees);
  return j.dump() + "\n";
}

absl::StatusOr<TreeEnsembleModel> ModelFromJson(std::string_view text) {
  const json j = json::parse(text.begin(), text.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object())
    return absl::InvalidArgumentError("model is not a JSON object");
  TreeEnsembleModel m;
  try {
    const auto version = j.find("format_version");
    if (version == j.end()) return absl::InvalidArgumentError("model lacks format_version");
    if (version->get<int>() != kModelFormatVersion) {
      return absl::InvalidArgumentError(
          absl::StrCat("unsupported model format_version ", version->get<int>()));
    }
    auto kind = ParseModelKind(j.at("kind").get<std::string>());
    if (!kind.ok()) return kind.status();
    m.kind = *kind;
    const json& p = j.at("params");
    m.params.max_depth = p.at("max_depth").get<int>();
    m.params.n_estimators = p.at("n_estimators").get<int>();
    m.params.num_leaves = p.at("num_leaves").get<int>();
    m.params.subsample = p.at("subsample").get<double>();
    m.learning_rate = j.at("learning_rate").get<double>();
    m.base_score = j.at("base_score").get<double>();
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    const int num_features = static_cast<int>(m.feature_names.size());
    for (const json& t : j.at("trees")) {
      DecisionTree tree;
      for (const json& n : t.at("nodes")) {
        TreeNode node;
        if (n.contains("value")) {
          node.value = n.at("value").get<double>();
        } else {
          node.feature = n.at("feature").get<int>();
          node.threshold = n.at("threshold").get<double>();
          node.left = n.at("left").get<int>();
          node.right = n.at("right").get<int>();
        }
        tree.nodes.push_back(node);
      }
      if (!tree.IsWellFormed(num_features)) {
        return absl::InvalidArgumentError(absl::StrCat("tree ", m.trees.size(), " is malformed"));
      }
      m.trees.push_back(std::move(tree));
    }
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("malformed model: ", e.what()));
  }
  if (m.trees.empty()) return absl::InvalidArgumentError("model has no trees");
  return m;
}

absl::Status SaveModel(const std::string& path, const TreeEnsembleModel& model) {
  return WriteFile(path, ModelToJson(model));
}

absl::StatusOr<TreeEnsembleModel> LoadModel(const std::string& path) {
  auto text = ReadFile(path);
  if (!text.ok()) return text.status();
  auto model = ModelFromJson(*text);
  if (!model.ok()) {
    return absl::Status(model.status().code(), absl::StrCat(path, ": ", model.status().message()));
  }
  return model;
}

}  // namespace ragulator::ensemble
