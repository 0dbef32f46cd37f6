#ifndef RAGULATOR_ENSEMBLE_TREE_H_
#define RAGULATOR_ENSEMBLE_TREE_H_

#include <span>
#include <vector>

namespace ragulator::ensemble {

// Internal nodes route x[feature] <= threshold to `left`. Leaves have
// feature == -1 and carry `value`.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool IsLeaf() const { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// Node 0 is the root.
struct DecisionTree {
  std::vector<TreeNode> nodes;

  double Predict(std::span<const double> x) const;
  int Depth() const;  // a lone leaf has depth 0
  int NumLeaves() const;
  bool IsWellFormed(int num_features) const;

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

}  // namespace ragulator::ensemble

#endif  // RAGULATOR_ENSEMBLE_TREE_H_
