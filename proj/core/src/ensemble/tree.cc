#include "ragulator/ensemble/tree.h"

#include <algorithm>
#include <utility>

namespace ragulator::ensemble {

double DecisionTree::Predict(std::span<const double> x) const {
  int i = 0;
  while (!nodes[i].IsLeaf()) {
    const TreeNode& n = nodes[i];
    i = x[n.feature] <= n.threshold ? n.left : n.right;
  }
  return nodes[i].value;
}

int DecisionTree::Depth() const {
  if (nodes.empty()) return 0;
  int depth = 0;
  std::vector<std::pair<int, int>> stack = {{0, 0}};
  while (!stack.empty()) {
    const auto [i, d] = stack.back();
    stack.pop_back();
    depth = std::max(depth, d);
    if (!nodes[i].IsLeaf()) {
      stack.push_back({nodes[i].left, d + 1});
      stack.push_back({nodes[i].right, d + 1});
    }
  }
  return depth;
}

int DecisionTree::NumLeaves() const {
  return static_cast<int>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.IsLeaf(); }));
}

bool DecisionTree::IsWellFormed(int num_features) const {
  if (nodes.empty()) return false;
  const int n = static_cast<int>(nodes.size());
  std::vector<int> parents(nodes.size(), 0);
  for (int i = 0; i < n; ++i) {
    const TreeNode& node = nodes[i];
    if (node.IsLeaf()) continue;
    if (node.feature >= num_features) return false;
    // Children come after their parent, which rules out cycles.
    for (int child : {node.left, node.right}) {
      if (child <= i || child >= n) return false;
      ++parents[child];
    }
  }
  if (parents[0] != 0) return false;
  return std::all_of(parents.begin() + 1, parents.end(), [](int p) { return p == 1; });
}

}  // namespace ragulator::ensemble
