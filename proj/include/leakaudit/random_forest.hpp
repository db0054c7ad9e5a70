#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include <json.hpp>

#include "leakaudit/corpus.hpp"
#include "leakaudit/features.hpp"

namespace leakaudit {

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // midpoint between adjacent sorted values
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::array<std::uint32_t, 2> counts{0, 0};  // node class counts

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // preorder, root at 0

  // Leaf class counts for the routed document (value < threshold goes left).
  const std::array<std::uint32_t, 2>& leaf_counts(const SparseRow& doc) const;
};

struct RFParams {
  int n_trees = 100;
  int max_depth = -1;          // -1: unlimited
  int features_per_split = 0;  // 0: ceil(sqrt(|V|))
};

struct RFModel {
  std::vector<Tree> trees;
  RFParams params;
  std::uint64_t seed = 0;
  std::size_t n_features = 0;
  // mean Gini impurity decrease per term across trees
  std::vector<double> feature_importance;

  nlohmann::json to_json() const;
  static RFModel from_json(const nlohmann::json& j);
};

// Seeded bagging: tree i trains on a bootstrap resample drawn from
// mix_seed(seed, i), so parallel and serial training build identical
// forests. Splits maximize Gini impurity decrease over a random feature
// subset; ties break on the lowest feature index, then lowest threshold.
// Single-class inputs yield single-leaf trees. The OpenMP path builds trees
// concurrently; reference::rf_fit is the serial kernel kept for testing.
RFModel rf_fit(const FeatureMatrix& data, const std::vector<Group>& labels,
               const RFParams& params, std::uint64_t seed);

namespace reference {
RFModel rf_fit(const FeatureMatrix& data, const std::vector<Group>& labels,
               const RFParams& params, std::uint64_t seed);
}

// Majority vote over trees; ties go to class A. Fractions sum to 1.
std::pair<Group, std::array<double, 2>> rf_predict(const RFModel& model,
                                                   const SparseRow& doc);

}  // namespace leakaudit
