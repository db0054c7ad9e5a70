#include "leakaudit/random_forest.hpp"

#include <algorithm>
#include <cmath>

#include "leakaudit/errors.hpp"
#include "leakaudit/rng.hpp"

namespace leakaudit {

namespace {

double row_value(const SparseRow& row, std::uint32_t feature) {
  auto it = std::lower_bound(
      row.begin(), row.end(), feature,
      [](const auto& entry, std::uint32_t idx) { return entry.first < idx; });
  return it != row.end() && it->first == feature ? it->second : 0.0;
}

double gini(const std::array<std::uint32_t, 2>& counts) {
  double n = static_cast<double>(counts[0] + counts[1]);
  if (n == 0.0) return 0.0;
  double pa = counts[0] / n, pb = counts[1] / n;
  return 1.0 - pa * pa - pb * pb;
}

struct TreeBuilder {
  const FeatureMatrix& data;
  const std::vector<Group>& labels;
  const RFParams& params;
  int mtry;
  Rng rng;
  Tree tree;
  std::vector<double> importance;  // Gini decrease, sample-weighted
  std::size_t n_root = 0;

  TreeBuilder(const FeatureMatrix& d, const std::vector<Group>& l,
              const RFParams& p, int m, std::uint64_t seed)
      : data(d), labels(l), params(p), mtry(m), rng(seed),
        importance(d.vocab->size(), 0.0) {}

  Tree build() {
    std::size_t n = data.rows.size();
    std::vector<std::uint32_t> samples(n);
    for (std::size_t i = 0; i < n; ++i)
      samples[i] = static_cast<std::uint32_t>(rng.below(n));
    std::sort(samples.begin(), samples.end());
    n_root = n;
    grow(samples, 0);
    return std::move(tree);
  }

  std::int32_t grow(std::vector<std::uint32_t>& samples, int depth) {
    std::int32_t node_idx = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();

    std::array<std::uint32_t, 2> counts{0, 0};
    for (std::uint32_t s : samples)
      ++counts[static_cast<std::size_t>(labels[s])];
    tree.nodes[node_idx].counts = counts;

    bool pure = counts[0] == 0 || counts[1] == 0;
    bool depth_hit = params.max_depth >= 0 && depth >= params.max_depth;
    if (pure || depth_hit || samples.size() < 2) return node_idx;

    double parent_gini = gini(counts);
    double n_node = static_cast<double>(samples.size());

    std::vector<std::size_t> candidates =
        rng.sample_indices(data.vocab->size(), static_cast<std::size_t>(mtry));
    std::sort(candidates.begin(), candidates.end());

    double best_child = parent_gini;  // only accept strict improvements
    std::int32_t best_feature = -1;
    double best_threshold = 0.0;

    std::vector<std::pair<double, std::uint8_t>> values;
    values.reserve(samples.size());
    for (std::size_t f : candidates) {
      values.clear();
      for (std::uint32_t s : samples)
        values.emplace_back(row_value(data.rows[s], static_cast<std::uint32_t>(f)),
                            static_cast<std::uint8_t>(labels[s]));
      std::sort(values.begin(), values.end(),
                [](const auto& x, const auto& y) { return x.first < y.first; });
      if (values.front().first == values.back().first) continue;

      std::array<std::uint32_t, 2> left{0, 0};
      for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        ++left[values[i].second];
        if (values[i].first == values[i + 1].first) continue;
        std::array<std::uint32_t, 2> right{counts[0] - left[0],
                                           counts[1] - left[1]};
        double n_left = static_cast<double>(left[0] + left[1]);
        double child = (n_left * gini(left) +
                        (n_node - n_left) * gini(right)) /
                       n_node;
        if (child < best_child) {
          best_child = child;
          best_feature = static_cast<std::int32_t>(f);
          best_threshold = (values[i].first + values[i + 1].first) / 2.0;
        }
      }
    }
    if (best_feature < 0) return node_idx;

    std::vector<std::uint32_t> left_samples, right_samples;
    for (std::uint32_t s : samples) {
      double v = row_value(data.rows[s], static_cast<std::uint32_t>(best_feature));
      (v < best_threshold ? left_samples : right_samples).push_back(s);
    }
    samples.clear();
    samples.shrink_to_fit();

    importance[best_feature] +=
        (n_node / static_cast<double>(n_root)) * (parent_gini - best_child);

    tree.nodes[node_idx].feature = best_feature;
    tree.nodes[node_idx].threshold = best_threshold;
    std::int32_t l = grow(left_samples, depth + 1);
    tree.nodes[node_idx].left = l;
    std::int32_t r = grow(right_samples, depth + 1);
    tree.nodes[node_idx].right = r;
    return node_idx;
  }
};

int resolve_mtry(const RFParams& params, std::size_t n_features) {
  int mtry = params.features_per_split;
  if (mtry <= 0)
    mtry = static_cast<int>(
        std::ceil(std::sqrt(static_cast<double>(n_features))));
  return std::clamp(mtry, 1, static_cast<int>(n_features));
}

RFModel fit_impl(const FeatureMatrix& data, const std::vector<Group>& labels,
                 const RFParams& params, std::uint64_t seed, bool parallel) {
  if (params.n_trees < 1) throw data_error("rf_fit: n_trees must be >= 1");
  if (data.rows.empty()) throw data_error("rf_fit: empty training set");
  if (data.rows.size() != labels.size())
    throw data_error("rf_fit: row/label count mismatch");

  RFModel model;
  model.params = params;
  model.seed = seed;
  model.n_features = data.vocab->size();
  model.trees.resize(params.n_trees);
  int mtry = resolve_mtry(params, model.n_features);

  std::vector<std::vector<double>> tree_importance(params.n_trees);
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < params.n_trees; ++i) {
      TreeBuilder builder(data, labels, params, mtry, mix_seed(seed, i));
      model.trees[i] = builder.build();
      tree_importance[i] = std::move(builder.importance);
    }
  } else {
    for (int i = 0; i < params.n_trees; ++i) {
      TreeBuilder builder(data, labels, params, mtry, mix_seed(seed, i));
      model.trees[i] = builder.build();
      tree_importance[i] = std::move(builder.importance);
    }
  }

  // summed in tree order so parallel and serial runs agree bitwise
  model.feature_importance.assign(model.n_features, 0.0);
  for (const auto& imp : tree_importance)
    for (std::size_t t = 0; t < imp.size(); ++t)
      model.feature_importance[t] += imp[t];
  for (double& v : model.feature_importance)
    v /= static_cast<double>(params.n_trees);
  return model;
}

}  // namespace

RFModel rf_fit(const FeatureMatrix& data, const std::vector<Group>& labels,
               const RFParams& params, std::uint64_t seed) {
  return fit_impl(data, labels, params, seed, true);
}

namespace reference {

RFModel rf_fit(const FeatureMatrix& data, const std::vector<Group>& labels,
               const RFParams& params, std::uint64_t seed) {
  return fit_impl(data, labels, params, seed, false);
}

}  // namespace reference

const std::array<std::uint32_t, 2>& Tree::leaf_counts(
    const SparseRow& doc) const {
  std::size_t idx = 0;
  while (!nodes[idx].is_leaf()) {
    double v = row_value(doc, static_cast<std::uint32_t>(nodes[idx].feature));
    idx = v < nodes[idx].threshold ? nodes[idx].left : nodes[idx].right;
  }
  return nodes[idx].counts;
}

std::pair<Group, std::array<double, 2>> rf_predict(const RFModel& model,
                                                   const SparseRow& doc) {
  std::array<std::size_t, 2> votes{0, 0};
  for (const Tree& tree : model.trees) {
    const auto& counts = tree.leaf_counts(doc);
    // leaf majority, ties to class A
    ++votes[counts[0] >= counts[1] ? 0 : 1];
  }
  double n = static_cast<double>(model.trees.size());
  std::array<double, 2> fractions{votes[0] / n, votes[1] / n};
  Group label = votes[0] >= votes[1] ? Group::A : Group::B;
  return {label, fractions};
}

nlohmann::json RFModel::to_json() const {
  nlohmann::json trees_json = nlohmann::json::array();
  for (const Tree& t : trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const TreeNode& n : t.nodes)
      nodes.push_back({n.feature, n.threshold, n.left, n.right, n.counts[0],
                       n.counts[1]});
    trees_json.push_back(std::move(nodes));
  }
  return {{"kind", "random_forest"},
          {"n_trees", params.n_trees},
          {"max_depth", params.max_depth},
          {"features_per_split", params.features_per_split},
          {"seed", seed},
          {"n_features", n_features},
          {"feature_importance", feature_importance},
          {"trees", trees_json}};
}

RFModel RFModel::from_json(const nlohmann::json& j) {
  RFModel m;
  m.params.n_trees = j.at("n_trees").get<int>();
  m.params.max_depth = j.at("max_depth").get<int>();
  m.params.features_per_split = j.at("features_per_split").get<int>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.n_features = j.at("n_features").get<std::size_t>();
  m.feature_importance = j.at("feature_importance").get<std::vector<double>>();
  for (const auto& nodes : j.at("trees")) {
    Tree t;
    for (const auto& n : nodes) {
      TreeNode node;
      node.feature = n.at(0).get<std::int32_t>();
      node.threshold = n.at(1).get<double>();
      node.left = n.at(2).get<std::int32_t>();
      node.right = n.at(3).get<std::int32_t>();
      node.counts = {n.at(4).get<std::uint32_t>(), n.at(5).get<std::uint32_t>()};
      t.nodes.push_back(node);
    }
    m.trees.push_back(std::move(t));
  }
  return m;
}

}  // namespace leakaudit
