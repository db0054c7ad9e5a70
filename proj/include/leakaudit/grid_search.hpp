#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "leakaudit/evaluation.hpp"
#include "leakaudit/features.hpp"

namespace leakaudit {

enum class ModelKind { naive_bayes, random_forest };

// Named hyperparameter values. NB reads "alpha"; RF reads "n_trees",
// "max_depth" (-1 for unlimited) and "features_per_split" (0 for sqrt).
using ParamSet = std::map<std::string, double>;

struct GridSpec {
  // Cartesian product in declared order; first axis varies slowest.
  std::vector<std::pair<std::string, std::vector<double>>> axes;
  enum class Metric { accuracy, f1 } metric = Metric::accuracy;
  int cv_folds = 5;
  std::uint64_t seed = 0;

  std::vector<ParamSet> points() const;
};

struct CvCell {
  ParamSet params;
  std::vector<double> fold_scores;
  double mean_score = 0.0;
};

struct GridResult {
  ParamSet best;
  double best_score = 0.0;
  std::vector<CvCell> table;

  nlohmann::json to_json() const;
};

// Stratified k-fold cross validation per grid point. Folds are dealt
// round-robin from seed-shuffled per-group index lists, so fold membership
// is deterministic. The winner is the argmax of the mean selection metric;
// ties keep the earliest point in grid order. Fits inside CV derive their
// seeds from (seed, point, fold), so parallel evaluation equals sequential.
GridResult grid_search(const FeatureMatrix& data,
                       const std::vector<Group>& labels, ModelKind kind,
                       const GridSpec& grid);

// Fold assignment shared with tests: fold id per document.
std::vector<int> stratified_folds(const std::vector<Group>& labels, int k,
                                  std::uint64_t seed);

}  // namespace leakaudit
