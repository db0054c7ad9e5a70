#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include <json.hpp>

#include "leakaudit/corpus.hpp"
#include "leakaudit/features.hpp"

namespace leakaudit {

// Multinomial Naive Bayes over raw term counts with Laplace smoothing:
//   log P(t|c) = ln((count(t,c) + alpha) / (total(c) + alpha*|V|))
// Priors come from label frequencies. Ties in prediction go to class A.
struct NBModel {
  std::array<double, 2> log_prior{};
  std::array<std::vector<double>, 2> log_likelihood;  // per class, size |V|
  double alpha = 1.0;

  std::size_t n_features() const { return log_likelihood[0].size(); }

  // argmax over classes of log-prior + sum count * log-likelihood.
  std::pair<Group, std::array<double, 2>> predict(const SparseRow& doc) const;

  nlohmann::json to_json() const;
  static NBModel from_json(const nlohmann::json& j);
};

NBModel nb_fit(const FeatureMatrix& counts, const std::vector<Group>& labels,
               double alpha);

}  // namespace leakaudit
