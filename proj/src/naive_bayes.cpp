#include "leakaudit/naive_bayes.hpp"

#include <cmath>

#include "leakaudit/errors.hpp"

namespace leakaudit {

NBModel nb_fit(const FeatureMatrix& counts, const std::vector<Group>& labels,
               double alpha) {
  if (alpha <= 0.0) throw data_error("nb_fit: alpha must be positive");
  if (counts.rows.size() != labels.size())
    throw data_error("nb_fit: row/label count mismatch");
  const std::size_t n_terms = counts.vocab->size();

  std::array<std::vector<double>, 2> term_counts{
      std::vector<double>(n_terms, 0.0), std::vector<double>(n_terms, 0.0)};
  std::array<double, 2> total_counts{0.0, 0.0};
  std::array<std::size_t, 2> n_docs{0, 0};

  for (std::size_t i = 0; i < labels.size(); ++i) {
    std::size_t c = static_cast<std::size_t>(labels[i]);
    ++n_docs[c];
    for (const auto& [idx, w] : counts.rows[i]) {
      term_counts[c][idx] += w;
      total_counts[c] += w;
    }
  }
  if (n_docs[0] == 0 || n_docs[1] == 0)
    throw data_error("nb_fit: a class has zero documents");

  NBModel model;
  model.alpha = alpha;
  double n_total = static_cast<double>(labels.size());
  for (std::size_t c = 0; c < 2; ++c) {
    model.log_prior[c] = std::log(static_cast<double>(n_docs[c]) / n_total);
    model.log_likelihood[c].resize(n_terms);
    double denom = total_counts[c] + alpha * static_cast<double>(n_terms);
    for (std::size_t t = 0; t < n_terms; ++t)
      model.log_likelihood[c][t] = std::log((term_counts[c][t] + alpha) / denom);
  }
  return model;
}

std::pair<Group, std::array<double, 2>> NBModel::predict(
    const SparseRow& doc) const {
  std::array<double, 2> scores = log_prior;
  for (const auto& [idx, w] : doc) {
    scores[0] += w * log_likelihood[0][idx];
    scores[1] += w * log_likelihood[1][idx];
  }
  Group label = scores[0] >= scores[1] ? Group::A : Group::B;
  return {label, scores};
}

nlohmann::json NBModel::to_json() const {
  return {{"kind", "naive_bayes"},
          {"alpha", alpha},
          {"log_prior", log_prior},
          {"log_likelihood", {log_likelihood[0], log_likelihood[1]}}};
}

NBModel NBModel::from_json(const nlohmann::json& j) {
  NBModel m;
  m.alpha = j.at("alpha").get<double>();
  auto priors = j.at("log_prior");
  m.log_prior = {priors.at(0).get<double>(), priors.at(1).get<double>()};
  auto lik = j.at("log_likelihood");
  m.log_likelihood[0] = lik.at(0).get<std::vector<double>>();
  m.log_likelihood[1] = lik.at(1).get<std::vector<double>>();
  return m;
}

}  // namespace leakaudit
