#include "leakaudit/importance.hpp"

#include <algorithm>
#include <cmath>

#include "leakaudit/errors.hpp"

namespace leakaudit {

namespace {

ImportanceRanking ranked(std::string scope, std::vector<ImportanceEntry> scored,
                         std::size_t top_k) {
  std::sort(scored.begin(), scored.end(),
            [](const ImportanceEntry& x, const ImportanceEntry& y) {
              if (x.score != y.score) return x.score > y.score;
              return x.term < y.term;
            });
  if (scored.size() > top_k) scored.resize(top_k);
  return ImportanceRanking{std::move(scope), std::move(scored)};
}

}  // namespace

ImportanceRanking model_importance(const NBModel& model, const Vocabulary& vocab,
                                   std::size_t top_k) {
  if (model.n_features() != vocab.size())
    throw data_error("model_importance: vocabulary size mismatch");
  std::vector<ImportanceEntry> scored;
  scored.reserve(vocab.size());
  for (std::uint32_t t = 0; t < vocab.size(); ++t)
    scored.push_back({vocab.terms[t],
                      std::abs(model.log_likelihood[0][t] -
                               model.log_likelihood[1][t])});
  return ranked("model:naive_bayes", std::move(scored), top_k);
}

ImportanceRanking model_importance(const RFModel& model, const Vocabulary& vocab,
                                   std::size_t top_k) {
  if (model.n_features != vocab.size())
    throw data_error("model_importance: vocabulary size mismatch");
  std::vector<ImportanceEntry> scored;
  scored.reserve(vocab.size());
  for (std::uint32_t t = 0; t < vocab.size(); ++t)
    if (model.feature_importance[t] > 0.0)
      scored.push_back({vocab.terms[t], model.feature_importance[t]});
  return ranked("model:random_forest", std::move(scored), top_k);
}

}  // namespace leakaudit
