#pragma once

#include "leakaudit/features.hpp"
#include "leakaudit/naive_bayes.hpp"
#include "leakaudit/random_forest.hpp"

namespace leakaudit {

// NB: terms ranked by |log P(t|A) - log P(t|B)|. Priors never enter, so the
// ranking is invariant to rescaling them.
ImportanceRanking model_importance(const NBModel& model, const Vocabulary& vocab,
                                   std::size_t top_k);

// RF: mean Gini impurity decrease per term across trees.
ImportanceRanking model_importance(const RFModel& model, const Vocabulary& vocab,
                                   std::size_t top_k);

}  // namespace leakaudit
