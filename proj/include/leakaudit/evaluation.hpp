#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "leakaudit/corpus.hpp"
#include "leakaudit/features.hpp"
#include "leakaudit/naive_bayes.hpp"
#include "leakaudit/random_forest.hpp"

namespace leakaudit {

// Classification metrics plus the per-document correctness vector needed for
// McNemar pairing. The positive class for precision/recall is group A.
struct EvalReport {
  double accuracy = 0.0;
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::vector<std::uint8_t> correctness;  // test order

  nlohmann::json to_json() const;
  static EvalReport from_json(const nlohmann::json& j);
};

EvalReport evaluate(const NBModel& model, const FeatureMatrix& test,
                    const std::vector<Group>& labels);
EvalReport evaluate(const RFModel& model, const FeatureMatrix& test,
                    const std::vector<Group>& labels);

// Markdown row fragment: accuracy/f1/precision/recall to 2 decimals.
std::string metrics_markdown_cells(const EvalReport& r);

}  // namespace leakaudit
