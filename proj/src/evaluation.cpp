#include "leakaudit/evaluation.hpp"

#include <cstdio>

#include "leakaudit/errors.hpp"

namespace leakaudit {

namespace {

template <class Predict>
EvalReport evaluate_with(Predict&& predict, const FeatureMatrix& test,
                         const std::vector<Group>& labels) {
  if (test.rows.empty()) throw data_error("evaluate: empty test set");
  if (test.rows.size() != labels.size())
    throw data_error("evaluate: row/label count mismatch");

  EvalReport r;
  r.correctness.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    Group pred = predict(test.rows[i]);
    bool actual_pos = labels[i] == Group::A;
    bool pred_pos = pred == Group::A;
    if (pred_pos && actual_pos) ++r.tp;
    else if (pred_pos && !actual_pos) ++r.fp;
    else if (!pred_pos && !actual_pos) ++r.tn;
    else ++r.fn;
    r.correctness.push_back(pred == labels[i] ? 1 : 0);
  }
  double total = static_cast<double>(r.tp + r.fp + r.tn + r.fn);
  r.accuracy = static_cast<double>(r.tp + r.tn) / total;
  r.precision = r.tp + r.fp ? static_cast<double>(r.tp) / (r.tp + r.fp) : 0.0;
  r.recall = r.tp + r.fn ? static_cast<double>(r.tp) / (r.tp + r.fn) : 0.0;
  r.f1 = r.precision + r.recall > 0.0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  return r;
}

}  // namespace

EvalReport evaluate(const NBModel& model, const FeatureMatrix& test,
                    const std::vector<Group>& labels) {
  return evaluate_with(
      [&](const SparseRow& row) { return model.predict(row).first; }, test,
      labels);
}

EvalReport evaluate(const RFModel& model, const FeatureMatrix& test,
                    const std::vector<Group>& labels) {
  return evaluate_with(
      [&](const SparseRow& row) { return rf_predict(model, row).first; }, test,
      labels);
}

nlohmann::json EvalReport::to_json() const {
  std::string bits(correctness.size(), '0');
  for (std::size_t i = 0; i < correctness.size(); ++i)
    if (correctness[i]) bits[i] = '1';
  return {{"accuracy", accuracy}, {"f1", f1},
          {"precision", precision}, {"recall", recall},
          {"tp", tp}, {"fp", fp}, {"tn", tn}, {"fn", fn},
          {"correctness", bits}};
}

EvalReport EvalReport::from_json(const nlohmann::json& j) {
  EvalReport r;
  r.accuracy = j.at("accuracy").get<double>();
  r.f1 = j.at("f1").get<double>();
  r.precision = j.at("precision").get<double>();
  r.recall = j.at("recall").get<double>();
  r.tp = j.at("tp").get<std::size_t>();
  r.fp = j.at("fp").get<std::size_t>();
  r.tn = j.at("tn").get<std::size_t>();
  r.fn = j.at("fn").get<std::size_t>();
  for (char c : j.at("correctness").get<std::string>())
    r.correctness.push_back(c == '1' ? 1 : 0);
  return r;
}

std::string metrics_markdown_cells(const EvalReport& r) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f | %.2f | %.2f | %.2f", r.accuracy, r.f1,
                r.precision, r.recall);
  return buf;
}

}  // namespace leakaudit
