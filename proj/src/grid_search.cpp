#include "leakaudit/grid_search.hpp"

#include <algorithm>

#include "leakaudit/errors.hpp"
#include "leakaudit/naive_bayes.hpp"
#include "leakaudit/random_forest.hpp"
#include "leakaudit/rng.hpp"

namespace leakaudit {

std::vector<ParamSet> GridSpec::points() const {
  if (axes.empty()) throw config_error("grid_search: empty grid");
  std::vector<ParamSet> points{{}};
  for (const auto& [name, values] : axes) {
    if (values.empty())
      throw config_error("grid_search: axis '" + name + "' has no values");
    std::vector<ParamSet> next;
    next.reserve(points.size() * values.size());
    for (const ParamSet& base : points)
      for (double v : values) {
        ParamSet p = base;
        p[name] = v;
        next.push_back(std::move(p));
      }
    points = std::move(next);
  }
  return points;
}

std::vector<int> stratified_folds(const std::vector<Group>& labels, int k,
                                  std::uint64_t seed) {
  if (k < 2) throw config_error("grid_search: cv_folds must be >= 2");
  if (static_cast<std::size_t>(k) > labels.size())
    throw config_error("grid_search: more folds than documents");

  std::vector<int> fold(labels.size(), -1);
  for (int g = 0; g < 2; ++g) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (static_cast<int>(labels[i]) == g) idx.push_back(i);
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(g)));
    rng.shuffle(idx);
    for (std::size_t pos = 0; pos < idx.size(); ++pos)
      fold[idx[pos]] = static_cast<int>(pos % static_cast<std::size_t>(k));
  }
  return fold;
}

namespace {

FeatureMatrix select_rows(const FeatureMatrix& data,
                          const std::vector<std::size_t>& rows) {
  FeatureMatrix out;
  out.n_docs = rows.size();
  out.vocab = data.vocab;
  out.weighting = data.weighting;
  out.rows.reserve(rows.size());
  for (std::size_t r : rows) out.rows.push_back(data.rows[r]);
  return out;
}

RFParams rf_params_from(const ParamSet& p) {
  RFParams params;
  if (auto it = p.find("n_trees"); it != p.end())
    params.n_trees = static_cast<int>(it->second);
  if (auto it = p.find("max_depth"); it != p.end())
    params.max_depth = static_cast<int>(it->second);
  if (auto it = p.find("features_per_split"); it != p.end())
    params.features_per_split = static_cast<int>(it->second);
  return params;
}

double fit_and_score(const FeatureMatrix& data, const std::vector<Group>& labels,
                     ModelKind kind, const ParamSet& params,
                     const std::vector<std::size_t>& train_rows,
                     const std::vector<std::size_t>& eval_rows,
                     GridSpec::Metric metric, std::uint64_t fit_seed) {
  FeatureMatrix train = select_rows(data, train_rows);
  FeatureMatrix eval = select_rows(data, eval_rows);
  std::vector<Group> train_labels, eval_labels;
  for (std::size_t r : train_rows) train_labels.push_back(labels[r]);
  for (std::size_t r : eval_rows) eval_labels.push_back(labels[r]);

  EvalReport report;
  if (kind == ModelKind::naive_bayes) {
    double alpha = 1.0;
    if (auto it = params.find("alpha"); it != params.end()) alpha = it->second;
    report = evaluate(nb_fit(train, train_labels, alpha), eval, eval_labels);
  } else {
    // trees are built serially here; the grid loop itself is the parallel axis
    report = evaluate(
        reference::rf_fit(train, train_labels, rf_params_from(params), fit_seed),
        eval, eval_labels);
  }
  return metric == GridSpec::Metric::accuracy ? report.accuracy : report.f1;
}

}  // namespace

GridResult grid_search(const FeatureMatrix& data,
                       const std::vector<Group>& labels, ModelKind kind,
                       const GridSpec& grid) {
  if (data.rows.size() != labels.size())
    throw data_error("grid_search: row/label count mismatch");
  std::vector<ParamSet> points = grid.points();
  std::vector<int> fold = stratified_folds(labels, grid.cv_folds, grid.seed);

  std::vector<std::vector<std::size_t>> fold_rows(grid.cv_folds);
  for (std::size_t i = 0; i < fold.size(); ++i) fold_rows[fold[i]].push_back(i);
  std::vector<std::vector<std::size_t>> train_rows(grid.cv_folds);
  for (int f = 0; f < grid.cv_folds; ++f)
    for (std::size_t i = 0; i < fold.size(); ++i)
      if (fold[i] != f) train_rows[f].push_back(i);

  const std::size_t n_units = points.size() * grid.cv_folds;
  std::vector<double> scores(n_units, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (long u = 0; u < static_cast<long>(n_units); ++u) {
    std::size_t point = static_cast<std::size_t>(u) / grid.cv_folds;
    int f = static_cast<int>(static_cast<std::size_t>(u) % grid.cv_folds);
    scores[u] = fit_and_score(data, labels, kind, points[point], train_rows[f],
                              fold_rows[f], grid.metric,
                              mix_seed(grid.seed, static_cast<std::uint64_t>(u)));
  }

  GridResult result;
  for (std::size_t p = 0; p < points.size(); ++p) {
    CvCell cell;
    cell.params = points[p];
    double sum = 0.0;
    for (int f = 0; f < grid.cv_folds; ++f) {
      double s = scores[p * grid.cv_folds + f];
      cell.fold_scores.push_back(s);
      sum += s;
    }
    cell.mean_score = sum / grid.cv_folds;
    result.table.push_back(std::move(cell));
  }
  // strict > keeps the earliest point on ties
  std::size_t best = 0;
  for (std::size_t p = 1; p < result.table.size(); ++p)
    if (result.table[p].mean_score > result.table[best].mean_score) best = p;
  result.best = result.table[best].params;
  result.best_score = result.table[best].mean_score;
  return result;
}

nlohmann::json GridResult::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const CvCell& cell : table)
    rows.push_back({{"params", cell.params},
                    {"fold_scores", cell.fold_scores},
                    {"mean_score", cell.mean_score}});
  return {{"best", best}, {"best_score", best_score}, {"table", rows}};
}

}  // namespace leakaudit
