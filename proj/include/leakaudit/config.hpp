#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "leakaudit/corpus.hpp"
#include "leakaudit/grid_search.hpp"
#include "leakaudit/random_forest.hpp"
#include "leakaudit/transform.hpp"

namespace leakaudit {

// Run configuration: one structured document, strictly validated (unknown
// keys are rejected), with CLI flags layered on top. Defaults reproduce the
// offline audit on a Disneyland-shaped CSV.
struct RunConfig {
  struct Data {
    std::string csv;
    CsvSchema schema;
  } data;

  struct Filter {
    std::string group_a = "United Kingdom";
    std::string group_b = "United States";
    // meta key -> required value; empty disables the filter
    std::string meta_key = "branch";
    std::string meta_value = "Disneyland_HongKong";
  } filter;

  struct Sample {
    std::size_t per_group = 150;
    std::uint64_t seed = 42;
  } sample;

  SplitSpec split;  // seed field unused; per-run seeds come from `seeds`

  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};

  struct Features {
    std::uint32_t min_df = 2;
    bool remove_stopwords = true;
    std::size_t min_token_len = 2;
  } features;

  struct Classifiers {
    bool grid_search = false;
    int cv_folds = 5;
    GridSpec::Metric metric = GridSpec::Metric::accuracy;
    double nb_alpha = 1.0;
    std::vector<double> nb_alpha_grid = {0.1, 0.5, 1.0, 2.0};
    RFParams rf;
    std::vector<double> rf_n_trees_grid = {100, 300};
    std::vector<double> rf_max_depth_grid = {8, 16, -1};
  } classifiers;

  struct Transform {
    std::string backend = "rules";  // identity | rules | lookup | http
    std::string template_text = "Simplify \"{text}\"";
    std::string template_name = "simplify-v1";
    std::string rules_file;   // empty: builtin table
    std::string lookup_file;  // required for backend=lookup
    std::string cache;        // empty: in-memory only
    bool offline = false;
    int parallelism = 4;
    BackendConfig http;
  } transform;

  struct Sentiment {
    double tau = 0.05;
    double min_agreement = 0.85;
    double max_flip_rate = 0.05;
    std::string lexicon_file;  // empty: builtin
    bool enforce = false;      // fail the run when thresholds break
  } sentiment;

  struct Stats {
    double significance = 0.05;
    // use the exact mid-p variant when b+c falls below this (0 disables)
    std::size_t exact_below = 0;
  } stats;

  struct Report {
    std::size_t top_k = 20;
    std::string run_id;  // empty: timestamp-derived directory name
  } report;

  std::string output_dir = "runs";

  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig from_file(const std::string& path);
  nlohmann::json to_json() const;  // normalized (defaults filled in)
  std::string hash() const;

  TokenizerOptions tokenizer_options() const;
};

}  // namespace leakaudit
