#include "leakaudit/config.hpp"

#include <fstream>

#include "leakaudit/errors.hpp"

namespace leakaudit {

namespace {

void check_keys(const nlohmann::json& j, const char* context,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object())
    throw config_error(std::string(context) + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (key == a) known = true;
    if (!known)
      throw config_error(std::string(context) + ": unknown key '" + key + "'");
  }
}

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw config_error(std::string("config key '") + key + "' has wrong type");
  }
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig c;
  check_keys(j, "config",
             {"data", "filter", "sample", "split", "seeds", "features",
              "classifiers", "transform", "sentiment", "stats", "report",
              "output_dir"});

  if (auto it = j.find("data"); it != j.end()) {
    check_keys(*it, "data", {"csv", "columns"});
    c.data.csv = get_or<std::string>(*it, "csv", "");
    if (auto cols = it->find("columns"); cols != it->end()) {
      check_keys(*cols, "data.columns", {"text", "group", "id", "meta"});
      c.data.schema.text_column =
          get_or<std::string>(*cols, "text", c.data.schema.text_column);
      c.data.schema.group_column =
          get_or<std::string>(*cols, "group", c.data.schema.group_column);
      c.data.schema.id_column = get_or<std::string>(*cols, "id", "");
      if (auto meta = cols->find("meta"); meta != cols->end()) {
        if (!meta->is_object())
          throw config_error("data.columns.meta: expected an object");
        c.data.schema.meta_columns.clear();
        for (const auto& [key, col] : meta->items())
          c.data.schema.meta_columns[key] = col.get<std::string>();
      }
    }
  }

  if (auto it = j.find("filter"); it != j.end()) {
    check_keys(*it, "filter", {"group_a", "group_b", "meta_key", "meta_value"});
    c.filter.group_a = get_or<std::string>(*it, "group_a", c.filter.group_a);
    c.filter.group_b = get_or<std::string>(*it, "group_b", c.filter.group_b);
    c.filter.meta_key = get_or<std::string>(*it, "meta_key", c.filter.meta_key);
    c.filter.meta_value =
        get_or<std::string>(*it, "meta_value", c.filter.meta_value);
  }

  if (auto it = j.find("sample"); it != j.end()) {
    check_keys(*it, "sample", {"per_group", "seed"});
    c.sample.per_group = get_or<std::size_t>(*it, "per_group", c.sample.per_group);
    c.sample.seed = get_or<std::uint64_t>(*it, "seed", c.sample.seed);
  }

  if (auto it = j.find("split"); it != j.end()) {
    check_keys(*it, "split", {"test_fraction", "stratified"});
    c.split.test_fraction =
        get_or<double>(*it, "test_fraction", c.split.test_fraction);
    c.split.stratified = get_or<bool>(*it, "stratified", c.split.stratified);
    if (!(c.split.test_fraction > 0.0 && c.split.test_fraction < 1.0))
      throw config_error("split.test_fraction must lie in (0,1)");
  }

  if (auto it = j.find("seeds"); it != j.end()) {
    c.seeds = it->get<std::vector<std::uint64_t>>();
    if (c.seeds.empty()) throw config_error("seeds: need at least one");
  }

  if (auto it = j.find("features"); it != j.end()) {
    check_keys(*it, "features", {"min_df", "remove_stopwords", "min_token_len"});
    c.features.min_df = get_or<std::uint32_t>(*it, "min_df", c.features.min_df);
    c.features.remove_stopwords =
        get_or<bool>(*it, "remove_stopwords", c.features.remove_stopwords);
    c.features.min_token_len =
        get_or<std::size_t>(*it, "min_token_len", c.features.min_token_len);
  }

  if (auto it = j.find("classifiers"); it != j.end()) {
    check_keys(*it, "classifiers",
               {"grid_search", "cv_folds", "metric", "nb", "rf"});
    c.classifiers.grid_search =
        get_or<bool>(*it, "grid_search", c.classifiers.grid_search);
    c.classifiers.cv_folds = get_or<int>(*it, "cv_folds", c.classifiers.cv_folds);
    std::string metric = get_or<std::string>(*it, "metric", "accuracy");
    if (metric == "accuracy") c.classifiers.metric = GridSpec::Metric::accuracy;
    else if (metric == "f1") c.classifiers.metric = GridSpec::Metric::f1;
    else throw config_error("classifiers.metric must be 'accuracy' or 'f1'");
    if (auto nb = it->find("nb"); nb != it->end()) {
      check_keys(*nb, "classifiers.nb", {"alpha", "alpha_grid"});
      c.classifiers.nb_alpha = get_or<double>(*nb, "alpha", c.classifiers.nb_alpha);
      c.classifiers.nb_alpha_grid = get_or<std::vector<double>>(
          *nb, "alpha_grid", c.classifiers.nb_alpha_grid);
      if (c.classifiers.nb_alpha <= 0.0)
        throw config_error("classifiers.nb.alpha must be positive");
    }
    if (auto rf = it->find("rf"); rf != it->end()) {
      check_keys(*rf, "classifiers.rf",
                 {"n_trees", "max_depth", "features_per_split", "n_trees_grid",
                  "max_depth_grid"});
      c.classifiers.rf.n_trees =
          get_or<int>(*rf, "n_trees", c.classifiers.rf.n_trees);
      c.classifiers.rf.max_depth =
          get_or<int>(*rf, "max_depth", c.classifiers.rf.max_depth);
      c.classifiers.rf.features_per_split =
          get_or<int>(*rf, "features_per_split",
                      c.classifiers.rf.features_per_split);
      c.classifiers.rf_n_trees_grid = get_or<std::vector<double>>(
          *rf, "n_trees_grid", c.classifiers.rf_n_trees_grid);
      c.classifiers.rf_max_depth_grid = get_or<std::vector<double>>(
          *rf, "max_depth_grid", c.classifiers.rf_max_depth_grid);
    }
  }

  if (auto it = j.find("transform"); it != j.end()) {
    check_keys(*it, "transform",
               {"backend", "template", "template_name", "rules_file",
                "lookup_file", "cache", "offline", "parallelism", "http"});
    c.transform.backend = get_or<std::string>(*it, "backend", c.transform.backend);
    if (c.transform.backend != "identity" && c.transform.backend != "rules" &&
        c.transform.backend != "lookup" && c.transform.backend != "http")
      throw config_error("transform.backend must be identity|rules|lookup|http");
    c.transform.template_text =
        get_or<std::string>(*it, "template", c.transform.template_text);
    c.transform.template_name =
        get_or<std::string>(*it, "template_name", c.transform.template_name);
    c.transform.rules_file = get_or<std::string>(*it, "rules_file", "");
    c.transform.lookup_file = get_or<std::string>(*it, "lookup_file", "");
    c.transform.cache = get_or<std::string>(*it, "cache", "");
    c.transform.offline = get_or<bool>(*it, "offline", c.transform.offline);
    c.transform.parallelism =
        get_or<int>(*it, "parallelism", c.transform.parallelism);
    if (auto http = it->find("http"); http != it->end()) {
      check_keys(*http, "transform.http",
                 {"endpoint", "model", "temperature", "max_retries",
                  "backoff_base_s", "rate_limit_per_min", "credential_env",
                  "timeout_s"});
      BackendConfig& b = c.transform.http;
      b.endpoint = get_or<std::string>(*http, "endpoint", b.endpoint);
      b.model = get_or<std::string>(*http, "model", b.model);
      b.temperature = get_or<double>(*http, "temperature", b.temperature);
      b.max_retries = get_or<int>(*http, "max_retries", b.max_retries);
      b.backoff_base_s = get_or<double>(*http, "backoff_base_s", b.backoff_base_s);
      b.rate_limit_per_min =
          get_or<double>(*http, "rate_limit_per_min", b.rate_limit_per_min);
      b.credential_env =
          get_or<std::string>(*http, "credential_env", b.credential_env);
      b.timeout_s = get_or<int>(*http, "timeout_s", b.timeout_s);
      if (b.temperature < 0.0)
        throw config_error("transform.http.temperature must be >= 0");
      if (b.rate_limit_per_min <= 0.0)
        throw config_error("transform.http.rate_limit_per_min must be > 0");
      if (b.max_retries < 0)
        throw config_error("transform.http.max_retries must be >= 0");
    }
  }

  if (auto it = j.find("sentiment"); it != j.end()) {
    check_keys(*it, "sentiment",
               {"tau", "min_agreement", "max_flip_rate", "lexicon_file",
                "enforce"});
    c.sentiment.tau = get_or<double>(*it, "tau", c.sentiment.tau);
    c.sentiment.min_agreement =
        get_or<double>(*it, "min_agreement", c.sentiment.min_agreement);
    c.sentiment.max_flip_rate =
        get_or<double>(*it, "max_flip_rate", c.sentiment.max_flip_rate);
    c.sentiment.lexicon_file = get_or<std::string>(*it, "lexicon_file", "");
    c.sentiment.enforce = get_or<bool>(*it, "enforce", c.sentiment.enforce);
  }

  if (auto it = j.find("stats"); it != j.end()) {
    check_keys(*it, "stats", {"significance", "exact_below"});
    c.stats.significance =
        get_or<double>(*it, "significance", c.stats.significance);
    c.stats.exact_below =
        get_or<std::size_t>(*it, "exact_below", c.stats.exact_below);
  }

  if (auto it = j.find("report"); it != j.end()) {
    check_keys(*it, "report", {"top_k", "run_id"});
    c.report.top_k = get_or<std::size_t>(*it, "top_k", c.report.top_k);
    c.report.run_id = get_or<std::string>(*it, "run_id", "");
  }

  c.output_dir = get_or<std::string>(j, "output_dir", c.output_dir);
  return c;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded())
    throw config_error("config file is not valid JSON: " + path);
  return from_json(j);
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json meta = nlohmann::json::object();
  for (const auto& [key, col] : data.schema.meta_columns) meta[key] = col;
  return {
      {"data",
       {{"csv", data.csv},
        {"columns",
         {{"text", data.schema.text_column},
          {"group", data.schema.group_column},
          {"id", data.schema.id_column},
          {"meta", meta}}}}},
      {"filter",
       {{"group_a", filter.group_a},
        {"group_b", filter.group_b},
        {"meta_key", filter.meta_key},
        {"meta_value", filter.meta_value}}},
      {"sample", {{"per_group", sample.per_group}, {"seed", sample.seed}}},
      {"split",
       {{"test_fraction", split.test_fraction},
        {"stratified", split.stratified}}},
      {"seeds", seeds},
      {"features",
       {{"min_df", features.min_df},
        {"remove_stopwords", features.remove_stopwords},
        {"min_token_len", features.min_token_len}}},
      {"classifiers",
       {{"grid_search", classifiers.grid_search},
        {"cv_folds", classifiers.cv_folds},
        {"metric",
         classifiers.metric == GridSpec::Metric::accuracy ? "accuracy" : "f1"},
        {"nb",
         {{"alpha", classifiers.nb_alpha},
          {"alpha_grid", classifiers.nb_alpha_grid}}},
        {"rf",
         {{"n_trees", classifiers.rf.n_trees},
          {"max_depth", classifiers.rf.max_depth},
          {"features_per_split", classifiers.rf.features_per_split},
          {"n_trees_grid", classifiers.rf_n_trees_grid},
          {"max_depth_grid", classifiers.rf_max_depth_grid}}}}},
      {"transform",
       {{"backend", transform.backend},
        {"template", transform.template_text},
        {"template_name", transform.template_name},
        {"rules_file", transform.rules_file},
        {"lookup_file", transform.lookup_file},
        {"cache", transform.cache},
        {"offline", transform.offline},
        {"parallelism", transform.parallelism},
        {"http",
         {{"endpoint", transform.http.endpoint},
          {"model", transform.http.model},
          {"temperature", transform.http.temperature},
          {"max_retries", transform.http.max_retries},
          {"backoff_base_s", transform.http.backoff_base_s},
          {"rate_limit_per_min", transform.http.rate_limit_per_min},
          {"credential_env", transform.http.credential_env},
          {"timeout_s", transform.http.timeout_s}}}}},
      {"sentiment",
       {{"tau", sentiment.tau},
        {"min_agreement", sentiment.min_agreement},
        {"max_flip_rate", sentiment.max_flip_rate},
        {"lexicon_file", sentiment.lexicon_file},
        {"enforce", sentiment.enforce}}},
      {"stats",
       {{"significance", stats.significance},
        {"exact_below", stats.exact_below}}},
      {"report", {{"top_k", report.top_k}, {"run_id", report.run_id}}},
      {"output_dir", output_dir}};
}

std::string RunConfig::hash() const { return hex64(fnv1a64(to_json().dump())); }

TokenizerOptions RunConfig::tokenizer_options() const {
  TokenizerOptions opts;
  opts.remove_stopwords = features.remove_stopwords;
  opts.min_token_len = features.min_token_len;
  return opts;
}

}  // namespace leakaudit
