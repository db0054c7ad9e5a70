#include "leakaudit/runner.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "leakaudit/csv.hpp"
#include "leakaudit/errors.hpp"
#include "leakaudit/grid_search.hpp"
#include "leakaudit/importance.hpp"
#include "leakaudit/naive_bayes.hpp"

namespace leakaudit {

std::unique_ptr<Backend> make_backend(const RunConfig& config) {
  const auto& t = config.transform;
  if (t.backend == "identity") return make_identity_backend();
  if (t.backend == "rules") {
    if (t.rules_file.empty()) return make_rules_backend(RewriteRules::builtin());
    return make_rules_backend(RewriteRules::from_file(t.rules_file));
  }
  if (t.backend == "lookup") {
    if (t.lookup_file.empty())
      throw config_error("transform.lookup_file required for lookup backend");
    return make_lookup_backend(t.lookup_file, "supplementary");
  }
  if (t.backend == "http") {
    if (t.offline)
      return nullptr;  // caller must prove the cache is warm first
    return make_http_backend(t.http);
  }
  throw config_error("unknown transform backend: " + t.backend);
}

const SentimentLexicon& lexicon_for(const RunConfig& config,
                                    SentimentLexicon& storage) {
  if (config.sentiment.lexicon_file.empty())
    return SentimentLexicon::builtin();
  storage = SentimentLexicon::from_file(config.sentiment.lexicon_file);
  return storage;
}

namespace {

// With --offline and a remote backend, every document must already be
// cached; otherwise report the uncached ids instead of going online.
void ensure_cached_or_offline(const Corpus& corpus, const RunConfig& config,
                              const TransformCache& cache) {
  if (!config.transform.offline || config.transform.backend != "http") return;
  PromptTemplate tmpl = PromptTemplate::make(config.transform.template_name,
                                             config.transform.template_text);
  std::vector<std::string> missing;
  for (const Document& d : corpus.docs()) {
    std::string h = request_hash("http", config.transform.http.model,
                                 render(tmpl, d.text));
    if (!cache.lookup(h)) missing.push_back(d.id);
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i)
      list += (i ? ", " : "") + missing[i];
    if (missing.size() > 20)
      list += ", ... (" + std::to_string(missing.size()) + " total)";
    throw backend_error("offline mode but cache misses for doc ids: " + list);
  }
}

struct AlignedPair {
  Corpus original;
  Corpus simplified;
  TransformOutcome outcome;
};

// Transform the sample and drop flagged documents from both sides so the
// corpora stay aligned by position and id.
AlignedPair transform_sample(const Corpus& sample, const RunConfig& config,
                             TransformCache& cache) {
  ensure_cached_or_offline(sample, config, cache);
  std::unique_ptr<Backend> backend = make_backend(config);
  if (!backend)
    throw backend_error("offline mode: no backend available");
  PromptTemplate tmpl = PromptTemplate::make(config.transform.template_name,
                                             config.transform.template_text);
  TransformOutcome outcome = transform_corpus(
      sample, *backend, tmpl, cache, config.transform.parallelism);

  AlignedPair pair{sample, Corpus{}, {}};
  if (!outcome.flagged_ids.empty()) {
    std::cerr << "[leakaudit] warning: " << outcome.flagged_ids.size()
              << " document(s) flagged (empty transform response), excluded\n";
    std::unordered_set<std::string> flagged(outcome.flagged_ids.begin(),
                                            outcome.flagged_ids.end());
    std::vector<Document> kept;
    for (const Document& d : sample.docs())
      if (!flagged.count(d.id)) kept.push_back(d);
    pair.original = Corpus::from_documents(std::move(kept), sample.provenance(),
                                           sample.groups());
  }
  pair.simplified = std::move(outcome.transformed);
  pair.outcome = std::move(outcome);
  return pair;
}

// Splits `corpus` at id level, then projects the same id partition onto
// `other` (both corpora share ids and order).
struct PairedSplit {
  Corpus train_a, test_a, train_b, test_b;
};

PairedSplit paired_split(const Corpus& a, const Corpus& b, const SplitSpec& spec) {
  auto [train_a, test_a] = split(a, spec);
  std::unordered_set<std::string> test_ids;
  for (const Document& d : test_a.docs()) test_ids.insert(d.id);

  std::vector<Document> train_docs, test_docs;
  for (const Document& d : b.docs())
    (test_ids.count(d.id) ? test_docs : train_docs).push_back(d);
  Corpus train_b = Corpus::from_documents(std::move(train_docs),
                                          b.provenance(), b.groups());
  Corpus test_b = Corpus::from_documents(std::move(test_docs), b.provenance(),
                                         b.groups());
  return {std::move(train_a), std::move(test_a), std::move(train_b),
          std::move(test_b)};
}

struct DatasetModels {
  EvalReport nb, rf;
  std::shared_ptr<RFModel> rf_model;
  std::shared_ptr<Vocabulary> vocab;
};

DatasetModels fit_dataset(const Corpus& train, const Corpus& test,
                          std::uint64_t seed, std::uint64_t salt,
                          const RunConfig& config, bool keep_models) {
  TokenizerOptions tok = config.tokenizer_options();
  auto vocab = std::make_shared<Vocabulary>(
      build_vocab(train, config.features.min_df, tok));

  FeatureMatrix counts_train = vectorize(train, vocab, Weighting::counts, tok);
  FeatureMatrix counts_test = vectorize(test, vocab, Weighting::counts, tok);
  FeatureMatrix tfidf_train = vectorize(train, vocab, Weighting::tfidf, tok);
  FeatureMatrix tfidf_test = vectorize(test, vocab, Weighting::tfidf, tok);
  std::vector<Group> train_labels = labels_of(train);
  std::vector<Group> test_labels = labels_of(test);

  double alpha = config.classifiers.nb_alpha;
  RFParams rf_params = config.classifiers.rf;
  if (config.classifiers.grid_search) {
    GridSpec nb_grid;
    nb_grid.axes = {{"alpha", config.classifiers.nb_alpha_grid}};
    nb_grid.metric = config.classifiers.metric;
    nb_grid.cv_folds = config.classifiers.cv_folds;
    nb_grid.seed = mix_seed(seed, salt * 4 + 11);
    alpha = grid_search(counts_train, train_labels, ModelKind::naive_bayes,
                        nb_grid)
                .best.at("alpha");

    GridSpec rf_grid;
    rf_grid.axes = {{"n_trees", config.classifiers.rf_n_trees_grid},
                    {"max_depth", config.classifiers.rf_max_depth_grid}};
    rf_grid.metric = config.classifiers.metric;
    rf_grid.cv_folds = config.classifiers.cv_folds;
    rf_grid.seed = mix_seed(seed, salt * 4 + 13);
    ParamSet best =
        grid_search(tfidf_train, train_labels, ModelKind::random_forest, rf_grid)
            .best;
    rf_params.n_trees = static_cast<int>(best.at("n_trees"));
    rf_params.max_depth = static_cast<int>(best.at("max_depth"));
  }

  DatasetModels out;
  NBModel nb = nb_fit(counts_train, train_labels, alpha);
  out.nb = evaluate(nb, counts_test, test_labels);
  RFModel rf = rf_fit(tfidf_train, train_labels, rf_params,
                      mix_seed(seed, salt * 4 + 17));
  out.rf = evaluate(rf, tfidf_test, test_labels);
  if (keep_models) {
    out.rf_model = std::make_shared<RFModel>(std::move(rf));
    out.vocab = vocab;
  }
  return out;
}

McNemarResult paired_mcnemar(const std::vector<std::uint8_t>& c1,
                             const std::vector<std::uint8_t>& c2,
                             const RunConfig& config) {
  McNemarResult chi = mcnemar(c1, c2, true);
  if (config.stats.exact_below > 0 && chi.b + chi.c < config.stats.exact_below)
    return mcnemar_exact(c1, c2, true);
  return chi;
}

}  // namespace

SeedOutcome run_seed(const Corpus& original, const Corpus& simplified,
                     std::uint64_t seed, const RunConfig& config,
                     bool keep_models) {
  SplitSpec spec = config.split;
  spec.seed = seed;
  PairedSplit s = paired_split(original, simplified, spec);

  // pairing sanity: the two test sets must list the same ids in order
  for (std::size_t i = 0; i < s.test_a.size(); ++i)
    if (s.test_a.docs()[i].id != s.test_b.docs()[i].id)
      throw data_error("paired split misaligned at position " +
                       std::to_string(i));

  DatasetModels orig =
      fit_dataset(s.train_a, s.test_a, seed, 0, config, keep_models);
  DatasetModels simp =
      fit_dataset(s.train_b, s.test_b, seed, 1, config, keep_models);

  SeedOutcome out;
  out.nb_original = std::move(orig.nb);
  out.rf_original = std::move(orig.rf);
  out.nb_simplified = std::move(simp.nb);
  out.rf_simplified = std::move(simp.rf);
  out.nb_mcnemar = paired_mcnemar(out.nb_original.correctness,
                                  out.nb_simplified.correctness, config);
  out.rf_mcnemar = paired_mcnemar(out.rf_original.correctness,
                                  out.rf_simplified.correctness, config);
  out.rf_model_original = orig.rf_model;
  out.rf_model_simplified = simp.rf_model;
  out.vocab_original = orig.vocab;
  out.vocab_simplified = simp.vocab;
  return out;
}

Corpus load_sample(const RunConfig& config) {
  if (config.data.csv.empty())
    throw config_error("data.csv is required");
  Corpus raw = ingest_csv(config.data.csv, config.data.schema);
  std::optional<std::pair<std::string, std::string>> meta;
  if (!config.filter.meta_key.empty() && !config.filter.meta_value.empty())
    meta = std::make_pair(config.filter.meta_key, config.filter.meta_value);
  Corpus filtered =
      filter_binary(raw, config.filter.group_a, config.filter.group_b, meta);
  return balanced_sample(filtered, config.sample.per_group, config.sample.seed);
}

AuditReport run_audit(const RunConfig& config) {
  Corpus sample = load_sample(config);

  TransformCache cache(config.transform.cache);
  AlignedPair pair = transform_sample(sample, config, cache);

  SentimentLexicon lexicon_storage;
  const SentimentLexicon& lexicon = lexicon_for(config, lexicon_storage);
  PreservationReport sentiment = preservation(
      pair.original, pair.simplified, lexicon,
      {SentimentEngine::lex_mean, SentimentEngine::lex_shift},
      config.sentiment.tau);
  bool sentiment_ok = sentiment.agreement >= config.sentiment.min_agreement &&
                      sentiment.flip_rate <= config.sentiment.max_flip_rate;
  if (config.sentiment.enforce && !sentiment_ok)
    throw data_error("sentiment preservation thresholds violated (agreement " +
                     std::to_string(sentiment.agreement) + ", flip rate " +
                     std::to_string(sentiment.flip_rate) + ")");

  const std::vector<std::uint64_t>& seeds = config.seeds;
  std::vector<SeedOutcome> outcomes(seeds.size());
  std::vector<std::string> failures(seeds.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(seeds.size()); ++i) {
    try {
      outcomes[i] = run_seed(pair.original, pair.simplified, seeds[i], config,
                             i == 0);
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  }
  for (std::size_t i = 0; i < seeds.size(); ++i)
    if (!failures[i].empty())
      throw data_error("audit seed " + std::to_string(seeds[i]) +
                       " failed: " + failures[i]);

  AuditReport report;
  report.config = config.to_json();
  report.config_hash = config.hash();
  report.provenance = pair.original.provenance().to_json();
  report.n_sample = pair.original.size();
  report.seeds = seeds;

  auto collect = [&](auto member) {
    std::vector<EvalReport> reports;
    for (const SeedOutcome& o : outcomes) reports.push_back(o.*member);
    return summarize_reports(seeds, std::move(reports));
  };
  report.nb_original = collect(&SeedOutcome::nb_original);
  report.rf_original = collect(&SeedOutcome::rf_original);
  report.nb_simplified = collect(&SeedOutcome::nb_simplified);
  report.rf_simplified = collect(&SeedOutcome::rf_simplified);
  report.nb_delta =
      report.nb_original.accuracy.mean - report.nb_simplified.accuracy.mean;
  report.rf_delta =
      report.rf_original.accuracy.mean - report.rf_simplified.accuracy.mean;

  std::size_t nb_sig = 0, rf_sig = 0;
  for (const SeedOutcome& o : outcomes) {
    report.nb_mcnemar.push_back(o.nb_mcnemar);
    report.rf_mcnemar.push_back(o.rf_mcnemar);
    if (o.nb_mcnemar.p_value < config.stats.significance) ++nb_sig;
    if (o.rf_mcnemar.p_value < config.stats.significance) ++rf_sig;
  }
  report.nb_significant_fraction =
      static_cast<double>(nb_sig) / static_cast<double>(seeds.size());
  report.rf_significant_fraction =
      static_cast<double>(rf_sig) / static_cast<double>(seeds.size());
  report.significance = config.stats.significance;

  report.sentiment = sentiment;
  report.sentiment_ok = sentiment_ok;

  // Group importance over the whole sample; model importance from the first
  // seed's trained forests.
  TokenizerOptions tok = config.tokenizer_options();
  auto sample_vocab = std::make_shared<Vocabulary>(
      build_vocab(pair.original, config.features.min_df, tok));
  std::size_t top_k = config.report.top_k;
  report.rankings.push_back(
      group_importance(pair.original, sample_vocab, Group::A, top_k, tok));
  report.rankings.push_back(
      group_importance(pair.original, sample_vocab, Group::B, top_k, tok));
  const SeedOutcome& first = outcomes.front();
  ImportanceRanking rf_orig_rank = model_importance(
      *first.rf_model_original, *first.vocab_original, top_k);
  rf_orig_rank.scope = "model:random_forest:original";
  report.rankings.push_back(std::move(rf_orig_rank));
  ImportanceRanking rf_simp_rank = model_importance(
      *first.rf_model_simplified, *first.vocab_simplified, top_k);
  rf_simp_rank.scope = "model:random_forest:simplified";
  report.rankings.push_back(std::move(rf_simp_rank));

  report.created_at = utc_timestamp();
  report.lexicon_version = lexicon.version;
  std::unique_ptr<Backend> backend_probe = make_backend(config);
  report.backend_id =
      backend_probe ? backend_probe->id() : config.transform.backend;
  report.backend_model =
      backend_probe ? backend_probe->model() : config.transform.http.model;
  report.template_name = config.transform.template_name;
  report.cache_path = config.transform.cache;
  report.cache_entries = cache.size();
  report.flagged_ids = pair.outcome.flagged_ids;
  return report;
}

std::vector<SweepRow> run_sweep(const RunConfig& config,
                                const std::vector<std::size_t>& sizes) {
  if (sizes.empty()) throw config_error("sweep: need at least one size");
  if (config.data.csv.empty()) throw config_error("data.csv is required");
  Corpus raw = ingest_csv(config.data.csv, config.data.schema);
  std::optional<std::pair<std::string, std::string>> meta;
  if (!config.filter.meta_key.empty() && !config.filter.meta_value.empty())
    meta = std::make_pair(config.filter.meta_key, config.filter.meta_value);
  Corpus filtered =
      filter_binary(raw, config.filter.group_a, config.filter.group_b, meta);

  TokenizerOptions tok = config.tokenizer_options();
  std::vector<SweepRow> rows;
  for (std::size_t size : sizes) {
    if (size < 2 || size % 2 != 0)
      throw config_error("sweep sizes must be even and >= 2, got " +
                         std::to_string(size));
    std::vector<double> nb_acc(config.seeds.size()), rf_acc(config.seeds.size());
    std::vector<std::string> failures(config.seeds.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < static_cast<long>(config.seeds.size()); ++i) {
      try {
        std::uint64_t seed = config.seeds[i];
        Corpus sample =
            balanced_sample(filtered, size / 2, mix_seed(seed, size));
        SplitSpec spec = config.split;
        spec.seed = seed;
        auto [train, test] = split(sample, spec);
        auto vocab = std::make_shared<Vocabulary>(
            build_vocab(train, config.features.min_df, tok));
        FeatureMatrix counts_train = vectorize(train, vocab, Weighting::counts, tok);
        FeatureMatrix counts_test = vectorize(test, vocab, Weighting::counts, tok);
        FeatureMatrix tfidf_train = vectorize(train, vocab, Weighting::tfidf, tok);
        FeatureMatrix tfidf_test = vectorize(test, vocab, Weighting::tfidf, tok);
        std::vector<Group> train_labels = labels_of(train);
        std::vector<Group> test_labels = labels_of(test);
        nb_acc[i] =
            evaluate(nb_fit(counts_train, train_labels, config.classifiers.nb_alpha),
                     counts_test, test_labels)
                .accuracy;
        rf_acc[i] = evaluate(rf_fit(tfidf_train, train_labels,
                                    config.classifiers.rf, mix_seed(seed, 17)),
                             tfidf_test, test_labels)
                        .accuracy;
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
    for (std::size_t i = 0; i < config.seeds.size(); ++i)
      if (!failures[i].empty())
        throw data_error("sweep size " + std::to_string(size) + " seed " +
                         std::to_string(config.seeds[i]) +
                         " failed: " + failures[i]);

    auto summarize = [&](const std::vector<double>& acc, const char* model) {
      SweepRow row;
      row.size = size;
      row.model = model;
      row.n_seeds = acc.size();
      double sum = 0.0;
      for (double a : acc) sum += a;
      row.mean_accuracy = sum / static_cast<double>(acc.size());
      if (acc.size() > 1) {
        double ss = 0.0;
        for (double a : acc)
          ss += (a - row.mean_accuracy) * (a - row.mean_accuracy);
        row.std_accuracy = std::sqrt(ss / static_cast<double>(acc.size() - 1));
      }
      return row;
    };
    rows.push_back(summarize(nb_acc, "naive_bayes"));
    rows.push_back(summarize(rf_acc, "random_forest"));
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "size,model,mean_accuracy,std_accuracy,n_seeds\n";
  for (const SweepRow& r : rows)
    out << r.size << ',' << r.model << ',' << r.mean_accuracy << ','
        << r.std_accuracy << ',' << r.n_seeds << '\n';
}

TransformRunStats run_transform(const RunConfig& config) {
  Corpus sample = load_sample(config);
  TransformCache cache(config.transform.cache);
  AlignedPair pair = transform_sample(sample, config, cache);

  TransformRunStats stats;
  stats.total = sample.size();
  stats.cache_hits = pair.outcome.cache_hits;
  stats.backend_calls = pair.outcome.backend_calls;
  stats.flagged = pair.outcome.flagged_ids.size();
  stats.cache_path = config.transform.cache;

  std::filesystem::create_directories(config.output_dir);
  stats.corpus_file = config.output_dir + "/transformed.csv";
  std::ofstream out(stats.corpus_file, std::ios::binary);
  if (!out) throw data_error("cannot write " + stats.corpus_file);
  write_csv_row(out, {"Review_ID", "Simplified_Text", "Reviewer_Location"});
  for (const Document& d : pair.simplified.docs())
    write_csv_row(out, {d.id, d.text, d.group});
  return stats;
}

}  // namespace leakaudit
