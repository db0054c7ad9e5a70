#pragma once

#include <memory>
#include <string>
#include <vector>

#include "leakaudit/config.hpp"
#include "leakaudit/report.hpp"
#include "leakaudit/stats.hpp"

namespace leakaudit {

// Builds the configured transform backend. Honors transform.offline: a
// remote backend combined with --offline is rejected up front when uncached
// documents exist (ensure_cached_or_offline).
std::unique_ptr<Backend> make_backend(const RunConfig& config);

const SentimentLexicon& lexicon_for(const RunConfig& config,
                                    SentimentLexicon& storage);

struct SeedOutcome {
  EvalReport nb_original, rf_original, nb_simplified, rf_simplified;
  McNemarResult nb_mcnemar, rf_mcnemar;
  // populated only when keep_models is set (importance rankings)
  std::shared_ptr<RFModel> rf_model_original, rf_model_simplified;
  std::shared_ptr<Vocabulary> vocab_original, vocab_simplified;
};

// One seed of the paired pipeline: a single id-level split reused for both
// corpora (transformation preserves ids), per-dataset vocabulary and
// features, optional grid search, fit, evaluate, McNemar between the
// original-data and simplified-data model of each kind.
SeedOutcome run_seed(const Corpus& original, const Corpus& simplified,
                     std::uint64_t seed, const RunConfig& config,
                     bool keep_models = false);

// ingest -> filter -> balanced sample, shared by the commands.
Corpus load_sample(const RunConfig& config);

// The full audit workflow; writes nothing (see write_run_artifacts).
AuditReport run_audit(const RunConfig& config);

struct SweepRow {
  std::size_t size;  // total balanced sample size
  std::string model;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  std::size_t n_seeds = 0;
};

// Sample-size sweep over original text with default hyperparameters.
std::vector<SweepRow> run_sweep(const RunConfig& config,
                                const std::vector<std::size_t>& sizes);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

struct TransformRunStats {
  std::size_t total = 0;
  std::size_t cache_hits = 0;
  std::size_t backend_calls = 0;
  std::size_t flagged = 0;
  std::string cache_path;
  std::string corpus_file;
};

// Populates the cache and writes the transformed corpus CSV; resumable.
TransformRunStats run_transform(const RunConfig& config);

}  // namespace leakaudit
