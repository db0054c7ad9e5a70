#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "leakaudit/corpus.hpp"
#include "leakaudit/text.hpp"

namespace leakaudit {

// Term dictionary with build-time document frequencies. Index order is
// descending df, ties lexicographic, so vocabularies are deterministic.
struct Vocabulary {
  std::vector<std::string> terms;               // index -> term
  std::vector<std::uint32_t> df;                // per index
  std::unordered_map<std::string, std::uint32_t> index;
  std::size_t n_docs = 0;                       // corpus size at build time

  std::size_t size() const { return terms.size(); }
  // idf(t) = ln((1+N)/(1+df(t))) + 1; the +1 smoothing keeps idf positive
  // and defined for every retained term.
  double idf(std::uint32_t term_index) const;
};

Vocabulary build_vocab(const Corpus& corpus, std::uint32_t min_df,
                       const TokenizerOptions& tok = {});

enum class Weighting { counts, tfidf, fair_tfidf };

using SparseRow = std::vector<std::pair<std::uint32_t, double>>;  // index asc

struct FeatureMatrix {
  std::size_t n_docs = 0;
  std::shared_ptr<const Vocabulary> vocab;
  std::vector<SparseRow> rows;  // row order matches source corpus order
  Weighting weighting = Weighting::counts;

  double at(std::size_t row, std::uint32_t term_index) const;
  // Documented sparse triplet export: doc_id,term_index,weight per line.
  void save_triplets(std::ostream& out,
                     const std::vector<std::string>& doc_ids) const;
};

// counts: raw term counts. tfidf: tf * idf, then per-document L2
// normalization. Out-of-vocabulary tokens are ignored. The OpenMP path
// fills rows independently per document; reference::vectorize is the serial
// kernel kept for testing.
FeatureMatrix vectorize(const Corpus& corpus,
                        std::shared_ptr<const Vocabulary> vocab,
                        Weighting weighting, const TokenizerOptions& tok = {});

namespace reference {
FeatureMatrix vectorize(const Corpus& corpus,
                        std::shared_ptr<const Vocabulary> vocab,
                        Weighting weighting, const TokenizerOptions& tok = {});
}

struct ImportanceEntry {
  std::string term;
  double score;
};

struct ImportanceRanking {
  std::string scope;  // "group:<name>" or "model:<kind>"
  std::vector<ImportanceEntry> entries;  // scores non-increasing

  bool contains(const std::string& term, std::size_t within_top) const;
  int rank_of(const std::string& term) const;  // 1-based, -1 if absent
};

// Terms ranked by summed tf-idf weight over the group's documents.
ImportanceRanking group_importance(const Corpus& corpus,
                                   std::shared_ptr<const Vocabulary> vocab,
                                   Group group, std::size_t top_k,
                                   const TokenizerOptions& tok = {});

// Per-term multipliers in (0,1] discounting terms whose mean tf-idf differs
// sharply between groups: delta(t) is the absolute percent change between
// group means (relative to the larger mean); multiplier is 1 when delta <=
// theta, else 1/(1+e^(k*(delta-theta))).
struct FairnessWeights {
  std::vector<double> multiplier;
  double theta = 20.0;      // percent
  double steepness = 0.1;   // k
};

FairnessWeights fair_weights(const Corpus& corpus,
                             std::shared_ptr<const Vocabulary> vocab,
                             double theta_percent, double steepness,
                             const TokenizerOptions& tok = {});

// Multiplies columns of a tfidf matrix by the fairness multipliers.
FeatureMatrix apply_fair_weights(const FeatureMatrix& tfidf,
                                 const FairnessWeights& weights);

// rankings.csv rows: term,score,rank (one block per ranking scope).
void write_rankings_csv(std::ostream& out,
                        const std::vector<ImportanceRanking>& rankings);
nlohmann::json rankings_to_json(const std::vector<ImportanceRanking>& rankings);

}  // namespace leakaudit
