#include "leakaudit/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "leakaudit/errors.hpp"

namespace leakaudit {

double Vocabulary::idf(std::uint32_t term_index) const {
  return std::log((1.0 + static_cast<double>(n_docs)) /
                  (1.0 + static_cast<double>(df[term_index]))) +
         1.0;
}

Vocabulary build_vocab(const Corpus& corpus, std::uint32_t min_df,
                       const TokenizerOptions& tok) {
  if (corpus.size() == 0) throw data_error("build_vocab: empty corpus");

  std::unordered_map<std::string, std::uint32_t> doc_freq;
  std::vector<std::string> doc_terms;
  for (const Document& d : corpus.docs()) {
    doc_terms = tokenize(d.text, tok);
    std::sort(doc_terms.begin(), doc_terms.end());
    doc_terms.erase(std::unique(doc_terms.begin(), doc_terms.end()),
                    doc_terms.end());
    for (const std::string& t : doc_terms) ++doc_freq[t];
  }

  std::vector<std::pair<std::string, std::uint32_t>> retained;
  for (auto& [term, df] : doc_freq)
    if (df >= min_df) retained.emplace_back(term, df);
  if (retained.empty())
    throw data_error("build_vocab: no term reaches min_df=" +
                     std::to_string(min_df));
  std::sort(retained.begin(), retained.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second > y.second;
    return x.first < y.first;
  });

  Vocabulary vocab;
  vocab.n_docs = corpus.size();
  vocab.terms.reserve(retained.size());
  vocab.df.reserve(retained.size());
  for (std::uint32_t i = 0; i < retained.size(); ++i) {
    vocab.terms.push_back(retained[i].first);
    vocab.df.push_back(retained[i].second);
    vocab.index.emplace(retained[i].first, i);
  }
  return vocab;
}

double FeatureMatrix::at(std::size_t row, std::uint32_t term_index) const {
  const SparseRow& r = rows[row];
  auto it = std::lower_bound(
      r.begin(), r.end(), term_index,
      [](const auto& entry, std::uint32_t idx) { return entry.first < idx; });
  return it != r.end() && it->first == term_index ? it->second : 0.0;
}

void FeatureMatrix::save_triplets(std::ostream& out,
                                  const std::vector<std::string>& doc_ids) const {
  out << "doc_id,term_index,weight\n";
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (const auto& [idx, w] : rows[i])
      out << doc_ids[i] << ',' << idx << ',' << w << '\n';
}

namespace {

SparseRow build_row(const std::string& text, const Vocabulary& vocab,
                    Weighting weighting, const TokenizerOptions& tok) {
  std::map<std::uint32_t, double> weights;
  for (const std::string& t : tokenize(text, tok)) {
    auto it = vocab.index.find(t);
    if (it != vocab.index.end()) weights[it->second] += 1.0;
  }
  SparseRow row(weights.begin(), weights.end());
  if (weighting != Weighting::counts) {
    double norm_sq = 0.0;
    for (auto& [idx, w] : row) {
      w *= vocab.idf(idx);
      norm_sq += w * w;
    }
    if (norm_sq > 0.0) {
      double inv = 1.0 / std::sqrt(norm_sq);
      for (auto& [idx, w] : row) w *= inv;
    }
  }
  return row;
}

}  // namespace

FeatureMatrix vectorize(const Corpus& corpus,
                        std::shared_ptr<const Vocabulary> vocab,
                        Weighting weighting, const TokenizerOptions& tok) {
  FeatureMatrix m;
  m.n_docs = corpus.size();
  m.vocab = vocab;
  m.weighting = weighting;
  m.rows.resize(corpus.size());
  const auto& docs = corpus.docs();
#pragma omp parallel for schedule(dynamic, 64)
  for (long i = 0; i < static_cast<long>(docs.size()); ++i)
    m.rows[i] = build_row(docs[i].text, *vocab, weighting, tok);
  return m;
}

namespace reference {

FeatureMatrix vectorize(const Corpus& corpus,
                        std::shared_ptr<const Vocabulary> vocab,
                        Weighting weighting, const TokenizerOptions& tok) {
  FeatureMatrix m;
  m.n_docs = corpus.size();
  m.vocab = vocab;
  m.weighting = weighting;
  m.rows.reserve(corpus.size());
  for (const Document& d : corpus.docs())
    m.rows.push_back(build_row(d.text, *vocab, weighting, tok));
  return m;
}

}  // namespace reference

bool ImportanceRanking::contains(const std::string& term,
                                 std::size_t within_top) const {
  for (std::size_t i = 0; i < entries.size() && i < within_top; ++i)
    if (entries[i].term == term) return true;
  return false;
}

int ImportanceRanking::rank_of(const std::string& term) const {
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (entries[i].term == term) return static_cast<int>(i) + 1;
  return -1;
}

namespace {

ImportanceRanking top_k_ranking(std::string scope,
                                std::vector<ImportanceEntry> scored,
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

ImportanceRanking group_importance(const Corpus& corpus,
                                   std::shared_ptr<const Vocabulary> vocab,
                                   Group group, std::size_t top_k,
                                   const TokenizerOptions& tok) {
  const GroupNames& names = corpus.groups();
  std::size_t present = corpus.count(group);
  if (present == 0)
    throw data_error("group_importance: group '" + names.display(group) +
                     "' absent from corpus");

  FeatureMatrix m = vectorize(corpus, vocab, Weighting::tfidf, tok);
  std::vector<double> sums(vocab->size(), 0.0);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (corpus.group_of(corpus.docs()[i]) != group) continue;
    for (const auto& [idx, w] : m.rows[i]) sums[idx] += w;
  }
  std::vector<ImportanceEntry> scored;
  scored.reserve(vocab->size());
  for (std::uint32_t i = 0; i < vocab->size(); ++i)
    if (sums[i] > 0.0) scored.push_back({vocab->terms[i], sums[i]});
  return top_k_ranking("group:" + names.display(group), std::move(scored),
                       top_k);
}

FairnessWeights fair_weights(const Corpus& corpus,
                             std::shared_ptr<const Vocabulary> vocab,
                             double theta_percent, double steepness,
                             const TokenizerOptions& tok) {
  const GroupNames& names = corpus.groups();
  (void)names;
  FeatureMatrix m = vectorize(corpus, vocab, Weighting::tfidf, tok);

  std::vector<double> sum_a(vocab->size(), 0.0), sum_b(vocab->size(), 0.0);
  std::size_t n_a = 0, n_b = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    bool is_a = corpus.group_of(corpus.docs()[i]) == Group::A;
    (is_a ? n_a : n_b) += 1;
    auto& sums = is_a ? sum_a : sum_b;
    for (const auto& [idx, w] : m.rows[i]) sums[idx] += w;
  }
  if (n_a == 0 || n_b == 0)
    throw data_error("fair_weights: corpus must contain both groups");

  FairnessWeights fw;
  fw.theta = theta_percent;
  fw.steepness = steepness;
  fw.multiplier.resize(vocab->size(), 1.0);
  for (std::size_t t = 0; t < vocab->size(); ++t) {
    double mean_a = sum_a[t] / static_cast<double>(n_a);
    double mean_b = sum_b[t] / static_cast<double>(n_b);
    double larger = std::max(mean_a, mean_b);
    if (larger <= 0.0) continue;  // term absent from both groups
    double delta = std::abs(mean_a - mean_b) / larger * 100.0;
    if (delta > theta_percent)
      fw.multiplier[t] = 1.0 / (1.0 + std::exp(steepness * (delta - theta_percent)));
  }
  return fw;
}

FeatureMatrix apply_fair_weights(const FeatureMatrix& tfidf,
                                 const FairnessWeights& weights) {
  FeatureMatrix out = tfidf;
  out.weighting = Weighting::fair_tfidf;
  for (SparseRow& row : out.rows)
    for (auto& [idx, w] : row) w *= weights.multiplier[idx];
  return out;
}

void write_rankings_csv(std::ostream& out,
                        const std::vector<ImportanceRanking>& rankings) {
  out << "scope,rank,term,score\n";
  for (const ImportanceRanking& r : rankings)
    for (std::size_t i = 0; i < r.entries.size(); ++i)
      out << r.scope << ',' << (i + 1) << ',' << r.entries[i].term << ','
          << r.entries[i].score << '\n';
}

nlohmann::json rankings_to_json(const std::vector<ImportanceRanking>& rankings) {
  nlohmann::json j = nlohmann::json::array();
  for (const ImportanceRanking& r : rankings) {
    nlohmann::json entries = nlohmann::json::array();
    for (const ImportanceEntry& e : r.entries)
      entries.push_back({{"term", e.term}, {"score", e.score}});
    j.push_back({{"scope", r.scope}, {"entries", entries}});
  }
  return j;
}

}  // namespace leakaudit
