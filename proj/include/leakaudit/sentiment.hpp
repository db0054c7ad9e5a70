#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "leakaudit/corpus.hpp"

namespace leakaudit {

// Term valences with negator and booster word lists. Loaded from a TSV data
// file (term <TAB> value [<TAB> negator|booster]); the builtin lexicon is
// embedded at build time and carries a version string recorded in reports.
struct SentimentLexicon {
  std::unordered_map<std::string, double> valence;
  std::unordered_set<std::string> negators;
  std::unordered_map<std::string, double> boosters;
  std::string version = "unversioned";

  static SentimentLexicon from_tsv(std::istream& in, std::string fallback_version);
  static SentimentLexicon from_file(const std::string& path);
  static const SentimentLexicon& builtin();
};

// Two independent scorers stand in for the usual pair of sentiment
// libraries: lex_mean takes the plain mean of matched valences (scaled to
// [-1,1]); lex_shift sums valences with negation flips and booster deltas,
// then normalizes by s/sqrt(s^2+15).
enum class SentimentEngine { lex_mean, lex_shift };

const char* engine_id(SentimentEngine e);

enum class SentimentLabel { negative = 0, neutral = 1, positive = 2 };

struct SentimentScore {
  double polarity = 0.0;  // in [-1, 1]
  SentimentLabel label = SentimentLabel::neutral;
  SentimentEngine engine = SentimentEngine::lex_shift;
};

// label = negative iff polarity < -tau, positive iff polarity > tau.
SentimentScore score(std::string_view text, const SentimentLexicon& lexicon,
                     SentimentEngine engine, double tau = 0.05);

// Tokens for sentiment scoring: lowercased words with internal apostrophes
// kept (so contracted negators match), no stopword removal.
std::vector<std::string> sentiment_tokens(std::string_view text);

struct EnginePreservation {
  SentimentEngine engine;
  double agreement = 1.0;
  std::size_t flips = 0;  // positive <-> negative only
  double mean_abs_delta = 0.0;
  std::array<std::size_t, 3> original_counts{0, 0, 0};   // neg/neu/pos
  std::array<std::size_t, 3> transformed_counts{0, 0, 0};
};

struct PreservationReport {
  std::size_t n_docs = 0;
  double agreement = 1.0;    // min over engines
  std::size_t flips = 0;     // max over engines
  double flip_rate = 0.0;
  double mean_abs_delta = 0.0;  // max over engines
  std::string lexicon_version;
  std::vector<EnginePreservation> engines;

  nlohmann::json to_json() const;
};

// Compares labels per engine across aligned corpora (same ids, same order).
// Throws data_error on id mismatch.
PreservationReport preservation(const Corpus& originals,
                                const Corpus& transformed,
                                const SentimentLexicon& lexicon,
                                const std::vector<SentimentEngine>& engines,
                                double tau = 0.05);

// Scores every document; the OpenMP path is used by preservation(), the
// serial one is the reference kernel kept for testing.
std::vector<SentimentScore> score_corpus(const Corpus& corpus,
                                         const SentimentLexicon& lexicon,
                                         SentimentEngine engine, double tau);
namespace reference {
std::vector<SentimentScore> score_corpus(const Corpus& corpus,
                                         const SentimentLexicon& lexicon,
                                         SentimentEngine engine, double tau);
}

// Fig-5-style CSV: engine,dataset,label,count.
void write_sentiment_csv(std::ostream& out, const PreservationReport& report);

}  // namespace leakaudit
