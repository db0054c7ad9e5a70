#include "leakaudit/sentiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "leakaudit/errors.hpp"
#include "leakaudit/text.hpp"
#include "leakaudit_embedded.hpp"

namespace leakaudit {

const char* engine_id(SentimentEngine e) {
  return e == SentimentEngine::lex_mean ? "lex_mean" : "lex_shift";
}

SentimentLexicon SentimentLexicon::from_tsv(std::istream& in,
                                            std::string fallback_version) {
  SentimentLexicon lex;
  lex.version = std::move(fallback_version);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto pos = line.find("version:");
      if (pos != std::string::npos) {
        std::string v = line.substr(pos + 8);
        std::size_t b = v.find_first_not_of(" \t");
        if (b != std::string::npos) lex.version = v.substr(b);
      }
      continue;
    }
    std::istringstream fields(line);
    std::string term, value_str, kind;
    std::getline(fields, term, '\t');
    std::getline(fields, value_str, '\t');
    std::getline(fields, kind, '\t');
    if (term.empty() || value_str.empty())
      throw data_error("lexicon line " + std::to_string(line_no) +
                       ": expected term<TAB>value");
    double value = std::stod(value_str);
    if (!std::isfinite(value))
      throw data_error("lexicon term '" + term + "' has non-finite valence");
    if (kind.empty()) {
      lex.valence[term] = value;
    } else if (kind == "negator") {
      lex.negators.insert(term);
    } else if (kind == "booster") {
      lex.boosters[term] = value;
    } else {
      throw data_error("lexicon line " + std::to_string(line_no) +
                       ": unknown kind '" + kind + "'");
    }
  }
  for (const std::string& n : lex.negators)
    if (lex.boosters.count(n))
      throw data_error("lexicon: '" + n + "' is both negator and booster");
  return lex;
}

SentimentLexicon SentimentLexicon::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open lexicon file: " + path);
  return from_tsv(in, path);
}

const SentimentLexicon& SentimentLexicon::builtin() {
  static SentimentLexicon lex = [] {
    std::istringstream in(embedded::kSentimentLexicon);
    return from_tsv(in, "builtin");
  }();
  return lex;
}

std::vector<std::string> sentiment_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  bool prev_letter = false;
  std::size_t i = 0;
  auto flush = [&] {
    // trim apostrophes that ended up at the edge
    while (!current.empty() && current.back() == '\'') current.pop_back();
    if (!current.empty()) tokens.push_back(current);
    current.clear();
  };
  while (i < text.size()) {
    char32_t cp = utf8_next(text, i);
    if (cp == 0x2019) cp = '\'';  // curly apostrophe
    if (is_word_letter(cp)) {
      utf8_append(current, fold_lower(cp));
      prev_letter = true;
    } else if (cp == '\'' && prev_letter) {
      current += '\'';
    } else {
      flush();
      prev_letter = false;
    }
  }
  flush();
  return tokens;
}

SentimentScore score(std::string_view text, const SentimentLexicon& lexicon,
                     SentimentEngine engine, double tau) {
  std::vector<std::string> tokens = sentiment_tokens(text);

  double polarity = 0.0;
  if (engine == SentimentEngine::lex_mean) {
    double sum = 0.0;
    std::size_t hits = 0;
    for (const std::string& t : tokens) {
      auto it = lexicon.valence.find(t);
      if (it != lexicon.valence.end()) {
        sum += it->second;
        ++hits;
      }
    }
    // valences live in [-4,4]; the mean scaled by 1/4 lands in [-1,1]
    polarity = hits ? std::clamp(sum / static_cast<double>(hits) / 4.0, -1.0, 1.0)
                    : 0.0;
  } else {
    double total = 0.0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      auto it = lexicon.valence.find(tokens[i]);
      if (it == lexicon.valence.end()) continue;
      double v = it->second;
      std::size_t window = std::min<std::size_t>(i, 3);
      for (std::size_t back = 1; back <= window; ++back) {
        const std::string& prev = tokens[i - back];
        if (lexicon.negators.count(prev)) {
          v *= -0.74;
          break;
        }
      }
      for (std::size_t back = 1; back <= window; ++back) {
        auto booster = lexicon.boosters.find(tokens[i - back]);
        if (booster != lexicon.boosters.end()) {
          v += v >= 0.0 ? booster->second : -booster->second;
          break;
        }
      }
      total += v;
    }
    polarity = total / std::sqrt(total * total + 15.0);
  }

  SentimentScore s;
  s.engine = engine;
  s.polarity = polarity;
  if (polarity < -tau) s.label = SentimentLabel::negative;
  else if (polarity > tau) s.label = SentimentLabel::positive;
  else s.label = SentimentLabel::neutral;
  return s;
}

namespace {

std::vector<SentimentScore> score_corpus_impl(const Corpus& corpus,
                                              const SentimentLexicon& lexicon,
                                              SentimentEngine engine, double tau,
                                              bool parallel) {
  std::vector<SentimentScore> scores(corpus.size());
  const auto& docs = corpus.docs();
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 64)
    for (long i = 0; i < static_cast<long>(docs.size()); ++i)
      scores[i] = score(docs[i].text, lexicon, engine, tau);
  } else {
    for (std::size_t i = 0; i < docs.size(); ++i)
      scores[i] = score(docs[i].text, lexicon, engine, tau);
  }
  return scores;
}

}  // namespace

std::vector<SentimentScore> score_corpus(const Corpus& corpus,
                                         const SentimentLexicon& lexicon,
                                         SentimentEngine engine, double tau) {
  return score_corpus_impl(corpus, lexicon, engine, tau, true);
}

namespace reference {

std::vector<SentimentScore> score_corpus(const Corpus& corpus,
                                         const SentimentLexicon& lexicon,
                                         SentimentEngine engine, double tau) {
  return score_corpus_impl(corpus, lexicon, engine, tau, false);
}

}  // namespace reference

PreservationReport preservation(const Corpus& originals,
                                const Corpus& transformed,
                                const SentimentLexicon& lexicon,
                                const std::vector<SentimentEngine>& engines,
                                double tau) {
  if (originals.size() != transformed.size())
    throw data_error("preservation: corpora differ in size");
  for (std::size_t i = 0; i < originals.size(); ++i)
    if (originals.docs()[i].id != transformed.docs()[i].id)
      throw data_error("preservation: id mismatch at position " +
                       std::to_string(i) + ": '" + originals.docs()[i].id +
                       "' vs '" + transformed.docs()[i].id + "'");

  PreservationReport report;
  report.n_docs = originals.size();
  report.lexicon_version = lexicon.version;

  for (SentimentEngine engine : engines) {
    std::vector<SentimentScore> before =
        score_corpus(originals, lexicon, engine, tau);
    std::vector<SentimentScore> after =
        score_corpus(transformed, lexicon, engine, tau);

    EnginePreservation ep;
    ep.engine = engine;
    std::size_t agree = 0;
    double delta_sum = 0.0;
    for (std::size_t i = 0; i < before.size(); ++i) {
      ++ep.original_counts[static_cast<std::size_t>(before[i].label)];
      ++ep.transformed_counts[static_cast<std::size_t>(after[i].label)];
      if (before[i].label == after[i].label) ++agree;
      bool flip = (before[i].label == SentimentLabel::positive &&
                   after[i].label == SentimentLabel::negative) ||
                  (before[i].label == SentimentLabel::negative &&
                   after[i].label == SentimentLabel::positive);
      if (flip) ++ep.flips;
      delta_sum += std::abs(before[i].polarity - after[i].polarity);
    }
    ep.agreement = before.empty()
                       ? 1.0
                       : static_cast<double>(agree) /
                             static_cast<double>(before.size());
    ep.mean_abs_delta =
        before.empty() ? 0.0 : delta_sum / static_cast<double>(before.size());
    report.engines.push_back(ep);
  }

  // conservative roll-up: worst engine decides
  for (const EnginePreservation& ep : report.engines) {
    report.agreement = std::min(report.agreement, ep.agreement);
    report.flips = std::max(report.flips, ep.flips);
    report.mean_abs_delta = std::max(report.mean_abs_delta, ep.mean_abs_delta);
  }
  report.flip_rate = report.n_docs == 0
                         ? 0.0
                         : static_cast<double>(report.flips) /
                               static_cast<double>(report.n_docs);
  return report;
}

nlohmann::json PreservationReport::to_json() const {
  nlohmann::json per_engine = nlohmann::json::array();
  for (const EnginePreservation& ep : engines)
    per_engine.push_back({{"engine", engine_id(ep.engine)},
                          {"agreement", ep.agreement},
                          {"flips", ep.flips},
                          {"mean_abs_delta", ep.mean_abs_delta},
                          {"original_counts", ep.original_counts},
                          {"transformed_counts", ep.transformed_counts}});
  return {{"n_docs", n_docs},
          {"agreement", agreement},
          {"flips", flips},
          {"flip_rate", flip_rate},
          {"mean_abs_delta", mean_abs_delta},
          {"lexicon_version", lexicon_version},
          {"engines", per_engine}};
}

void write_sentiment_csv(std::ostream& out, const PreservationReport& report) {
  static const char* kLabels[3] = {"negative", "neutral", "positive"};
  out << "engine,dataset,label,count\n";
  for (const EnginePreservation& ep : report.engines)
    for (int l = 0; l < 3; ++l) {
      out << engine_id(ep.engine) << ",original," << kLabels[l] << ','
          << ep.original_counts[l] << '\n';
      out << engine_id(ep.engine) << ",simplified," << kLabels[l] << ','
          << ep.transformed_counts[l] << '\n';
    }
}

}  // namespace leakaudit
